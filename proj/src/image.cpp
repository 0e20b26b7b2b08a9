#include "aquasem/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace aquasem {

namespace {

// Guards against absurd headers before allocating.
constexpr std::uint64_t kMaxSamples = 1ull << 30;

std::string lower_ext(const std::string& path) {
    auto ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

class PpmReader {
public:
    explicit PpmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    [[noreturn]] void fail(const std::string& reason) const { throw PixmapError(pos_, reason); }

    std::uint8_t peek() const {
        if (pos_ >= bytes_.size()) fail("unexpected end of data");
        return bytes_[pos_];
    }
    std::uint8_t take() {
        std::uint8_t c = peek();
        ++pos_;
        return c;
    }
    bool done() const { return pos_ >= bytes_.size(); }
    std::size_t pos() const { return pos_; }

    // Whitespace and '#' comments between header tokens.
    void skip_separators() {
        for (;;) {
            if (done()) return;
            std::uint8_t c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                ++pos_;
            } else if (c == '#') {
                while (!done() && take() != '\n') {
                }
            } else {
                return;
            }
        }
    }

    std::uint64_t read_uint() {
        skip_separators();
        if (done() || !std::isdigit(peek())) fail("expected an unsigned integer");
        std::uint64_t value = 0;
        while (!done() && std::isdigit(peek())) {
            value = value * 10 + (take() - '0');
            if (value > kMaxSamples) fail("header value out of range");
        }
        return value;
    }

    std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }
    void advance(std::size_t n) { pos_ += n; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

PixmapError::PixmapError(std::size_t offset, const std::string& reason)
    : std::runtime_error("pixmap parse error at byte " + std::to_string(offset) + ": " + reason),
      offset_(offset) {}

ImageBuffer ImageBuffer::make(int width, int height, int channels, std::uint8_t fill) {
    if (width < 1 || height < 1 || (channels != 1 && channels != 3)) {
        throw std::invalid_argument("invalid image shape");
    }
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.samples.assign(static_cast<std::size_t>(width) * height * channels, fill);
    return img;
}

ImageBuffer read_ppm(std::span<const std::uint8_t> bytes) {
    PpmReader r(bytes);
    if (bytes.size() < 2) r.fail("too short for a pixmap header");
    char m0 = static_cast<char>(r.take());
    char m1 = static_cast<char>(r.take());
    int channels;
    if (m0 == 'P' && m1 == '6') {
        channels = 3;
    } else if (m0 == 'P' && m1 == '5') {
        channels = 1;
    } else {
        throw PixmapError(0, "magic must be P6 or P5");
    }

    std::uint64_t w = r.read_uint();
    std::uint64_t h = r.read_uint();
    std::uint64_t maxval = r.read_uint();
    if (w == 0 || h == 0) r.fail("dimensions must be positive");
    if (maxval != 255) r.fail("maxval must be 255, got " + std::to_string(maxval));
    if (w * h * channels > kMaxSamples) r.fail("image too large");

    // Exactly one whitespace byte separates the header from the payload.
    if (r.done()) r.fail("missing payload");
    std::uint8_t sep = r.take();
    if (sep != '\n' && sep != ' ' && sep != '\t' && sep != '\r') {
        throw PixmapError(r.pos() - 1, "expected single whitespace after maxval");
    }

    const std::size_t need = static_cast<std::size_t>(w * h * channels);
    auto payload = r.rest();
    if (payload.size() < need) {
        r.fail("truncated payload, need " + std::to_string(need) + " bytes, have " +
               std::to_string(payload.size()));
    }
    if (payload.size() > need) {
        throw PixmapError(r.pos() + need, "trailing data after payload");
    }

    ImageBuffer img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.channels = channels;
    img.samples.assign(payload.begin(), payload.end());
    return img;
}

ImageBuffer read_ppm(std::string_view bytes) {
    return read_ppm(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::vector<std::uint8_t> write_ppm(const ImageBuffer& img) {
    if (img.channels != 1 && img.channels != 3) {
        throw std::invalid_argument("write_ppm requires 1 or 3 channels");
    }
    if (img.samples.size() !=
        static_cast<std::size_t>(img.width) * img.height * img.channels) {
        throw std::invalid_argument("sample count does not match image shape");
    }
    std::string header = (img.channels == 3 ? std::string("P6\n") : std::string("P5\n")) +
                         std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out;
    out.reserve(header.size() + img.samples.size());
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), img.samples.begin(), img.samples.end());
    return out;
}

ImageBuffer to_gray(const ImageBuffer& img) {
    if (img.channels == 1) return img;
    ImageBuffer out = ImageBuffer::make(img.width, img.height, 1);
    const std::size_t pixels = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < pixels; ++i) {
        double r = img.samples[i * 3 + 0];
        double g = img.samples[i * 3 + 1];
        double b = img.samples[i * 3 + 2];
        double y = 0.299 * r + 0.587 * g + 0.114 * b;
        out.samples[i] = static_cast<std::uint8_t>(std::llround(y));
    }
    return out;
}

ImageBuffer expand_to_rgb(const ImageBuffer& img) {
    if (img.channels == 3) return img;
    ImageBuffer out = ImageBuffer::make(img.width, img.height, 3);
    const std::size_t pixels = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < pixels; ++i) {
        out.samples[i * 3 + 0] = img.samples[i];
        out.samples[i * 3 + 1] = img.samples[i];
        out.samples[i * 3 + 2] = img.samples[i];
    }
    return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw std::invalid_argument("resize target must be at least 1x1");
    }
    if (img.width == out_w && img.height == out_h) return img;

    ImageBuffer out = ImageBuffer::make(out_w, out_h, img.channels);
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;

    for (int oy = 0; oy < out_h; ++oy) {
        // Half-pixel center alignment.
        double fy = (oy + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y0c = std::clamp(y0, 0, img.height - 1);
        int y1c = std::clamp(y0 + 1, 0, img.height - 1);
        for (int ox = 0; ox < out_w; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x0c = std::clamp(x0, 0, img.width - 1);
            int x1c = std::clamp(x0 + 1, 0, img.width - 1);
            for (int c = 0; c < img.channels; ++c) {
                double top = (1.0 - wx) * img.at(x0c, y0c, c) + wx * img.at(x1c, y0c, c);
                double bot = (1.0 - wx) * img.at(x0c, y1c, c) + wx * img.at(x1c, y1c, c);
                double v = (1.0 - wy) * top + wy * bot;
                double rounded = std::floor(v + 0.5);
                out.at(ox, oy, c) =
                    static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
            }
        }
    }
    return out;
}

ImageBuffer load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open image file: " + path);
    }
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    auto ext = lower_ext(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
        return read_ppm(std::span<const std::uint8_t>(bytes));
    }
    if (ext == ".png") {
#ifdef AQUASEM_HAS_PNG
        return read_png(std::span<const std::uint8_t>(bytes));
#else
        throw std::runtime_error("PNG support not built in, cannot load " + path);
#endif
    }
    throw std::runtime_error("unsupported image format: " + path);
}

void save_image(const std::string& path, const ImageBuffer& img) {
    auto bytes = write_ppm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("short write: " + path);
    }
}

bool png_supported() {
#ifdef AQUASEM_HAS_PNG
    return true;
#else
    return false;
#endif
}

}  // namespace aquasem
