#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aquasem {

// Row-major 8-bit image with 1 (gray) or 3 (RGB) channels.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> samples;  // size == width * height * channels

    static ImageBuffer make(int width, int height, int channels, std::uint8_t fill = 0);

    std::size_t sample_count() const { return samples.size(); }

    std::uint8_t at(int x, int y, int c) const {
        assert(x >= 0 && x < width && y >= 0 && y < height && c >= 0 && c < channels);
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(int x, int y, int c) {
        assert(x >= 0 && x < width && y >= 0 && y < height && c >= 0 && c < channels);
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const ImageBuffer& other) const {
        return width == other.width && height == other.height && channels == other.channels;
    }

    bool operator==(const ImageBuffer&) const = default;
};

// Parse failure for the pixmap codec; carries the byte offset of the problem.
class PixmapError : public std::runtime_error {
public:
    PixmapError(std::size_t offset, const std::string& reason);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Binary PPM "P6" (3 channels) or PGM "P5" (1 channel), maxval 255 only.
// Comments are allowed in the header; round-trips with write_ppm are
// byte-identical on canonical files.
ImageBuffer read_ppm(std::span<const std::uint8_t> bytes);
ImageBuffer read_ppm(std::string_view bytes);

// Canonical encoding: "P6\n<w> <h>\n255\n" (or P5) followed by raw samples.
std::vector<std::uint8_t> write_ppm(const ImageBuffer& img);

// Integer Rec.601 luma, round half up; identity on 1-channel input.
ImageBuffer to_gray(const ImageBuffer& img);

// Bilinear resampling with half-pixel center alignment, per channel.
// Output samples are rounded half up and clamped to [0,255]; resizing to the
// source size reproduces the input exactly.
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h);

// Expands 1-channel images to RGB by replication; identity on RGB input.
ImageBuffer expand_to_rgb(const ImageBuffer& img);

// Dispatches on extension: .ppm/.pgm/.pnm always, .png when built with
// libpng. Throws std::runtime_error on I/O failure or unsupported formats.
ImageBuffer load_image(const std::string& path);

// Writes the canonical pixmap encoding of `img` to `path`.
void save_image(const std::string& path, const ImageBuffer& img);

bool png_supported();

#ifdef AQUASEM_HAS_PNG
// 8-bit gray/RGB PNG decoder; rejects 16-bit depth.
ImageBuffer read_png(std::span<const std::uint8_t> bytes);
#endif

}  // namespace aquasem
