#ifdef AQUASEM_HAS_PNG

#include "aquasem/image.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <stdexcept>

namespace aquasem {

namespace {

struct MemorySource {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
    auto* src = static_cast<MemorySource*>(png_get_io_ptr(png));
    if (src->pos + count > src->size) {
        png_error(png, "read past end of PNG data");
    }
    std::memcpy(out, src->data + src->pos, count);
    src->pos += count;
}

struct PngHandles {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngHandles() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

}  // namespace

ImageBuffer read_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw std::runtime_error("not a PNG stream");
    }

    PngHandles h;
    h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!h.png) throw std::runtime_error("png_create_read_struct failed");
    h.info = png_create_info_struct(h.png);
    if (!h.info) throw std::runtime_error("png_create_info_struct failed");

    if (setjmp(png_jmpbuf(h.png))) {
        throw std::runtime_error("libpng failed to decode stream");
    }

    MemorySource src{bytes.data(), bytes.size(), 0};
    png_set_read_fn(h.png, &src, read_from_memory);
    png_read_info(h.png, h.info);

    png_uint_32 width = png_get_image_width(h.png, h.info);
    png_uint_32 height = png_get_image_height(h.png, h.info);
    int bit_depth = png_get_bit_depth(h.png, h.info);
    int color_type = png_get_color_type(h.png, h.info);

    if (bit_depth == 16) {
        throw std::runtime_error("16-bit PNG images are not supported");
    }

    // Normalize everything to 8-bit gray or RGB.
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(h.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(h.png);
    }
    if (png_get_valid(h.png, h.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(h.png);
    if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(h.png, h.info, PNG_INFO_tRNS)) {
        png_set_strip_alpha(h.png);
    }
    png_read_update_info(h.png, h.info);

    color_type = png_get_color_type(h.png, h.info);
    int channels = (color_type == PNG_COLOR_TYPE_GRAY) ? 1 : 3;
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
        throw std::runtime_error("unsupported PNG color type after normalization");
    }

    ImageBuffer img = ImageBuffer::make(static_cast<int>(width), static_cast<int>(height),
                                        channels);
    std::size_t row_bytes = png_get_rowbytes(h.png, h.info);
    if (row_bytes != static_cast<std::size_t>(width) * channels) {
        throw std::runtime_error("unexpected PNG row size");
    }
    std::vector<png_bytep> rows(height);
    for (png_uint_32 y = 0; y < height; ++y) {
        rows[y] = img.samples.data() + static_cast<std::size_t>(y) * row_bytes;
    }
    png_read_image(h.png, rows.data());
    png_read_end(h.png, nullptr);
    return img;
}

}  // namespace aquasem

#endif  // AQUASEM_HAS_PNG
