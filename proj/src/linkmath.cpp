#include "aquasem/linkmath.hpp"

#include <stdexcept>

namespace aquasem {

BerBounds ber_bounds(double cer, int bits_per_char) {
    if (!(cer >= 0.0 && cer <= 1.0)) {
        throw std::invalid_argument("cer must lie in [0,1]");
    }
    if (bits_per_char < 1) {
        throw std::invalid_argument("bits_per_char must be at least 1");
    }
    BerBounds b;
    b.cer = cer;
    b.bits_per_char = bits_per_char;
    b.lower = cer / static_cast<double>(bits_per_char);
    b.upper = cer;
    return b;
}

PayloadStats payload_stats(std::uint64_t image_bytes, const TextMessage& msg) {
    PayloadStats stats;
    stats.image_bytes = image_bytes;
    stats.text_bytes = msg.byte_count();
    if (stats.text_bytes > 0) {
        stats.compression_ratio =
            static_cast<double>(image_bytes) / static_cast<double>(stats.text_bytes);
        stats.ratio_defined = true;
    }
    return stats;
}

}  // namespace aquasem
