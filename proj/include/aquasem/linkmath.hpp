#pragma once

#include <cstdint>

#include "aquasem/text.hpp"

namespace aquasem {

// Bit error ratio interval implied by a character error ratio. The lower
// bound assumes one corrupted bit per corrupted character, the upper bound
// assumes every bit of a corrupted character is wrong.
struct BerBounds {
    double cer = 0.0;
    int bits_per_char = 8;
    double lower = 0.0;  // cer / bits_per_char
    double upper = 0.0;  // cer
};

// Throws std::invalid_argument when cer is outside [0,1] or bits_per_char < 1.
BerBounds ber_bounds(double cer, int bits_per_char = 8);

// Image-to-text payload accounting for the link budget.
struct PayloadStats {
    std::uint64_t image_bytes = 0;
    std::uint64_t text_bytes = 0;
    double compression_ratio = 0.0;  // image_bytes / text_bytes
    bool ratio_defined = false;      // false when text_bytes == 0
};

PayloadStats payload_stats(std::uint64_t image_bytes, const TextMessage& msg);

}  // namespace aquasem
