#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aquasem {

// RFC 4648 base64, no line wrapping.
std::string base64_encode(std::span<const std::uint8_t> data);

// Strict decode; throws std::invalid_argument on bad characters or padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace aquasem
