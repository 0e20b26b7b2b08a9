#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace aquasem {

// A caption payload restricted to printable ASCII 0x20-0x7E. Channel
// operations expect sanitized content; for such content character count and
// byte count coincide.
struct TextMessage {
    std::string content;

    std::size_t char_count() const { return content.size(); }
    std::size_t byte_count() const { return content.size(); }

    bool operator==(const TextMessage&) const = default;
};

// Replaces each maximal run of bytes outside 0x20-0x7E with a single space.
// Total and idempotent. Multi-byte UTF-8 sequences collapse to one space
// because their bytes form one such run.
TextMessage sanitize(std::string_view raw);

// True when every byte already lies in 0x20-0x7E.
bool is_sanitized(std::string_view text);

}  // namespace aquasem
