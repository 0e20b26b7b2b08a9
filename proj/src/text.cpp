#include "aquasem/text.hpp"

namespace aquasem {

namespace {

bool printable_ascii(unsigned char c) { return c >= 0x20 && c <= 0x7E; }

}  // namespace

TextMessage sanitize(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool in_run = false;
    for (unsigned char c : raw) {
        if (printable_ascii(c)) {
            out.push_back(static_cast<char>(c));
            in_run = false;
        } else if (!in_run) {
            // A whole run of non-printable bytes becomes one space.
            out.push_back(' ');
            in_run = true;
        }
    }
    return TextMessage{std::move(out)};
}

bool is_sanitized(std::string_view text) {
    for (unsigned char c : text) {
        if (!printable_ascii(c)) return false;
    }
    return true;
}

}  // namespace aquasem
