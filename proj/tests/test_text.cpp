#include <string>

#include "aquasem/rng.hpp"
#include "aquasem/text.hpp"
#include "doctest.h"

using aquasem::is_sanitized;
using aquasem::sanitize;

TEST_CASE("sanitize maps control bytes to single spaces") {
    CHECK(sanitize("a fish\n").content == "a fish ");
    CHECK(sanitize("a\tfish").content == "a fish");
    CHECK(sanitize("\r\na fish").content == " a fish");
}

TEST_CASE("sanitize collapses each run of bad bytes to one space") {
    CHECK(sanitize("a\r\n\tb").content == "a b");
    // Multi-byte UTF-8 sequences are one contiguous bad run.
    CHECK(sanitize("caf\xc3\xa9 au lait").content == "caf  au lait");
    CHECK(sanitize("\xe6\xb5\xb7").content == " ");
}

TEST_CASE("sanitize leaves printable ASCII untouched") {
    std::string all;
    for (int c = 0x20; c <= 0x7E; ++c) all.push_back(static_cast<char>(c));
    CHECK(sanitize(all).content == all);
}

TEST_CASE("sanitize handles edge inputs") {
    CHECK(sanitize("").content == "");
    CHECK(sanitize("\n").content == " ");
    CHECK(sanitize("\x7f").content == " ");
    CHECK(sanitize("\x1f").content == " ");
}

TEST_CASE("sanitize is idempotent and always yields sanitized text") {
    aquasem::Splitmix64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::string raw;
        std::size_t len = rng.next_below(64);
        for (std::size_t i = 0; i < len; ++i) {
            raw.push_back(static_cast<char>(rng.next() & 0xFF));
        }
        std::string once = sanitize(raw).content;
        CHECK(is_sanitized(once));
        CHECK(sanitize(once).content == once);
    }
}

TEST_CASE("is_sanitized detects out-of-range bytes") {
    CHECK(is_sanitized(""));
    CHECK(is_sanitized("a fish swims"));
    CHECK_FALSE(is_sanitized("a fish\n"));
    CHECK_FALSE(is_sanitized("\ttab"));
    CHECK_FALSE(is_sanitized("\x80"));
}

TEST_CASE("char and byte counts coincide for sanitized text") {
    aquasem::TextMessage msg = sanitize("a small fish");
    CHECK(msg.char_count() == 12);
    CHECK(msg.byte_count() == 12);
}
