#include "aquasem/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aquasem/rng.hpp"

namespace aquasem {

namespace {

void check_ratio(double ratio) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
        throw std::invalid_argument("error ratio must lie in [0,1]");
    }
}

// Partial Fisher-Yates over [0..n), first k entries, sorted. Kept separate
// from select_positions so the substitution path can keep drawing from the
// same stream after the selection.
std::vector<std::size_t> select_with_rng(std::size_t n, std::size_t k, Splitmix64& rng) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

constexpr int kAlphabetSize = 0x7F - 0x20;  // 95 printable ASCII characters

char draw_replacement(Splitmix64& rng, char original) {
    for (;;) {
        char c = static_cast<char>(0x20 + rng.next_below(kAlphabetSize));
        if (c != original) return c;
    }
}

}  // namespace

ErrorType error_type_from_int(int value) {
    switch (value) {
        case 1: return ErrorType::CharSubstitution;
        case 2: return ErrorType::CharDeletion;
        case 3: return ErrorType::WordDeletion;
        default: break;
    }
    throw std::invalid_argument("error type must be 1, 2 or 3, got " + std::to_string(value));
}

std::size_t affected_count(std::size_t total_units, double ratio) {
    check_ratio(ratio);
    double k = std::floor(ratio * static_cast<double>(total_units) + 0.5);
    if (k <= 0.0) return 0;
    auto count = static_cast<std::size_t>(k);
    return std::min(count, total_units);
}

std::vector<std::size_t> select_positions(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n) {
        throw std::invalid_argument("cannot select " + std::to_string(k) + " positions out of " +
                                    std::to_string(n));
    }
    Splitmix64 rng(seed);
    return select_with_rng(n, k, rng);
}

CorruptionOutcome substitute_chars(const TextMessage& msg, double ratio, std::uint64_t seed) {
    check_ratio(ratio);
    const std::size_t n = msg.char_count();
    const std::size_t k = affected_count(n, ratio);

    Splitmix64 rng(seed);
    auto positions = select_with_rng(n, k, rng);

    std::string out = msg.content;
    // Replacements are drawn in ascending position order from the stream
    // that produced the selection; resampled until they differ.
    for (std::size_t pos : positions) {
        out[pos] = draw_replacement(rng, out[pos]);
    }
    return CorruptionOutcome{TextMessage{std::move(out)}, k, n};
}

CorruptionOutcome delete_chars(const TextMessage& msg, double ratio, std::uint64_t seed) {
    check_ratio(ratio);
    const std::size_t n = msg.char_count();
    const std::size_t k = affected_count(n, ratio);

    Splitmix64 rng(seed);
    auto positions = select_with_rng(n, k, rng);

    std::string out;
    out.reserve(n - k);
    std::size_t next_drop = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (next_drop < positions.size() && positions[next_drop] == i) {
            ++next_drop;
            continue;
        }
        out.push_back(msg.content[i]);
    }
    return CorruptionOutcome{TextMessage{std::move(out)}, k, n};
}

CorruptionOutcome delete_words(const TextMessage& msg, double ratio, std::uint64_t seed) {
    check_ratio(ratio);
    auto words = split_words(msg.content);
    const std::size_t total = words.size();
    const std::size_t k = affected_count(total, ratio);

    Splitmix64 rng(seed);
    auto positions = select_with_rng(total, k, rng);

    std::string out;
    std::size_t next_drop = 0;
    for (std::size_t i = 0; i < total; ++i) {
        if (next_drop < positions.size() && positions[next_drop] == i) {
            ++next_drop;
            continue;
        }
        if (!out.empty()) out.push_back(' ');
        out += words[i];
    }
    return CorruptionOutcome{TextMessage{std::move(out)}, k, total};
}

CorruptionOutcome corrupt(const TextMessage& msg, const ErrorSpec& spec) {
    switch (spec.error_type) {
        case ErrorType::CharSubstitution: return substitute_chars(msg, spec.ratio, spec.seed);
        case ErrorType::CharDeletion: return delete_chars(msg, spec.ratio, spec.seed);
        case ErrorType::WordDeletion: return delete_words(msg, spec.ratio, spec.seed);
    }
    throw std::invalid_argument("unknown error type");
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        std::size_t start = i;
        while (i < text.size() && text[i] != ' ') ++i;
        if (i > start) words.emplace_back(text.substr(start, i - start));
    }
    return words;
}

}  // namespace aquasem
