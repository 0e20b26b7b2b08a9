#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aquasem/text.hpp"

namespace aquasem {

// The three text-level channel impairments. Numeric values are stable and
// appear in configs, CSV output and the CLI.
enum class ErrorType : int {
    CharSubstitution = 1,
    CharDeletion = 2,
    WordDeletion = 3,
};

// Throws std::invalid_argument for anything outside {1,2,3}.
ErrorType error_type_from_int(int value);

struct ErrorSpec {
    ErrorType error_type = ErrorType::CharSubstitution;
    double ratio = 0.0;  // requested fraction of affected units, in [0,1]
    std::uint64_t seed = 0;
};

struct CorruptionOutcome {
    TextMessage corrupted;
    std::size_t affected_units = 0;
    std::size_t total_units = 0;

    double realized_ratio() const {
        return total_units == 0
                   ? 0.0
                   : static_cast<double>(affected_units) / static_cast<double>(total_units);
    }
};

// floor(ratio * total_units + 0.5), clamped to [0, total_units].
// Round-half-up keeps ratio 0.5 intuitive on odd unit counts.
// Throws std::invalid_argument when ratio is outside [0,1].
std::size_t affected_count(std::size_t total_units, double ratio);

// k distinct indices in [0,n), ascending. Partial Fisher-Yates over the
// splitmix64 stream seeded with `seed`; deterministic for fixed (n,k,seed).
// Throws std::invalid_argument when k > n.
std::vector<std::size_t> select_positions(std::size_t n, std::size_t k, std::uint64_t seed);

// Error type 1: k = affected_count(chars, ratio) positions get a uniformly
// drawn printable ASCII character, resampled until it differs from the
// original. Length is preserved.
CorruptionOutcome substitute_chars(const TextMessage& msg, double ratio, std::uint64_t seed);

// Error type 2: k selected characters are removed; the rest keep their order.
CorruptionOutcome delete_chars(const TextMessage& msg, double ratio, std::uint64_t seed);

// Error type 3: words are maximal non-space runs; k = affected_count(words,
// ratio) of them are removed and the survivors re-joined with single spaces.
CorruptionOutcome delete_words(const TextMessage& msg, double ratio, std::uint64_t seed);

// Dispatches on spec.error_type. Each error type is applied on its own,
// never combined.
CorruptionOutcome corrupt(const TextMessage& msg, const ErrorSpec& spec);

// Maximal non-space runs, in order.
std::vector<std::string> split_words(std::string_view text);

}  // namespace aquasem
