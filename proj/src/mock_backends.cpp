#include "aquasem/mock_backends.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "aquasem/channel.hpp"
#include "aquasem/metrics.hpp"
#include "aquasem/rng.hpp"

namespace aquasem {

namespace {

struct NamedColor {
    std::string_view word;
    std::array<std::uint8_t, 3> rgb;
};

// Canonical palette shared between the mock captioner and generator. Each
// entry round-trips: hue_word() of the color returns the word, so a caption
// of a generated image names the colors the prompt asked for.
constexpr NamedColor kPalette[] = {
    {"red", {200, 40, 40}},    {"yellow", {200, 200, 40}}, {"green", {40, 200, 40}},
    {"cyan", {40, 200, 200}},  {"blue", {40, 40, 200}},    {"magenta", {200, 40, 200}},
    {"gray", {128, 128, 128}},
};

// Every word the mock captioner can emit. recognized_fraction() measures how
// close a prompt stays to this vocabulary once the channel mangles it.
constexpr std::string_view kVocabulary[] = {
    "red",  "yellow", "green", "cyan",  "blue",  "magenta", "gray",  "dark",  "dim",
    "bright", "a",    "scene", "with",  "upper", "lower",   "left",  "right", "and",
};

// Nearest of the palette's channel levels. Hash-derived colors snap onto the
// same grid the named colors live on: the generator only paints shades it
// knows, so an unrecognized word changes which levels appear, not the overall
// color statistics of the render.
std::uint8_t snap_level(std::uint64_t v) {
    if (v < 84) return 40;
    if (v < 164) return 128;
    return 200;
}

std::array<std::uint8_t, 3> color_from_hash(std::uint64_t h) {
    std::uint64_t m = mix64(h);
    return {snap_level(m & 0xFF), snap_level((m >> 8) & 0xFF), snap_level((m >> 16) & 0xFF)};
}

// Small-word Levenshtein distance, used to grade how much of a vocabulary word
// survives corruption: one mangled character should not zero out the match.
int edit_distance(std::string_view a, std::string_view b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<int> prev(m + 1), cur(m + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

// Weight in [0,1] of the nearest palette color for a word: 1 for an exact
// palette word, 2/3 and 1/3 for edit distance 1 and 2, 0 beyond.
double palette_affinity(std::string_view word, std::array<std::uint8_t, 3>& rgb_out) {
    int best = 3;
    for (const auto& entry : kPalette) {
        auto len_a = static_cast<long>(word.size());
        auto len_b = static_cast<long>(entry.word.size());
        if (std::labs(len_a - len_b) >= best) continue;
        int d = edit_distance(word, entry.word);
        if (d < best) {
            best = d;
            rgb_out = entry.rgb;
        }
    }
    return best >= 3 ? 0.0 : (3 - best) / 3.0;
}

std::uint8_t scale_channel(double value, double factor) {
    double v = std::floor(value * factor + 0.5);
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

std::array<std::uint8_t, 3> shade(const std::array<std::uint8_t, 3>& rgb, double factor) {
    return {scale_channel(rgb[0], factor), scale_channel(rgb[1], factor),
            scale_channel(rgb[2], factor)};
}

// Render color for one prompt word: canonical palette color weighted by how
// close the word still is to that color's name, falling back to a color hashed
// from the (possibly mangled) word itself.
std::array<std::uint8_t, 3> word_color(std::string_view word) {
    std::array<std::uint8_t, 3> canonical{};
    double affinity = palette_affinity(word, canonical);
    auto hashed = color_from_hash(hash_bytes(word));
    std::array<std::uint8_t, 3> out{};
    for (int c = 0; c < 3; ++c) {
        double blended = affinity * canonical[c] + (1.0 - affinity) * hashed[c];
        out[c] = scale_channel(blended, 1.0);
    }
    return out;
}

void fill_rect(ImageBuffer& img, int x0, int x1, int y0, int y1,
               const std::array<std::uint8_t, 3>& rgb) {
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = rgb[c];
        }
    }
}

double quadrant_mean(const ImageBuffer& img, int channel, bool right, bool bottom) {
    const int x0 = right ? img.width / 2 : 0;
    const int x1 = right ? img.width : img.width / 2;
    const int y0 = bottom ? img.height / 2 : 0;
    const int y1 = bottom ? img.height : img.height / 2;
    std::uint64_t acc = 0;
    std::uint64_t count = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            acc += img.at(x, y, channel);
            ++count;
        }
    }
    return count ? static_cast<double>(acc) / count : 0.0;
}

}  // namespace

std::optional<std::array<std::uint8_t, 3>> vocabulary_color(std::string_view word) {
    for (const auto& entry : kPalette) {
        if (entry.word == word) return entry.rgb;
    }
    return std::nullopt;
}

const char* brightness_word(double mean_luma) {
    if (mean_luma < 85.0) return "dark";
    if (mean_luma < 170.0) return "dim";
    return "bright";
}

const char* hue_word(double r, double g, double b) {
    double hi = std::max({r, g, b});
    double lo = std::min({r, g, b});
    double delta = hi - lo;
    if (delta < 16.0) return "gray";
    double hue;
    if (hi == r) {
        hue = 60.0 * std::fmod((g - b) / delta + 6.0, 6.0);
    } else if (hi == g) {
        hue = 60.0 * ((b - r) / delta + 2.0);
    } else {
        hue = 60.0 * ((r - g) / delta + 4.0);
    }
    int sector = static_cast<int>(std::fmod(hue + 30.0, 360.0) / 60.0);
    static constexpr const char* kSectors[] = {"red",  "yellow",  "green",
                                               "cyan", "blue", "magenta"};
    return kSectors[std::clamp(sector, 0, 5)];
}

double brightness_factor(std::string_view word) {
    if (word == "dark") return 0.5;
    if (word == "dim") return 1.0;
    if (word == "bright") return 1.25;
    return 0.7;
}

double recognized_fraction(const std::vector<std::string>& words) {
    if (words.empty()) return 1.0;
    double weighted = 0.0;
    double total = 0.0;
    for (const auto& w : words) {
        int best = 3;
        for (std::string_view v : kVocabulary) {
            auto len_a = static_cast<long>(w.size());
            auto len_b = static_cast<long>(v.size());
            if (std::labs(len_a - len_b) >= best) continue;
            best = std::min(best, edit_distance(w, v));
            if (best == 0) break;
        }
        double affinity = best >= 3 ? 0.0 : (3 - best) / 3.0;
        weighted += affinity * static_cast<double>(w.size());
        total += static_cast<double>(w.size());
    }
    return weighted / total;
}

TextMessage MockCaptioner::caption(const ImageBuffer& img) {
    ImageBuffer rgb = expand_to_rgb(img);
    ImageBuffer luma = to_gray(img);
    double mean_luma = 0.0;
    for (std::uint8_t v : luma.samples) mean_luma += v;
    mean_luma /= static_cast<double>(luma.samples.size());

    auto quadrant_hue = [&](bool right, bool bottom) {
        double r = quadrant_mean(rgb, 0, right, bottom);
        double g = quadrant_mean(rgb, 1, right, bottom);
        double b = quadrant_mean(rgb, 2, right, bottom);
        return hue_word(r, g, b);
    };

    std::string text = std::string("a ") + brightness_word(mean_luma) + " scene with " +
                       quadrant_hue(false, false) + " upper left and " +
                       quadrant_hue(true, false) + " upper right and " +
                       quadrant_hue(false, true) + " lower left and " +
                       quadrant_hue(true, true) + " lower right";
    return TextMessage{sanitize(text)};
}

ImageBuffer MockGenerator::generate(const GenerationRequest& req) {
    if (req.width < 16 || req.height < 16) {
        throw std::invalid_argument("generation size must be at least 16x16");
    }
    auto words = split_words(req.prompt.content);
    if (words.empty()) {
        // Degenerate channel output: nothing to render.
        return ImageBuffer::make(req.width, req.height, 3, 128);
    }

    // First word within one edit of a brightness word sets the exposure,
    // graded toward the 0.7 fallback as the match degrades.
    double factor = 0.7;
    for (const auto& w : words) {
        int best = 2;
        double canonical = 0.7;
        for (std::string_view b : {"dark", "dim", "bright"}) {
            int d = edit_distance(w, b);
            if (d < best) {
                best = d;
                canonical = brightness_factor(b);
            }
        }
        if (best < 2) {
            double weight = (3 - best) / 3.0;
            factor = weight * canonical + (1.0 - weight) * 0.7;
            break;
        }
    }
    // Prompt text the generator cannot place in its vocabulary reads as noise
    // and washes the render out toward 80% exposure.
    const double scale = factor * (0.8 + 0.2 * recognized_fraction(words));

    // Background: length-weighted average of every word's color. One mangled
    // word nudges it instead of replacing it, and word order does not matter.
    double bg_acc[3] = {0.0, 0.0, 0.0};
    double bg_total = 0.0;
    for (const auto& w : words) {
        auto color = word_color(w);
        for (int c = 0; c < 3; ++c) bg_acc[c] += color[c] * static_cast<double>(w.size());
        bg_total += static_cast<double>(w.size());
    }
    std::array<std::uint8_t, 3> bg{};
    for (int c = 0; c < 3; ++c) bg[c] = scale_channel(bg_acc[c] / bg_total, 1.0);

    ImageBuffer img = ImageBuffer::make(req.width, req.height, 3);
    fill_rect(img, 0, req.width, 0, req.height, shade(bg, scale));

    // Ground spatial phrases: "<word> upper|lower left|right" paints the named
    // quadrant with the word's color. A clean caption covers all four. The
    // direction words tolerate one edit each, fading the paint into the
    // background as they degrade.
    auto direction_match = [](std::string_view w, std::string_view a, std::string_view b,
                              bool& picked_b) {
        int da = edit_distance(w, a);
        int db = edit_distance(w, b);
        picked_b = db < da;
        return std::min(da, db);
    };
    for (std::size_t i = 0; i + 2 < words.size(); ++i) {
        bool lower = false;
        bool right = false;
        int dv = direction_match(words[i + 1], "upper", "lower", lower);
        if (dv > 1) continue;
        int dh = direction_match(words[i + 2], "left", "right", right);
        if (dh > 1) continue;
        const double opacity = ((3 - dv) / 3.0) * ((3 - dh) / 3.0);
        auto color = word_color(words[i]);
        std::array<std::uint8_t, 3> paint{};
        for (int c = 0; c < 3; ++c) {
            paint[c] = scale_channel(opacity * color[c] + (1.0 - opacity) * bg[c], 1.0);
        }
        const int x0 = right ? req.width / 2 : 0;
        const int x1 = right ? req.width : req.width / 2;
        const int y0 = lower ? req.height / 2 : 0;
        const int y1 = lower ? req.height : req.height / 2;
        fill_rect(img, x0, x1, y0, y1, shade(paint, scale));
    }

    // One horizontal band per word across the middle sixth of the image,
    // heights proportional to word length.
    std::size_t total_len = 0;
    for (const auto& w : words) total_len += w.size();
    const int band_top = req.height * 5 / 12;
    const int band_height = req.height / 6;
    std::size_t cum = 0;
    for (const auto& w : words) {
        int y0 = band_top + static_cast<int>(band_height * cum / total_len);
        cum += w.size();
        int y1 = band_top + static_cast<int>(band_height * cum / total_len);
        fill_rect(img, 0, req.width, y0, y1, shade(word_color(w), scale));
    }

    // Per-row dither keyed to the generation seed: the only seed-dependent
    // part, standing in for sampler stochasticity. The shift is shared by all
    // channels in a row, so it brightens without shifting hue.
    for (int y = 0; y < req.height; ++y) {
        std::uint64_t h = mix64(req.seed ^ (0x9E3779B97F4A7C15ull * (y + 1)));
        int delta = static_cast<int>(h % 15) - 7;
        for (int x = 0; x < req.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                int v = img.at(x, y, c) + delta;
                img.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
            }
        }
    }
    return img;
}

Embedding MockEmbedder::embed(const ImageBuffer& img) {
    ImageBuffer rgb = expand_to_rgb(img);
    Embedding e;
    e.values.assign(kDimensions, 0.0);

    // 24 dims: per-channel 8-bin histograms, unit mass per channel.
    const std::size_t pixels = static_cast<std::size_t>(rgb.width) * rgb.height;
    for (std::size_t i = 0; i < pixels; ++i) {
        for (int c = 0; c < 3; ++c) {
            int bin = rgb.samples[i * 3 + c] / 32;
            e.values[c * 8 + bin] += 1.0;
        }
    }
    for (std::size_t k = 0; k < 24; ++k) {
        e.values[k] /= static_cast<double>(pixels);
    }

    // 64 dims: 8x8 gray thumbnail in [0,1].
    ImageBuffer thumb = resize_bilinear(to_gray(img), 8, 8);
    for (std::size_t i = 0; i < 64; ++i) {
        e.values[24 + i] = thumb.samples[i] / 255.0;
    }

    double norm = e.norm();
    for (auto& v : e.values) v /= norm;
    return e;
}

}  // namespace aquasem
