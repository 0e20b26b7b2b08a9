#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aquasem/backends.hpp"

namespace aquasem {

// Word set shared by the mock captioner and mock generator. The captioner
// emits these words to describe an image; the generator paints them back as
// their canonical colors, so an intact caption reconstructs the palette of
// the captioned image while a corrupted one loses it word by word.
std::optional<std::array<std::uint8_t, 3>> vocabulary_color(std::string_view word);

// "dark" below 85, "dim" below 170, otherwise "bright".
const char* brightness_word(double mean_luma);

// Hue bucket of a mean RGB color: gray when max-min < 16, otherwise one of
// red/yellow/green/cyan/blue/magenta by 60 degree sectors.
const char* hue_word(double r, double g, double b);

// Brightness scale the mock generator applies to every painted color,
// centered on the luma bucket the word names: dark -> 0.5, dim -> 1.0,
// bright -> 1.25, any other word -> 0.7.
double brightness_factor(std::string_view word);

// Fraction of the prompt the generator recognizes: length-weighted nearest
// vocabulary affinity per word, 1.0 for a clean caption, falling toward 0 as
// characters are mangled. Deleted words drop out of both sides of the
// average, so pure word deletion leaves the survivors at 1.
double recognized_fraction(const std::vector<std::string>& words);

// Caption template, fixed:
//   "a <brightness> scene with <hue> upper left and <hue> upper right and
//    <hue> lower left and <hue> lower right"
// where <brightness> and the four <hue> words are taken from the shared
// vocabulary. Identical images always caption identically.
class MockCaptioner : public Captioner {
public:
    TextMessage caption(const ImageBuffer& img) override;
    std::string name() const override { return "mock"; }
};

// Renders the prompt the way a grounded text-to-image model would read it:
//   - background color: length-weighted average of every word's color, so it
//     drifts gradually as individual words are mangled and ignores word order,
//   - spatial phrases "<word> upper|lower left|right" paint the named image
//     quadrant with the word's color (canonical vocabulary color, graded by
//     edit-distance affinity toward a hash color as the word is mangled);
//     direction words match within one edit, with paint opacity falling
//     toward the background as the match degrades,
//   - one horizontal band per word across the middle sixth of the image,
//     band height proportional to word length, same color rule,
//   - every color is scaled by the brightness factor of the first word within
//     one edit of a brightness word (graded toward 0.7 by the distance) and
//     dimmed toward 0.8 as the recognized fraction of the prompt falls,
//   - a small per-row dither derived from the generation seed,
//   - empty prompt: constant mid-gray, independent of the seed.
class MockGenerator : public Generator {
public:
    ImageBuffer generate(const GenerationRequest& req) override;
    std::string name() const override { return "mock"; }
};

// Feature embedding: per-channel 8-bin histograms (24 values, each channel
// normalized to unit mass) concatenated with an 8x8 bilinear gray thumbnail
// scaled to [0,1] (64 values); the whole vector is L2-normalized. Length 88.
class MockEmbedder : public Embedder {
public:
    static constexpr std::size_t kDimensions = 88;

    Embedding embed(const ImageBuffer& img) override;
    std::string name() const override { return "mock"; }
};

}  // namespace aquasem
