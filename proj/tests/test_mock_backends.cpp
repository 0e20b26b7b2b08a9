#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aquasem/channel.hpp"
#include "aquasem/metrics.hpp"
#include "aquasem/mock_backends.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aquasem;

namespace {

ImageBuffer solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    ImageBuffer img = ImageBuffer::make(w, h, 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(x, y, 0) = r;
            img.at(x, y, 1) = g;
            img.at(x, y, 2) = b;
        }
    }
    return img;
}

GenerationRequest request(std::string prompt, std::uint64_t seed, int size = 64) {
    GenerationRequest req;
    req.prompt = TextMessage{std::move(prompt)};
    req.seed = seed;
    req.width = size;
    req.height = size;
    return req;
}

}  // namespace

TEST_CASE("vocabulary colors round-trip through hue_word") {
    for (const char* name : {"red", "yellow", "green", "cyan", "blue", "magenta", "gray"}) {
        auto color = vocabulary_color(name);
        REQUIRE(color.has_value());
        CHECK(hue_word((*color)[0], (*color)[1], (*color)[2]) == std::string(name));
    }
    CHECK_FALSE(vocabulary_color("turquoise").has_value());
    CHECK_FALSE(vocabulary_color("").has_value());
}

TEST_CASE("brightness_word buckets") {
    CHECK(brightness_word(0.0) == std::string("dark"));
    CHECK(brightness_word(84.9) == std::string("dark"));
    CHECK(brightness_word(85.0) == std::string("dim"));
    CHECK(brightness_word(169.9) == std::string("dim"));
    CHECK(brightness_word(170.0) == std::string("bright"));
    CHECK(brightness_word(255.0) == std::string("bright"));
}

TEST_CASE("brightness_factor follows the declared buckets") {
    CHECK(brightness_factor("dark") == 0.5);
    CHECK(brightness_factor("dim") == 1.0);
    CHECK(brightness_factor("bright") == 1.25);
    CHECK(brightness_factor("fish") == 0.7);
    CHECK(brightness_factor("") == 0.7);
}

TEST_CASE("recognized_fraction is one for intact vocabulary words") {
    CHECK(recognized_fraction({"a", "dim", "scene", "with", "blue", "upper", "left"}) == 1.0);
    CHECK(recognized_fraction({}) == 1.0);
}

TEST_CASE("recognized_fraction degrades with character damage") {
    double clean = recognized_fraction({"scene", "blue"});
    double light = recognized_fraction({"sxene", "blue"});
    double heavy = recognized_fraction({"sxqne", "bzue"});
    CHECK(clean == 1.0);
    CHECK(light < clean);
    CHECK(heavy < light);
    CHECK(heavy >= 0.0);
}

TEST_CASE("captioner describes a solid blue image as blue everywhere") {
    MockCaptioner captioner;
    TextMessage caption = captioner.caption(solid(64, 64, 0, 0, 255));
    CHECK(caption.content.find("blue") != std::string::npos);
    CHECK(caption.content.find("dark") != std::string::npos);
}

TEST_CASE("captioner output follows the fixed template") {
    MockCaptioner captioner;
    ImageBuffer img = oracle::random_image(64, 48, 3, 321);
    std::string caption = captioner.caption(img).content;
    auto words = split_words(caption);
    REQUIRE(words.size() == 19);
    CHECK(words[0] == "a");
    CHECK(words[2] == "scene");
    CHECK(words[3] == "with");
    CHECK(words[5] == "upper");
    CHECK(words[6] == "left");
    CHECK(words[7] == "and");
    CHECK(words[9] == "upper");
    CHECK(words[10] == "right");
    CHECK(words[13] == "lower");
    CHECK(words[14] == "left");
    CHECK(words[17] == "lower");
    CHECK(words[18] == "right");
    // Brightness and hue slots come from the shared vocabulary.
    CHECK((words[1] == "dark" || words[1] == "dim" || words[1] == "bright"));
    for (std::size_t i : {4, 8, 12, 16}) {
        CHECK(vocabulary_color(words[i]).has_value());
    }
}

TEST_CASE("captioner is deterministic") {
    MockCaptioner captioner;
    ImageBuffer img = oracle::random_image(40, 40, 3, 777);
    CHECK(captioner.caption(img) == captioner.caption(img));
}

TEST_CASE("captioner names quadrant hues independently") {
    // Distinct solid quadrants: red, green, blue, yellow.
    ImageBuffer img = ImageBuffer::make(64, 64, 3);
    auto paint = [&](int x0, int y0, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        for (int y = y0; y < y0 + 32; ++y) {
            for (int x = x0; x < x0 + 32; ++x) {
                img.at(x, y, 0) = r;
                img.at(x, y, 1) = g;
                img.at(x, y, 2) = b;
            }
        }
    };
    paint(0, 0, 255, 0, 0);
    paint(32, 0, 0, 255, 0);
    paint(0, 32, 0, 0, 255);
    paint(32, 32, 255, 255, 0);
    MockCaptioner captioner;
    auto words = split_words(captioner.caption(img).content);
    REQUIRE(words.size() == 19);
    CHECK(words[4] == "red");      // upper left
    CHECK(words[8] == "green");    // upper right
    CHECK(words[12] == "blue");    // lower left
    CHECK(words[16] == "yellow");  // lower right
}

TEST_CASE("generator returns the requested shape") {
    MockGenerator gen;
    ImageBuffer img = gen.generate(request("a dim scene", 5, 48));
    CHECK(img.width == 48);
    CHECK(img.height == 48);
    CHECK(img.channels == 3);
}

TEST_CASE("generator rejects tiny canvases") {
    MockGenerator gen;
    GenerationRequest req = request("a dim scene", 1);
    req.width = 8;
    req.height = 8;
    CHECK_THROWS_AS(gen.generate(req), std::invalid_argument);
}

TEST_CASE("generator is deterministic per prompt and seed") {
    MockGenerator gen;
    CHECK(gen.generate(request("a dim scene with blue upper left", 9)) ==
          gen.generate(request("a dim scene with blue upper left", 9)));
    // Seed only moves the dither; prompt changes move actual content.
    CHECK(gen.generate(request("a dim scene", 1)) != gen.generate(request("a dim scene", 2)));
}

TEST_CASE("empty prompt renders constant mid-gray for any seed") {
    MockGenerator gen;
    for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
        ImageBuffer img = gen.generate(request("", seed));
        for (auto s : img.samples) CHECK(s == 128);
    }
}

TEST_CASE("distinct prompts differ inside the band region") {
    // Single-word prompts share brightness handling, so only the band color
    // and background can differ; the band region must actually change.
    MockGenerator gen;
    ImageBuffer a = gen.generate(request("a b", 3));
    ImageBuffer b = gen.generate(request("a c", 3));
    REQUIRE(a.same_shape(b));
    bool band_differs = false;
    int band_top = a.height * 5 / 12;
    int band_bottom = band_top + a.height / 6;
    for (int y = band_top; y < band_bottom && !band_differs; ++y) {
        for (int x = 0; x < a.width; ++x) {
            if (a.at(x, y, 0) != b.at(x, y, 0) || a.at(x, y, 1) != b.at(x, y, 1) ||
                a.at(x, y, 2) != b.at(x, y, 2)) {
                band_differs = true;
                break;
            }
        }
    }
    CHECK(band_differs);
}

TEST_CASE("spatial phrases paint their quadrant with the named color") {
    MockGenerator gen;
    ImageBuffer img =
        gen.generate(request("a dim scene with red upper left and blue lower right", 0));
    // Sample away from bands (middle sixth) and from quadrant borders. With
    // factor dim=1.0 and a fully recognized prompt the painted color is the
    // canonical vocabulary color up to the +/-7 dither.
    auto near = [](std::uint8_t got, int want) { return std::abs(got - want) <= 7; };
    int qx = img.width / 4;
    int qy = img.height / 8;
    CHECK(near(img.at(qx, qy, 0), 200));  // red quadrant
    CHECK(near(img.at(qx, qy, 1), 40));
    CHECK(near(img.at(qx, qy, 2), 40));
    int lx = 3 * img.width / 4;
    int ly = 7 * img.height / 8;
    CHECK(near(img.at(lx, ly, 0), 40));  // blue quadrant
    CHECK(near(img.at(lx, ly, 1), 40));
    CHECK(near(img.at(lx, ly, 2), 200));
}

TEST_CASE("dark captions render darker than bright ones") {
    MockCaptioner cap;
    MockGenerator gen;
    std::string dark_prompt = "a dark scene with gray upper left and gray upper right and "
                              "gray lower left and gray lower right";
    std::string bright_prompt = "a bright scene with gray upper left and gray upper right and "
                                "gray lower left and gray lower right";
    ImageBuffer dark = gen.generate(request(dark_prompt, 4));
    ImageBuffer bright = gen.generate(request(bright_prompt, 4));
    double dark_mean = 0.0, bright_mean = 0.0;
    for (auto s : dark.samples) dark_mean += s;
    for (auto s : bright.samples) bright_mean += s;
    CHECK(dark_mean < bright_mean);
}

TEST_CASE("caption then generate round-trips the dominant palette") {
    // A generated image from a clean caption of a solid-color image should
    // caption back to the same hue words.
    MockCaptioner cap;
    MockGenerator gen;
    ImageBuffer original = solid(64, 64, 40, 40, 200);  // canonical blue
    TextMessage caption = cap.caption(original);
    GenerationRequest req;
    req.prompt = caption;
    req.seed = 0;
    req.width = 64;
    req.height = 64;
    ImageBuffer regen = gen.generate(req);
    std::string recaption = cap.caption(regen).content;
    CHECK(recaption.find("blue") != std::string::npos);
}

TEST_CASE("embedder emits unit-norm vectors of fixed length") {
    MockEmbedder emb;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Embedding e = emb.embed(oracle::random_image(32, 24, 3, seed));
        REQUIRE(e.values.size() == MockEmbedder::kDimensions);
        CHECK(e.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Gray input works too.
    Embedding g = emb.embed(oracle::random_image(16, 16, 1, 9));
    CHECK(g.values.size() == MockEmbedder::kDimensions);
}

TEST_CASE("embedder is deterministic and separates identical from disjoint") {
    MockEmbedder emb;
    ImageBuffer img = oracle::random_image(32, 32, 3, 11);
    Embedding a = emb.embed(img);
    Embedding b = emb.embed(img);
    CHECK(a.values == b.values);
    CHECK(cosine(a, b) == doctest::Approx(1.0).epsilon(1e-12));

    // Black and white: histogram mass sits in disjoint bins and the black
    // thumbnail is all zero, so every product term vanishes.
    Embedding black = emb.embed(ImageBuffer::make(32, 32, 3, 0));
    Embedding white = emb.embed(ImageBuffer::make(32, 32, 3, 255));
    CHECK(cosine(black, white) == 0.0);
}

TEST_CASE("embedder histogram block carries unit mass per channel") {
    MockEmbedder emb;
    Embedding e = emb.embed(oracle::random_image(17, 13, 3, 21));
    // Undo the final L2 normalization by ratio: each channel's 8 bins share
    // one total, so the three bin-sums must be equal.
    double sums[3] = {0.0, 0.0, 0.0};
    for (int c = 0; c < 3; ++c) {
        for (int bin = 0; bin < 8; ++bin) {
            sums[c] += e.values[c * 8 + bin];
        }
    }
    CHECK(sums[0] == doctest::Approx(sums[1]).epsilon(1e-9));
    CHECK(sums[1] == doctest::Approx(sums[2]).epsilon(1e-9));
}

TEST_CASE("make_mock_providers wires the three offline backends") {
    ProviderSet providers = make_mock_providers();
    REQUIRE(providers.captioner);
    REQUIRE(providers.generator);
    REQUIRE(providers.embedder);
    CHECK(providers.captioner->name() == "mock");
    CHECK(providers.generator->name() == "mock");
    CHECK(providers.embedder->name() == "mock");
    ImageBuffer img = solid(32, 32, 200, 40, 40);
    CHECK(providers.captioner->caption(img).content.find("red") != std::string::npos);
}
