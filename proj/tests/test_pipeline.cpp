#include <array>
#include <atomic>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "aquasem/mock_backends.hpp"
#include "aquasem/pipeline.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aquasem;

namespace {

// Captioner that counts calls and optionally fails a fixed number of times.
class CountingCaptioner : public Captioner {
public:
    explicit CountingCaptioner(int failures_before_success = 0)
        : failures_left_(failures_before_success) {}

    TextMessage caption(const ImageBuffer& img) override {
        calls_.fetch_add(1);
        if (failures_left_.fetch_sub(1) > 0) {
            throw TransportError("test", "induced failure");
        }
        failures_left_.store(0);
        return inner_.caption(img);
    }
    std::string name() const override { return "counting"; }

    int calls() const { return calls_.load(); }

private:
    MockCaptioner inner_;
    std::atomic<int> calls_{0};
    std::atomic<int> failures_left_;
};

class ThrowingGenerator : public Generator {
public:
    explicit ThrowingGenerator(bool transport) : transport_(transport) {}
    ImageBuffer generate(const GenerationRequest&) override {
        if (transport_) throw TransportError("test", "socket closed");
        throw ProtocolError("test", "bad payload");
    }
    std::string name() const override { return "throwing"; }

private:
    bool transport_;
};

TrialOptions small_gen() {
    TrialOptions opts;
    opts.gen_width = 64;
    opts.gen_height = 64;
    return opts;
}

}  // namespace

TEST_CASE("the control image is a fixed 256x256 color reference") {
    ImageBuffer control = builtin_control_image();
    CHECK(control.width == 256);
    CHECK(control.height == 256);
    CHECK(control.channels == 3);
    CHECK(builtin_control_image() == control);
}

TEST_CASE("the control image has exactly uniform per-channel histograms") {
    // The checkerboard flip permutes values within each row/column pattern,
    // so every channel hits each of the 256 values exactly 256 times. This
    // keeps histogram-based similarity against the control flat across
    // differently colored generated images.
    ImageBuffer control = builtin_control_image();
    for (int c = 0; c < 3; ++c) {
        std::array<int, 256> counts{};
        for (int y = 0; y < control.height; ++y) {
            for (int x = 0; x < control.width; ++x) {
                ++counts[control.at(x, y, c)];
            }
        }
        for (int v = 0; v < 256; ++v) {
            CHECK(counts[v] == 256);
        }
    }
}

TEST_CASE("a ratio-zero trial regenerates from the clean caption") {
    auto providers = make_mock_providers();
    ImageBuffer original = oracle::random_image(64, 64, 3, 2121);
    ImageBuffer control = builtin_control_image();
    ErrorSpec spec{ErrorType::CharSubstitution, 0.0, 42};
    TrialRecord rec = run_trial("img", original, control, spec, 3, providers, small_gen());
    REQUIRE(rec.ok());
    CHECK(rec.caption_clean == rec.caption_corrupted);
    CHECK(rec.realized_ratio == 0.0);
    CHECK(rec.requested_ratio == 0.0);
    CHECK(rec.gen_width == 64);
    CHECK(rec.gen_height == 64);
    CHECK(rec.metrics_vs_original.clip_score_pct > 0.0);
    CHECK(rec.metrics_vs_original.ssim >= -1.0);
    CHECK(rec.metrics_vs_original.ssim <= 1.0);
}

TEST_CASE("trials are deterministic end to end") {
    auto providers = make_mock_providers();
    ImageBuffer original = oracle::random_image(48, 48, 3, 77);
    ImageBuffer control = builtin_control_image();
    ErrorSpec spec{ErrorType::CharDeletion, 0.4, 9};
    TrialRecord a = run_trial("x", original, control, spec, 5, providers, small_gen());
    TrialRecord b = run_trial("x", original, control, spec, 5, providers, small_gen());
    REQUIRE(a.ok());
    CHECK(a.caption_corrupted == b.caption_corrupted);
    CHECK(a.realized_ratio == b.realized_ratio);
    CHECK(a.metrics_vs_original.psnr_db == b.metrics_vs_original.psnr_db);
    CHECK(a.metrics_vs_original.ssim == b.metrics_vs_original.ssim);
    CHECK(a.metrics_vs_original.clip_score_pct == b.metrics_vs_original.clip_score_pct);
    CHECK(a.metrics_vs_control.clip_score_pct == b.metrics_vs_control.clip_score_pct);
}

TEST_CASE("full word deletion hands the generator an empty prompt") {
    auto providers = make_mock_providers();
    ImageBuffer original = oracle::random_image(64, 64, 3, 31);
    ImageBuffer control = builtin_control_image();
    ErrorSpec spec{ErrorType::WordDeletion, 1.0, 7};
    TrialRecord rec = run_trial("img", original, control, spec, 0, providers, small_gen());
    REQUIRE(rec.ok());
    CHECK(rec.caption_corrupted.empty());
    CHECK(rec.realized_ratio == 1.0);
    // The mock renders constant gray for an empty prompt; scoring still runs.
    CHECK(rec.metrics_vs_original.clip_score_pct >= 0.0);
}

TEST_CASE("caption failures produce a failed:caption record") {
    auto providers = make_mock_providers();
    auto failing = std::make_shared<CountingCaptioner>(1000000);
    providers.captioner = failing;
    ImageBuffer original = oracle::random_image(64, 64, 3, 8);
    ErrorSpec spec{ErrorType::CharSubstitution, 0.2, 1};
    TrialRecord rec = run_trial("img", original, builtin_control_image(), spec, 0, providers,
                                small_gen());
    CHECK_FALSE(rec.ok());
    CHECK(rec.status == "failed:caption:transport");
    CHECK(rec.error.find("induced failure") != std::string::npos);
    CHECK(rec.caption_clean.empty());
}

TEST_CASE("generator failures name the stage and transport flag") {
    auto providers = make_mock_providers();
    ImageBuffer original = oracle::random_image(64, 64, 3, 8);
    ErrorSpec spec{ErrorType::CharSubstitution, 0.2, 1};

    providers.generator = std::make_shared<ThrowingGenerator>(true);
    TrialRecord transport = run_trial("img", original, builtin_control_image(), spec, 0,
                                      providers, small_gen());
    CHECK(transport.status == "failed:generate:transport");

    providers.generator = std::make_shared<ThrowingGenerator>(false);
    TrialRecord protocol = run_trial("img", original, builtin_control_image(), spec, 0,
                                     providers, small_gen());
    CHECK(protocol.status == "failed:generate");
    // The corrupted caption is still recorded for diagnosis.
    CHECK_FALSE(protocol.caption_clean.empty());
}

TEST_CASE("run_trial_with_caption skips the captioner entirely") {
    auto providers = make_mock_providers();
    auto counting = std::make_shared<CountingCaptioner>();
    providers.captioner = counting;
    ImageBuffer original = oracle::random_image(64, 64, 3, 12);
    ErrorSpec spec{ErrorType::WordDeletion, 0.3, 2};
    TextMessage caption{"a dim scene with blue upper left and red upper right and gray "
                        "lower left and green lower right"};
    TrialRecord rec = run_trial_with_caption("img", caption, original, builtin_control_image(),
                                             spec, 1, providers, small_gen());
    REQUIRE(rec.ok());
    CHECK(counting->calls() == 0);
    CHECK(rec.caption_clean == caption.content);
}

TEST_CASE("score_against resizes and matches channel counts") {
    MockEmbedder embedder;
    ImageBuffer target = oracle::random_image(32, 32, 3, 5);
    ImageBuffer generated = oracle::random_image(64, 48, 3, 6);
    MetricReport direct = score_against(target, generated, embedder);
    MetricReport manual;
    ImageBuffer resized = resize_bilinear(generated, 32, 32);
    manual.psnr_db = psnr(target, resized);
    manual.ssim = ssim(target, resized);
    manual.clip_score_pct = clip_score(target, resized, embedder);
    CHECK(direct.psnr_db == manual.psnr_db);
    CHECK(direct.ssim == manual.ssim);
    CHECK(direct.clip_score_pct == manual.clip_score_pct);

    // Gray target against a color render: the render is collapsed to luma.
    ImageBuffer gray_target = oracle::random_image(32, 32, 1, 7);
    MetricReport gray_report = score_against(gray_target, generated, embedder);
    ImageBuffer gray_resized = to_gray(resize_bilinear(generated, 32, 32));
    CHECK(gray_report.psnr_db == psnr(gray_target, gray_resized));

    // Identity comparison keeps the sentinel.
    MetricReport self = score_against(target, target, embedder);
    CHECK(std::isinf(self.psnr_db));
    CHECK(self.ssim >= 1.0 - 1e-12);
    CHECK(self.clip_score_pct == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("caption cache runs the captioner once per image id") {
    CaptionCache cache;
    CountingCaptioner captioner;
    ImageBuffer img = oracle::random_image(32, 32, 3, 2);

    std::vector<std::thread> threads;
    std::vector<std::string> results(16);
    for (int t = 0; t < 16; ++t) {
        threads.emplace_back([&, t] {
            results[t] = cache.get("shared", img, captioner).content;
        });
    }
    for (auto& th : threads) th.join();
    CHECK(captioner.calls() == 1);
    for (const auto& r : results) CHECK(r == results[0]);

    // A second id triggers one more call; repeating the first does not.
    cache.get("other", img, captioner);
    cache.get("shared", img, captioner);
    CHECK(captioner.calls() == 2);
}

TEST_CASE("caption cache releases the slot after a failure") {
    CaptionCache cache;
    CountingCaptioner captioner(2);  // first two attempts fail
    ImageBuffer img = oracle::random_image(32, 32, 3, 3);
    CHECK_THROWS_AS(cache.get("id", img, captioner), TransportError);
    CHECK_THROWS_AS(cache.get("id", img, captioner), TransportError);
    TextMessage ok = cache.get("id", img, captioner);
    CHECK_FALSE(ok.content.empty());
    CHECK(captioner.calls() == 3);
    // Now cached: no further calls.
    cache.get("id", img, captioner);
    CHECK(captioner.calls() == 3);
}
