#pragma once

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "aquasem/backends.hpp"
#include "aquasem/channel.hpp"
#include "aquasem/metrics.hpp"

namespace aquasem {

struct StageTimings {
    double caption_ms = 0.0;
    double channel_ms = 0.0;
    double generate_ms = 0.0;
    double metrics_ms = 0.0;
};

// Full provenance of one caption -> channel -> generate -> score execution.
struct TrialRecord {
    std::string image_id;
    ErrorType error_type = ErrorType::CharSubstitution;
    double requested_ratio = 0.0;
    double realized_ratio = 0.0;
    std::uint64_t gen_seed = 0;
    std::string caption_clean;
    std::string caption_corrupted;
    MetricReport metrics_vs_original;
    MetricReport metrics_vs_control;
    StageTimings timings;
    int gen_width = 0;   // resolution the generator was asked for
    int gen_height = 0;
    std::string status = "ok";  // "ok" or "failed:<stage>[:transport]"
    std::string error;          // diagnostic for failed trials, not persisted

    bool ok() const { return status == "ok"; }
};

struct TrialOptions {
    int gen_width = 512;
    int gen_height = 512;
};

// One pipeline execution. The caption is corrupted, the corrupted text is
// handed to the generator, and the generated image is scored against both
// the original and the control image. Pixel metrics are computed after
// resizing the generated image to the respective comparison target (matching
// its channel count as well); the embedding metric uses the same resized
// images. Stage failures yield a failed record naming the stage; the channel
// stage itself cannot fail.
TrialRecord run_trial(const std::string& image_id, const ImageBuffer& original,
                      const ImageBuffer& control, const ErrorSpec& spec, std::uint64_t gen_seed,
                      const ProviderSet& providers, const TrialOptions& opts = {});

// Same, with the clean caption supplied by the caller. Used by sweeps so the
// captioner runs at most once per image.
TrialRecord run_trial_with_caption(const std::string& image_id, const TextMessage& caption,
                                   const ImageBuffer& original, const ImageBuffer& control,
                                   const ErrorSpec& spec, std::uint64_t gen_seed,
                                   const ProviderSet& providers, const TrialOptions& opts = {});

// Compute-once caption store keyed by image id; safe for concurrent trials.
// Concurrent callers for the same id block until the first finishes, so the
// captioner runs exactly once per id (a failed attempt releases the slot and
// the next caller retries).
class CaptionCache {
public:
    TextMessage get(const std::string& image_id, const ImageBuffer& image, Captioner& captioner);

private:
    struct Slot {
        std::mutex mutex;
        std::condition_variable cv;
        bool ready = false;
        bool in_flight = false;
        TextMessage value;
    };

    std::mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<Slot>> cache_;
};

// Fixed semantically unrelated reference image: gradients with a checkerboard
// overlay, 256x256 RGB, integer arithmetic only. Every channel's histogram is
// exactly uniform, so similarity against it tracks how much signal a generated
// image carries rather than which colors it happens to use.
ImageBuffer builtin_control_image();

// Resizes `generated` to the target's shape and scores the pair.
MetricReport score_against(const ImageBuffer& target, const ImageBuffer& generated,
                           Embedder& embedder);

}  // namespace aquasem
