#include "aquasem/pipeline.hpp"

#include <chrono>

namespace aquasem {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Failed trials carry the stage name; transport failures keep their own tag
// so sweep resumption can retry them selectively.
std::string failure_status(const std::string& stage, const std::exception& e) {
    if (dynamic_cast<const TransportError*>(&e) != nullptr) {
        return "failed:" + stage + ":transport";
    }
    return "failed:" + stage;
}

}  // namespace

MetricReport score_against(const ImageBuffer& target, const ImageBuffer& generated,
                           Embedder& embedder) {
    ImageBuffer resized = resize_bilinear(generated, target.width, target.height);
    if (resized.channels != target.channels) {
        resized = target.channels == 3 ? expand_to_rgb(resized) : to_gray(resized);
    }
    MetricReport report;
    report.psnr_db = psnr(target, resized);
    report.ssim = ssim(target, resized);
    report.clip_score_pct = clip_score(target, resized, embedder);
    return report;
}

TrialRecord run_trial_with_caption(const std::string& image_id, const TextMessage& caption,
                                   const ImageBuffer& original, const ImageBuffer& control,
                                   const ErrorSpec& spec, std::uint64_t gen_seed,
                                   const ProviderSet& providers, const TrialOptions& opts) {
    TrialRecord rec;
    rec.image_id = image_id;
    rec.error_type = spec.error_type;
    rec.requested_ratio = spec.ratio;
    rec.gen_seed = gen_seed;
    rec.caption_clean = caption.content;
    rec.gen_width = opts.gen_width;
    rec.gen_height = opts.gen_height;

    // Channel: pure, cannot fail for a sanitized caption and a valid spec.
    auto t0 = Clock::now();
    CorruptionOutcome outcome = corrupt(caption, spec);
    rec.caption_corrupted = outcome.corrupted.content;
    rec.realized_ratio = outcome.realized_ratio();
    rec.timings.channel_ms = ms_since(t0);

    ImageBuffer generated;
    t0 = Clock::now();
    try {
        GenerationRequest req;
        req.prompt = outcome.corrupted;
        req.seed = gen_seed;
        req.width = opts.gen_width;
        req.height = opts.gen_height;
        generated = providers.generator->generate(req);
    } catch (const std::exception& e) {
        rec.timings.generate_ms = ms_since(t0);
        rec.status = failure_status("generate", e);
        rec.error = e.what();
        return rec;
    }
    rec.timings.generate_ms = ms_since(t0);

    t0 = Clock::now();
    try {
        rec.metrics_vs_original = score_against(original, generated, *providers.embedder);
        rec.metrics_vs_control = score_against(control, generated, *providers.embedder);
    } catch (const std::exception& e) {
        rec.timings.metrics_ms = ms_since(t0);
        rec.status = failure_status("metrics", e);
        rec.error = e.what();
        return rec;
    }
    rec.timings.metrics_ms = ms_since(t0);
    return rec;
}

TrialRecord run_trial(const std::string& image_id, const ImageBuffer& original,
                      const ImageBuffer& control, const ErrorSpec& spec, std::uint64_t gen_seed,
                      const ProviderSet& providers, const TrialOptions& opts) {
    auto t0 = Clock::now();
    TextMessage caption;
    try {
        caption = providers.captioner->caption(original);
    } catch (const std::exception& e) {
        TrialRecord rec;
        rec.image_id = image_id;
        rec.error_type = spec.error_type;
        rec.requested_ratio = spec.ratio;
        rec.gen_seed = gen_seed;
        rec.gen_width = opts.gen_width;
        rec.gen_height = opts.gen_height;
        rec.timings.caption_ms = ms_since(t0);
        rec.status = failure_status("caption", e);
        rec.error = e.what();
        return rec;
    }
    double caption_ms = ms_since(t0);

    TrialRecord rec = run_trial_with_caption(image_id, caption, original, control, spec,
                                             gen_seed, providers, opts);
    rec.timings.caption_ms = caption_ms;
    return rec;
}

TextMessage CaptionCache::get(const std::string& image_id, const ImageBuffer& image,
                              Captioner& captioner) {
    std::shared_ptr<Slot> slot;
    {
        std::lock_guard lock(mutex_);
        auto& entry = cache_[image_id];
        if (!entry) entry = std::make_shared<Slot>();
        slot = entry;
    }

    std::unique_lock lock(slot->mutex);
    for (;;) {
        if (slot->ready) return slot->value;
        if (!slot->in_flight) break;
        slot->cv.wait(lock);
    }
    slot->in_flight = true;
    lock.unlock();

    try {
        TextMessage computed = captioner.caption(image);
        lock.lock();
        slot->value = std::move(computed);
        slot->ready = true;
        slot->in_flight = false;
        slot->cv.notify_all();
        return slot->value;
    } catch (...) {
        lock.lock();
        slot->in_flight = false;
        slot->cv.notify_all();
        throw;
    }
}

ImageBuffer builtin_control_image() {
    // Horizontal, vertical, and diagonal gradients with a checkerboard overlay
    // that flips the top bit of every channel. The flip keeps each channel's
    // histogram exactly uniform while leaving an obvious block texture, so the
    // control anchors a similarity floor that does not favor any color range.
    constexpr int kSize = 256;
    constexpr int kCell = 16;
    ImageBuffer img = ImageBuffer::make(kSize, kSize, 3);
    for (int y = 0; y < kSize; ++y) {
        for (int x = 0; x < kSize; ++x) {
            const int flip = ((x / kCell) + (y / kCell)) % 2 ? 0x80 : 0x00;
            img.at(x, y, 0) = static_cast<std::uint8_t>(x ^ flip);
            img.at(x, y, 1) = static_cast<std::uint8_t>(y ^ flip);
            img.at(x, y, 2) = static_cast<std::uint8_t>(((x + y) & 0xFF) ^ flip);
        }
    }
    return img;
}

}  // namespace aquasem
