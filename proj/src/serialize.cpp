#include "aquasem/serialize.hpp"

#include <cmath>
#include <filesystem>

#include "aquasem/version.hpp"

namespace aquasem {

using nlohmann::json;

namespace {

json encode_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    if (path.empty() || path == "builtin" || base_dir.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json metric_report_to_json(const MetricReport& report) {
    return json{{"psnr_db", encode_double(report.psnr_db)},
                {"ssim", encode_double(report.ssim)},
                {"clip_score_pct", encode_double(report.clip_score_pct)}};
}

json trial_to_json(const TrialRecord& record) {
    json j{{"image_id", record.image_id},
           {"error_type", static_cast<int>(record.error_type)},
           {"requested_ratio", record.requested_ratio},
           {"realized_ratio", record.realized_ratio},
           {"gen_seed", record.gen_seed},
           {"caption_clean", record.caption_clean},
           {"caption_corrupted", record.caption_corrupted},
           {"metrics_vs_original", metric_report_to_json(record.metrics_vs_original)},
           {"metrics_vs_control", metric_report_to_json(record.metrics_vs_control)},
           {"gen_width", record.gen_width},
           {"gen_height", record.gen_height},
           {"status", record.status},
           {"timings_ms",
            json{{"caption", record.timings.caption_ms},
                 {"channel", record.timings.channel_ms},
                 {"generate", record.timings.generate_ms},
                 {"metrics", record.timings.metrics_ms}}}};
    if (!record.ok() && !record.error.empty()) {
        j["error"] = record.error;
    }
    return j;
}

SweepConfig sweep_config_from_json(const json& j, const std::string& base_dir) {
    if (!j.is_object()) {
        throw std::invalid_argument("sweep config must be a JSON object");
    }
    SweepConfig cfg;
    cfg.ratios.clear();
    read_field(j, "dataset_dir", cfg.dataset_dir);
    read_field(j, "control_image", cfg.control_image);
    read_field(j, "error_types", cfg.error_types);
    read_field(j, "ratios", cfg.ratios);
    read_field(j, "generations_per_caption", cfg.generations_per_caption);
    read_field(j, "channel_seed_base", cfg.channel_seed_base);
    read_field(j, "output_dir", cfg.output_dir);
    read_field(j, "gen_width", cfg.gen_width);
    read_field(j, "gen_height", cfg.gen_height);
    if (cfg.ratios.empty()) cfg.ratios = default_grid().ratios;

    if (j.contains("backends") && !j.at("backends").is_null()) {
        const auto& b = j.at("backends");
        if (b.is_string()) {
            if (b.get<std::string>() != "mock") {
                throw std::invalid_argument(
                    "backends must be \"mock\" or an endpoint object");
            }
        } else if (b.is_object()) {
            BackendEndpoint ep;
            read_field(b, "base_url", ep.base_url);
            read_field(b, "timeout_seconds", ep.timeout_seconds);
            read_field(b, "max_parallel", ep.max_parallel);
            read_field(b, "transport_retries", ep.transport_retries);
            if (b.contains("auth_token") && !b.at("auth_token").is_null()) {
                ep.auth_token = b.at("auth_token").get<std::string>();
            }
            cfg.backends = ep;
        } else {
            throw std::invalid_argument("backends must be \"mock\" or an endpoint object");
        }
    }

    cfg.dataset_dir = resolve_path(cfg.dataset_dir, base_dir);
    cfg.control_image = resolve_path(cfg.control_image, base_dir);
    cfg.output_dir = resolve_path(cfg.output_dir, base_dir);
    return cfg;
}

json sweep_config_to_json(const SweepConfig& cfg) {
    json j{{"dataset_dir", cfg.dataset_dir},
           {"control_image", cfg.control_image},
           {"error_types", cfg.error_types},
           {"ratios", cfg.ratios},
           {"generations_per_caption", cfg.generations_per_caption},
           {"channel_seed_base", cfg.channel_seed_base},
           {"output_dir", cfg.output_dir},
           {"gen_width", cfg.gen_width},
           {"gen_height", cfg.gen_height}};
    if (cfg.backends) {
        json b{{"base_url", cfg.backends->base_url},
               {"timeout_seconds", cfg.backends->timeout_seconds},
               {"max_parallel", cfg.backends->max_parallel},
               {"transport_retries", cfg.backends->transport_retries}};
        // The token itself never lands on disk.
        b["auth_token"] = cfg.backends->auth_token ? "<set>" : "<unset>";
        j["backends"] = b;
    } else {
        j["backends"] = "mock";
    }
    return j;
}

json sweep_manifest(const SweepConfig& cfg, const ProviderSet& providers) {
    return json{{"toolkit_version", kVersion},
                {"config", sweep_config_to_json(cfg)},
                {"providers",
                 json{{"captioner", providers.captioner ? providers.captioner->name() : ""},
                      {"generator", providers.generator ? providers.generator->name() : ""},
                      {"embedder", providers.embedder ? providers.embedder->name() : ""}}}};
}

}  // namespace aquasem
