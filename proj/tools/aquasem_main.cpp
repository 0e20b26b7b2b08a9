#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "aquasem/channel.hpp"
#include "aquasem/experiment.hpp"
#include "aquasem/linkmath.hpp"
#include "aquasem/pipeline.hpp"
#include "aquasem/report.hpp"
#include "aquasem/serialize.hpp"
#include "aquasem/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitTrialFailures = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBackendUnreachable = 3;

struct CliState {
    bool pretty = false;
};

void emit(const json& j, bool pretty) {
    std::cout << (pretty ? j.dump(2) : j.dump()) << "\n";
}

void emit_error(const std::string& category, const std::string& message) {
    std::cerr << json{{"category", category}, {"error", message}}.dump() << "\n";
}

std::optional<std::string> env_value(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

// Provider selection shared by metrics/trial: an explicit "mock" or URL flag
// wins, then the environment, then offline mocks.
aquasem::ProviderSet resolve_providers(const std::string& flag_value,
                                       const std::optional<std::string>& flag_token) {
    std::string target = flag_value;
    if (target.empty()) {
        target = env_value("AQUASEM_BACKEND_URL").value_or("mock");
    }
    if (target == "mock") return aquasem::make_mock_providers();

    aquasem::BackendEndpoint ep;
    ep.base_url = target;
    ep.auth_token = flag_token ? flag_token : env_value("AQUASEM_TOKEN");
    return aquasem::make_http_providers(ep);
}

bool is_transport_status(const std::string& status) {
    return status.size() >= 10 &&
           status.compare(status.size() - 10, 10, ":transport") == 0;
}

// Missing inputs are invocation mistakes, reported as usage errors.
void require_file(const std::string& path, const char* what) {
    if (!std::filesystem::is_regular_file(path)) {
        throw std::invalid_argument(std::string(what) + " not found: " + path);
    }
}

int run_corrupt(int type, double ratio, std::uint64_t seed, std::optional<std::string> text,
                bool use_stdin, bool pretty) {
    std::string raw;
    if (use_stdin) {
        raw.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else if (text) {
        raw = *text;
    } else {
        emit_error("usage", "corrupt needs --text or --stdin");
        return kExitUsage;
    }

    aquasem::TextMessage msg{aquasem::sanitize(raw)};
    aquasem::ErrorSpec spec;
    spec.error_type = aquasem::error_type_from_int(type);
    spec.ratio = ratio;
    spec.seed = seed;
    auto outcome = aquasem::corrupt(msg, spec);

    emit(json{{"input", msg.content},
              {"corrupted", outcome.corrupted.content},
              {"error_type", type},
              {"requested_ratio", ratio},
              {"realized_ratio", outcome.realized_ratio()},
              {"affected_units", outcome.affected_units},
              {"total_units", outcome.total_units},
              {"seed", seed}},
         pretty);
    return kExitOk;
}

int run_ber(double cer, int bits, bool pretty) {
    auto bounds = aquasem::ber_bounds(cer, bits);
    emit(json{{"lower", bounds.lower}, {"upper", bounds.upper}}, pretty);
    return kExitOk;
}

int run_metrics(const std::string& path_a, const std::string& path_b,
                const std::string& embedder_flag, bool pretty) {
    require_file(path_a, "image A");
    require_file(path_b, "image B");
    auto providers = resolve_providers(embedder_flag, std::nullopt);
    auto a = aquasem::load_image(path_a);
    auto b = aquasem::load_image(path_b);
    auto report = aquasem::score_against(a, b, *providers.embedder);
    emit(aquasem::metric_report_to_json(report), pretty);
    return kExitOk;
}

int run_single_trial(const std::string& image_path, const std::string& control_path, int type,
                     double ratio, std::uint64_t seed, std::uint64_t gen_seed,
                     const std::string& backends_flag, int gen_width, int gen_height,
                     bool pretty) {
    require_file(image_path, "image");
    if (control_path != "builtin") require_file(control_path, "control image");
    auto providers = resolve_providers(backends_flag, std::nullopt);
    auto original = aquasem::load_image(image_path);
    auto control = control_path == "builtin" ? aquasem::builtin_control_image()
                                             : aquasem::load_image(control_path);

    aquasem::ErrorSpec spec;
    spec.error_type = aquasem::error_type_from_int(type);
    spec.ratio = ratio;
    spec.seed = seed;
    aquasem::TrialOptions opts;
    opts.gen_width = gen_width;
    opts.gen_height = gen_height;

    std::string image_id = std::filesystem::path(image_path).stem().string();
    auto record = aquasem::run_trial(image_id, original, control, spec, gen_seed, providers,
                                     opts);
    emit(aquasem::trial_to_json(record), pretty);
    if (record.ok()) return kExitOk;
    return is_transport_status(record.status) ? kExitBackendUnreachable : kExitTrialFailures;
}

int run_sweep_cmd(const std::string& config_path, bool mock, const std::string& backends_flag,
                  std::optional<std::string> token, std::optional<std::string> out_dir,
                  std::optional<std::uint64_t> seed_base, int jobs, bool pretty) {
    std::ifstream in(config_path);
    if (!in) {
        emit_error("usage", "cannot open config file: " + config_path);
        return kExitUsage;
    }
    json j = json::parse(in, nullptr, true, false);
    std::string base_dir = std::filesystem::path(config_path).parent_path().string();
    auto cfg = aquasem::sweep_config_from_json(j, base_dir);

    // Precedence: flags over config file over environment over defaults.
    if (out_dir) cfg.output_dir = *out_dir;
    if (seed_base) cfg.channel_seed_base = *seed_base;
    if (mock) {
        cfg.backends.reset();
    } else if (!backends_flag.empty()) {
        if (backends_flag == "mock") {
            cfg.backends.reset();
        } else {
            aquasem::BackendEndpoint ep;
            if (cfg.backends) ep = *cfg.backends;
            ep.base_url = backends_flag;
            cfg.backends = ep;
        }
    } else if (!cfg.backends) {
        if (auto url = env_value("AQUASEM_BACKEND_URL")) {
            aquasem::BackendEndpoint ep;
            ep.base_url = *url;
            cfg.backends = ep;
        }
    }
    if (cfg.backends) {
        if (token) {
            cfg.backends->auth_token = token;
        } else if (!cfg.backends->auth_token) {
            cfg.backends->auth_token = env_value("AQUASEM_TOKEN");
        }
    }

    auto providers = cfg.backends ? aquasem::make_http_providers(*cfg.backends)
                                  : aquasem::make_mock_providers();
    auto result = aquasem::run_sweep(cfg, providers, jobs);

    emit(json{{"records", result.records.size()},
              {"failed_trials", result.failed_trials},
              {"transport_failed_trials", result.transport_failed_trials},
              {"output_dir", cfg.output_dir},
              {"records_csv", (std::filesystem::path(cfg.output_dir) / "records.csv").string()},
              {"aggregates_csv",
               (std::filesystem::path(cfg.output_dir) / "aggregates.csv").string()},
              {"manifest", (std::filesystem::path(cfg.output_dir) / "manifest.json").string()}},
         pretty);
    if (result.transport_failed_trials > 0) return kExitBackendUnreachable;
    if (result.failed_trials > 0) return kExitTrialFailures;
    return kExitOk;
}

int run_report(const std::string& aggregates_path, const std::string& out_dir, bool pretty) {
    auto aggregates = aquasem::read_aggregates_csv(aggregates_path);
    auto manifest = aquasem::render_all(aggregates, out_dir);
    emit(json{{"written", manifest.written}, {"warnings", manifest.warnings},
              {"out_dir", out_dir}},
         pretty);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic semantic-communication resilience toolkit"};
    app.set_version_flag("--version", aquasem::kVersion);
    app.require_subcommand(1);
    bool pretty = false;
    app.add_flag("--pretty", pretty, "Indent JSON output");

    // corrupt
    auto* corrupt_cmd = app.add_subcommand("corrupt", "Apply channel errors to text");
    int c_type = 1;
    double c_ratio = 0.0;
    std::uint64_t c_seed = 0;
    std::optional<std::string> c_text;
    bool c_stdin = false;
    corrupt_cmd->add_option("--type", c_type, "Error type: 1 substitute, 2 delete chars, 3 delete words")
        ->required()->check(CLI::Range(1, 3));
    corrupt_cmd->add_option("--ratio", c_ratio, "Error ratio in [0,1]")->required();
    corrupt_cmd->add_option("--seed", c_seed, "Channel seed");
    corrupt_cmd->add_option("--text", c_text, "Text to corrupt");
    corrupt_cmd->add_flag("--stdin", c_stdin, "Read the text from standard input");

    // ber
    auto* ber_cmd = app.add_subcommand("ber", "Bit error ratio bounds for a character error ratio");
    double b_cer = 0.0;
    int b_bits = 8;
    ber_cmd->add_option("--cer", b_cer, "Character error ratio in [0,1]")->required();
    ber_cmd->add_option("--bits", b_bits, "Bits per character");

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "Score image B against image A");
    std::string m_a, m_b;
    std::string m_embedder;
    metrics_cmd->add_option("--a", m_a, "Reference image (PPM/PGM/PNG)")->required();
    metrics_cmd->add_option("--b", m_b, "Image to score; resized to A first")->required();
    metrics_cmd->add_option("--embedder", m_embedder,
                            "\"mock\" or an embedding server URL (default: AQUASEM_BACKEND_URL or mock)");

    // trial
    auto* trial_cmd = app.add_subcommand("trial", "One caption-corrupt-generate-score trial");
    std::string t_image, t_control = "builtin";
    int t_type = 1;
    double t_ratio = 0.0;
    std::uint64_t t_seed = 0, t_gen_seed = 0;
    std::string t_backends;
    int t_gen_width = 512, t_gen_height = 512;
    trial_cmd->add_option("--image", t_image, "Original image")->required();
    trial_cmd->add_option("--control", t_control, "Control image path or \"builtin\"");
    trial_cmd->add_option("--type", t_type, "Error type")->required()->check(CLI::Range(1, 3));
    trial_cmd->add_option("--ratio", t_ratio, "Error ratio in [0,1]")->required();
    trial_cmd->add_option("--seed", t_seed, "Channel seed");
    trial_cmd->add_option("--gen-seed", t_gen_seed, "Generation seed");
    trial_cmd->add_option("--backends", t_backends,
                          "\"mock\" or a model server URL (default: AQUASEM_BACKEND_URL or mock)");
    trial_cmd->add_option("--gen-width", t_gen_width, "Generated image width");
    trial_cmd->add_option("--gen-height", t_gen_height, "Generated image height");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the full error-type x ratio grid");
    std::string s_config;
    bool s_mock = false;
    std::string s_backends;
    std::optional<std::string> s_token;
    std::optional<std::string> s_out;
    std::optional<std::uint64_t> s_seed_base;
    int s_jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    sweep_cmd->add_option("--config", s_config, "JSON sweep configuration file")->required();
    sweep_cmd->add_flag("--mock", s_mock, "Force offline mock providers (no network I/O)");
    sweep_cmd->add_option("--backends", s_backends, "\"mock\" or a model server URL");
    sweep_cmd->add_option("--token", s_token, "Bearer token for the model server");
    sweep_cmd->add_option("--out", s_out, "Override the configured output directory");
    sweep_cmd->add_option("--seed-base", s_seed_base, "Override the configured channel seed base");
    sweep_cmd->add_option("--jobs", s_jobs, "Worker threads (default: logical CPUs)")
        ->check(CLI::PositiveNumber);

    // report
    auto* report_cmd = app.add_subcommand("report", "Render SVG charts from aggregates.csv");
    std::string r_aggregates, r_out;
    report_cmd->add_option("--aggregates", r_aggregates, "aggregates.csv path")->required();
    report_cmd->add_option("--out", r_out, "Output directory for the SVG files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help / --version
        }
        emit_error("usage", e.what());
        return kExitUsage;
    }

    try {
        if (*corrupt_cmd) return run_corrupt(c_type, c_ratio, c_seed, c_text, c_stdin, pretty);
        if (*ber_cmd) return run_ber(b_cer, b_bits, pretty);
        if (*metrics_cmd) return run_metrics(m_a, m_b, m_embedder, pretty);
        if (*trial_cmd) {
            return run_single_trial(t_image, t_control, t_type, t_ratio, t_seed, t_gen_seed,
                                    t_backends, t_gen_width, t_gen_height, pretty);
        }
        if (*sweep_cmd) {
            return run_sweep_cmd(s_config, s_mock, s_backends, s_token, s_out, s_seed_base,
                                 s_jobs, pretty);
        }
        if (*report_cmd) return run_report(r_aggregates, r_out, pretty);
    } catch (const aquasem::TransportError& e) {
        emit_error("transport", e.what());
        return kExitBackendUnreachable;
    } catch (const aquasem::ProtocolError& e) {
        emit_error("protocol", e.what());
        return kExitTrialFailures;
    } catch (const std::invalid_argument& e) {
        emit_error("usage", e.what());
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        emit_error("usage", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return kExitTrialFailures;
    }
    return kExitUsage;
}
