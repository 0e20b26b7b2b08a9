#include "aquasem/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "aquasem/report.hpp"
#include "aquasem/rng.hpp"
#include "aquasem/serialize.hpp"

namespace fs = std::filesystem;

namespace aquasem {

void SweepConfig::validate() const {
    if (dataset_dir.empty()) throw std::invalid_argument("dataset_dir must be set");
    if (output_dir.empty()) throw std::invalid_argument("output_dir must be set");
    if (control_image.empty()) throw std::invalid_argument("control_image must be set");
    if (error_types.empty()) throw std::invalid_argument("error_types must not be empty");
    std::set<int> seen;
    for (int t : error_types) {
        if (t < 1 || t > 3) {
            throw std::invalid_argument("error_types entries must be 1, 2 or 3");
        }
        if (!seen.insert(t).second) {
            throw std::invalid_argument("error_types entries must be unique");
        }
    }
    if (ratios.empty()) throw std::invalid_argument("ratios must not be empty");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i] < 0.0 || ratios[i] > 1.0) {
            throw std::invalid_argument("ratios must lie in [0, 1]");
        }
        if (i > 0 && !(ratios[i] > ratios[i - 1])) {
            throw std::invalid_argument("ratios must be strictly ascending");
        }
    }
    if (generations_per_caption < 1) {
        throw std::invalid_argument("generations_per_caption must be at least 1");
    }
    if (gen_width < 16 || gen_height < 16) {
        throw std::invalid_argument("generation size must be at least 16x16");
    }
    if (backends) backends->validate();
}

SweepConfig default_grid() {
    SweepConfig cfg;
    cfg.error_types = {1, 2, 3};
    cfg.ratios.clear();
    for (int i = 0; i <= 10; ++i) {
        cfg.ratios.push_back(i / 20.0);  // 0.00, 0.05, ..., 0.50
    }
    cfg.generations_per_caption = 10;
    return cfg;
}

std::uint64_t mix_channel_seed(std::uint64_t base, int error_type, std::size_t ratio_index,
                               std::size_t image_index) {
    std::uint64_t h = base;
    h = mix64(h ^ (static_cast<std::uint64_t>(error_type) + 1));
    h = mix64(h ^ (static_cast<std::uint64_t>(ratio_index) + 1));
    h = mix64(h ^ (static_cast<std::uint64_t>(image_index) + 1));
    return h;
}

std::vector<std::pair<std::string, std::string>> list_dataset(const std::string& dataset_dir) {
    if (!fs::is_directory(dataset_dir)) {
        throw std::runtime_error("dataset directory not found: " + dataset_dir);
    }
    std::vector<std::pair<std::string, std::string>> found;  // (filename, path)
    for (const auto& entry : fs::directory_iterator(dataset_dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        bool known = ext == ".ppm" || ext == ".pgm" || ext == ".pnm" ||
                     (ext == ".png" && png_supported());
        if (known) {
            found.emplace_back(entry.path().filename().string(), entry.path().string());
        }
    }
    if (found.empty()) {
        throw std::runtime_error("no loadable images in dataset directory: " + dataset_dir);
    }
    std::sort(found.begin(), found.end());
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(found.size());
    for (auto& [name, path] : found) {
        out.emplace_back(fs::path(name).stem().string(), path);
    }
    return out;
}

namespace {

struct Cell {
    std::size_t type_index;
    std::size_t ratio_index;
    std::size_t image_index;
    fs::path file;
    bool persisted = false;                 // file existed or was written
    std::vector<TrialRecord> records;       // only for unpersisted cells
};

std::vector<TrialRecord> compute_cell(const SweepConfig& cfg, const Cell& cell,
                                      const std::vector<std::pair<std::string, std::string>>& dataset,
                                      const std::vector<ImageBuffer>& images,
                                      const ImageBuffer& control, const ProviderSet& providers,
                                      CaptionCache& captions) {
    const int error_type = cfg.error_types[cell.type_index];
    const double ratio = cfg.ratios[cell.ratio_index];
    const auto& [image_id, path] = dataset[cell.image_index];
    const ImageBuffer& original = images[cell.image_index];

    ErrorSpec spec;
    spec.error_type = error_type_from_int(error_type);
    spec.ratio = ratio;
    spec.seed = mix_channel_seed(cfg.channel_seed_base, error_type, cell.ratio_index,
                                 cell.image_index);
    TrialOptions opts;
    opts.gen_width = cfg.gen_width;
    opts.gen_height = cfg.gen_height;

    std::vector<TrialRecord> records;
    records.reserve(cfg.generations_per_caption);

    TextMessage caption;
    bool have_caption = false;
    std::string caption_status;
    std::string caption_error;
    try {
        caption = captions.get(image_id, original, *providers.captioner);
        have_caption = true;
    } catch (const std::exception& e) {
        caption_status = dynamic_cast<const TransportError*>(&e) != nullptr
                             ? "failed:caption:transport"
                             : "failed:caption";
        caption_error = e.what();
    }

    for (int g = 0; g < cfg.generations_per_caption; ++g) {
        if (!have_caption) {
            TrialRecord rec;
            rec.image_id = image_id;
            rec.error_type = spec.error_type;
            rec.requested_ratio = ratio;
            rec.gen_seed = static_cast<std::uint64_t>(g);
            rec.gen_width = cfg.gen_width;
            rec.gen_height = cfg.gen_height;
            rec.status = caption_status;
            rec.error = caption_error;
            records.push_back(std::move(rec));
            continue;
        }
        records.push_back(run_trial_with_caption(image_id, caption, original, control, spec,
                                                 static_cast<std::uint64_t>(g), providers,
                                                 opts));
    }
    return records;
}

bool has_transport_failure(const std::vector<TrialRecord>& records) {
    return std::any_of(records.begin(), records.end(), [](const TrialRecord& r) {
        return r.status.size() >= 10 &&
               r.status.compare(r.status.size() - 10, 10, ":transport") == 0;
    });
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("cannot aggregate an empty record list");
    }

    struct Samples {
        std::vector<double> values[6];  // 3 metrics x 2 series
        std::size_t excluded[6] = {};
    };
    static constexpr const char* kMetrics[3] = {"psnr_db", "ssim", "clip_score_pct"};
    static constexpr const char* kSeries[2] = {"vs_original", "vs_control"};

    std::map<std::pair<int, double>, Samples> cells;
    for (const auto& rec : records) {
        auto& bucket = cells[{static_cast<int>(rec.error_type), rec.requested_ratio}];
        if (!rec.ok()) continue;
        const MetricReport* reports[2] = {&rec.metrics_vs_original, &rec.metrics_vs_control};
        for (int s = 0; s < 2; ++s) {
            double values[3] = {reports[s]->psnr_db, reports[s]->ssim,
                                reports[s]->clip_score_pct};
            for (int m = 0; m < 3; ++m) {
                int slot = m * 2 + s;
                if (m == 0 && std::isinf(values[m])) {
                    // Identical images produce infinite PSNR; averaging it
                    // would poison the mean, so count it instead.
                    ++bucket.excluded[slot];
                    continue;
                }
                bucket.values[slot].push_back(values[m]);
            }
        }
    }

    std::vector<AggregateRow> rows;
    for (const auto& [key, samples] : cells) {
        for (int m = 0; m < 3; ++m) {
            for (int s = 0; s < 2; ++s) {
                int slot = m * 2 + s;
                const auto& vals = samples.values[slot];
                AggregateRow row;
                row.error_type = key.first;
                row.ratio = key.second;
                row.metric = kMetrics[m];
                row.series = kSeries[s];
                row.n = vals.size();
                row.excluded = samples.excluded[slot];
                if (vals.empty()) {
                    row.mean = std::numeric_limits<double>::quiet_NaN();
                    row.stddev = std::numeric_limits<double>::quiet_NaN();
                } else {
                    double sum = 0.0;
                    for (double v : vals) sum += v;
                    row.mean = sum / static_cast<double>(vals.size());
                    if (vals.size() == 1) {
                        row.stddev = 0.0;
                    } else {
                        double acc = 0.0;
                        for (double v : vals) acc += (v - row.mean) * (v - row.mean);
                        row.stddev = std::sqrt(acc / static_cast<double>(vals.size() - 1));
                    }
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

SweepResult run_sweep(const SweepConfig& cfg, const ProviderSet& providers, int jobs) {
    cfg.validate();
    if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");

    auto dataset = list_dataset(cfg.dataset_dir);
    std::vector<ImageBuffer> images;
    images.reserve(dataset.size());
    for (const auto& [id, path] : dataset) {
        images.push_back(load_image(path));
    }
    ImageBuffer control = cfg.control_image == "builtin" ? builtin_control_image()
                                                         : load_image(cfg.control_image);

    fs::path out_dir(cfg.output_dir);
    fs::path cells_dir = out_dir / "cells";
    fs::create_directories(cells_dir);

    std::vector<Cell> cells;
    for (std::size_t t = 0; t < cfg.error_types.size(); ++t) {
        for (std::size_t r = 0; r < cfg.ratios.size(); ++r) {
            for (std::size_t i = 0; i < dataset.size(); ++i) {
                Cell cell;
                cell.type_index = t;
                cell.ratio_index = r;
                cell.image_index = i;
                cell.file = cells_dir / ("cell_t" + std::to_string(cfg.error_types[t]) + "_r" +
                                         std::to_string(r) + "_i" + std::to_string(i) + ".csv");
                cell.persisted = fs::exists(cell.file);
                cells.push_back(std::move(cell));
            }
        }
    }

    CaptionCache captions;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    auto work = [&] {
        try {
            for (;;) {
                std::size_t idx = next.fetch_add(1);
                if (idx >= cells.size() || abort.load()) return;
                Cell& cell = cells[idx];
                if (cell.persisted) continue;
                auto records = compute_cell(cfg, cell, dataset, images, control, providers,
                                            captions);
                if (has_transport_failure(records)) {
                    // Leave no cell file: a rerun against a recovered backend
                    // recomputes this cell instead of trusting a dead one.
                    cell.records = std::move(records);
                } else {
                    fs::path tmp = cell.file;
                    tmp += ".tmp";
                    write_records_csv(records, tmp.string());
                    fs::rename(tmp, cell.file);
                    cell.persisted = true;
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            abort.store(true);
        }
    };
    const auto worker_count =
        std::min(static_cast<std::size_t>(jobs), cells.size());
    if (worker_count <= 1) {
        work();
    } else {
        std::vector<std::thread> workers;
        workers.reserve(worker_count);
        for (std::size_t w = 0; w < worker_count; ++w) workers.emplace_back(work);
        for (auto& th : workers) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Merge from the persisted cells so a fresh run and a resumed run emit
    // identical bytes: every value passes through CSV formatting exactly once
    // before aggregation.
    SweepResult result;
    for (const auto& cell : cells) {
        std::vector<TrialRecord> parsed;
        if (cell.persisted) {
            parsed = read_records_csv(cell.file.string());
        } else {
            parsed = parse_records_csv(records_to_csv(cell.records));
        }
        result.records.insert(result.records.end(), parsed.begin(), parsed.end());
    }
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const TrialRecord& a, const TrialRecord& b) {
                         auto ka = std::tuple(static_cast<int>(a.error_type), a.requested_ratio,
                                              a.image_id, a.gen_seed);
                         auto kb = std::tuple(static_cast<int>(b.error_type), b.requested_ratio,
                                              b.image_id, b.gen_seed);
                         return ka < kb;
                     });

    for (const auto& rec : result.records) {
        if (!rec.ok()) {
            ++result.failed_trials;
            if (rec.status.size() >= 10 &&
                rec.status.compare(rec.status.size() - 10, 10, ":transport") == 0) {
                ++result.transport_failed_trials;
            }
        }
    }

    result.aggregates = aggregate(result.records);
    write_records_csv(result.records, (out_dir / "records.csv").string());
    write_aggregates_csv(result.aggregates, (out_dir / "aggregates.csv").string());

    std::ofstream manifest(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
    manifest << sweep_manifest(cfg, providers).dump(2) << "\n";
    return result;
}

}  // namespace aquasem
