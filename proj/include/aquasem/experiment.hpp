#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aquasem/backends.hpp"
#include "aquasem/pipeline.hpp"

namespace aquasem {

// The grid of error types x ratios x trials over a dataset directory.
struct SweepConfig {
    std::string dataset_dir;
    std::string control_image = "builtin";  // path or "builtin"
    std::vector<int> error_types = {1, 2, 3};
    std::vector<double> ratios;  // strictly ascending, all in [0,1]
    int generations_per_caption = 10;
    std::uint64_t channel_seed_base = 0;
    std::string output_dir;
    std::optional<BackendEndpoint> backends;  // empty = mock providers
    int gen_width = 512;
    int gen_height = 512;

    // Throws std::invalid_argument on violated invariants.
    void validate() const;
};

// Ratios 0.00 to 0.50 in steps of 0.05, all three error types, ten
// generations per caption.
SweepConfig default_grid();

// Per-cell aggregate of one metric and comparison series.
struct AggregateRow {
    int error_type = 0;
    double ratio = 0.0;
    std::string metric;  // psnr_db | ssim | clip_score_pct
    std::string series;  // vs_original | vs_control
    double mean = 0.0;   // NaN when no usable values (row is empty)
    double stddev = 0.0; // sample std (n-1); 0 when n == 1, NaN when empty
    std::size_t n = 0;        // values included in the mean
    std::size_t excluded = 0; // infinite PSNR values left out of the mean
};

struct SweepResult {
    std::vector<TrialRecord> records;
    std::vector<AggregateRow> aggregates;
    std::size_t failed_trials = 0;
    std::size_t transport_failed_trials = 0;
};

// Channel seed for one grid cell, derived from the base seed through
// splitmix64 mixing. Distinct cells receive distinct seeds.
std::uint64_t mix_channel_seed(std::uint64_t base, int error_type, std::size_t ratio_index,
                               std::size_t image_index);

// (image_id, path) pairs sorted by filename; image_id is the stem.
// Throws when the directory holds no loadable images.
std::vector<std::pair<std::string, std::string>> list_dataset(const std::string& dataset_dir);

// Runs the full grid. One corruption per (error type, ratio, image) cell is
// shared by that cell's generations; generation seeds are 0..G-1. Cell
// results are persisted under <output_dir>/cells and completed cells are
// skipped on re-runs. Writes records.csv, aggregates.csv and manifest.json
// into output_dir; returns the merged records and aggregates re-read from
// the persisted cells so output does not depend on scheduling or on which
// cells were resumed. Trial failures are recorded per trial and do not stop
// the sweep.
SweepResult run_sweep(const SweepConfig& cfg, const ProviderSet& providers, int jobs = 1);

// Mean and sample standard deviation per (error type, ratio, metric, series),
// failed trials excluded, infinite PSNR values excluded and counted.
// Throws std::invalid_argument on an empty record list.
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records);

}  // namespace aquasem
