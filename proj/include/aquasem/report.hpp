#pragma once

#include <string>
#include <vector>

#include "aquasem/experiment.hpp"
#include "aquasem/pipeline.hpp"

namespace aquasem {

// CSV schemas. UTF-8, LF line endings, RFC 4180 quoting, floats with six
// decimal places, "inf"/"nan" tokens for non-finite values, deterministic
// row order.
extern const char* const kRecordsCsvHeader;
extern const char* const kAggregatesCsvHeader;

std::string records_to_csv(const std::vector<TrialRecord>& records);
void write_records_csv(const std::vector<TrialRecord>& records, const std::string& path);
std::vector<TrialRecord> parse_records_csv(const std::string& text);
std::vector<TrialRecord> read_records_csv(const std::string& path);

std::string aggregates_to_csv(const std::vector<AggregateRow>& rows);
void write_aggregates_csv(const std::vector<AggregateRow>& rows, const std::string& path);
std::vector<AggregateRow> parse_aggregates_csv(const std::string& text);
std::vector<AggregateRow> read_aggregates_csv(const std::string& path);

// Fixed float formatting used in both CSV files.
std::string format_csv_value(double v);
double parse_csv_value(const std::string& s);

// One chart: a metric against the error percentage for one error type, two
// series with optional std whiskers.
struct ChartSpec {
    std::string metric;  // psnr_db | ssim | clip_score_pct
    int error_type = 0;
    std::vector<double> x_percent;  // strictly ascending
    std::vector<double> vs_original_mean;
    std::vector<double> vs_original_std;
    std::vector<double> vs_control_mean;
    std::vector<double> vs_control_std;
};

// Page geometry of the rendered charts; exposed so consumers can map data
// coordinates to pixels (and back).
struct ChartGeometry {
    static constexpr double kWidth = 640.0;
    static constexpr double kHeight = 420.0;
    static constexpr double kMarginLeft = 64.0;
    static constexpr double kMarginRight = 24.0;
    static constexpr double kMarginTop = 48.0;
    static constexpr double kMarginBottom = 56.0;

    static constexpr double plot_width() { return kWidth - kMarginLeft - kMarginRight; }
    static constexpr double plot_height() { return kHeight - kMarginTop - kMarginBottom; }

    static double x_to_px(double x, double x_min, double x_max);
    static double y_to_px(double y, double y_min, double y_max);
};

// Fixed per-metric y ranges so charts are comparable across error types.
void metric_y_range(const std::string& metric, double& lo, double& hi);
std::string metric_display_name(const std::string& metric);

// Standalone SVG. Blue #1f77b4 polyline for vs_original, red #d62728 for
// vs_control, axes with tick labels, legend, title "Average <metric> vs
// Error Percentage (Error Type <k>)". Byte-identical output for identical
// input. Requires at least two points per series.
std::string render_chart(const ChartSpec& spec);

struct ReportManifest {
    std::vector<std::string> written;
    std::vector<std::string> warnings;
};

// One SVG per (metric, error type) present in the aggregates; cells whose
// mean is empty are skipped with a warning, charts with fewer than two
// usable points are skipped entirely. Also writes report_manifest.json.
ReportManifest render_all(const std::vector<AggregateRow>& aggregates, const std::string& out_dir);

}  // namespace aquasem
