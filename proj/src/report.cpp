#include "aquasem/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace aquasem {

const char* const kRecordsCsvHeader =
    "image_id,error_type,requested_ratio,realized_ratio,gen_seed,caption_clean,"
    "caption_corrupted,psnr_db_orig,ssim_orig,clip_orig,psnr_db_ctrl,ssim_ctrl,clip_ctrl,"
    "status";
const char* const kAggregatesCsvHeader = "error_type,ratio,metric,series,mean,std,n,excluded";

namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

// Splits CSV text into rows of fields, honoring quoted fields with embedded
// separators and doubled quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && !field_started && field.empty()) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_row();
        } else if (c == '\r') {
            // tolerated before LF
        } else {
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) throw std::runtime_error("unterminated quoted CSV field");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("short write: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int parse_int(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("invalid ") + what + " in CSV: " + s);
    }
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("invalid ") + what + " in CSV: " + s);
    }
}

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

std::string format_csv_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

double parse_csv_value(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("invalid numeric CSV value: " + s);
    }
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
    std::string out = kRecordsCsvHeader;
    out += '\n';
    for (const auto& r : records) {
        out += csv_field(r.image_id);
        out += ',';
        out += std::to_string(static_cast<int>(r.error_type));
        out += ',';
        out += format_csv_value(r.requested_ratio);
        out += ',';
        out += format_csv_value(r.realized_ratio);
        out += ',';
        out += std::to_string(r.gen_seed);
        out += ',';
        out += csv_field(r.caption_clean);
        out += ',';
        out += csv_field(r.caption_corrupted);
        out += ',';
        out += format_csv_value(r.metrics_vs_original.psnr_db);
        out += ',';
        out += format_csv_value(r.metrics_vs_original.ssim);
        out += ',';
        out += format_csv_value(r.metrics_vs_original.clip_score_pct);
        out += ',';
        out += format_csv_value(r.metrics_vs_control.psnr_db);
        out += ',';
        out += format_csv_value(r.metrics_vs_control.ssim);
        out += ',';
        out += format_csv_value(r.metrics_vs_control.clip_score_pct);
        out += ',';
        out += csv_field(r.status);
        out += '\n';
    }
    return out;
}

void write_records_csv(const std::vector<TrialRecord>& records, const std::string& path) {
    write_text_file(path, records_to_csv(records));
}

std::vector<TrialRecord> parse_records_csv(const std::string& text) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw std::runtime_error("records CSV is empty");
    auto header = parse_csv(std::string(kRecordsCsvHeader) + "\n").front();
    if (rows.front() != header) throw std::runtime_error("records CSV header mismatch");

    std::vector<TrialRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != header.size()) {
            throw std::runtime_error("records CSV row " + std::to_string(i) + " has " +
                                     std::to_string(row.size()) + " fields");
        }
        TrialRecord r;
        r.image_id = row[0];
        r.error_type = error_type_from_int(parse_int(row[1], "error_type"));
        r.requested_ratio = parse_csv_value(row[2]);
        r.realized_ratio = parse_csv_value(row[3]);
        r.gen_seed = parse_u64(row[4], "gen_seed");
        r.caption_clean = row[5];
        r.caption_corrupted = row[6];
        r.metrics_vs_original.psnr_db = parse_csv_value(row[7]);
        r.metrics_vs_original.ssim = parse_csv_value(row[8]);
        r.metrics_vs_original.clip_score_pct = parse_csv_value(row[9]);
        r.metrics_vs_control.psnr_db = parse_csv_value(row[10]);
        r.metrics_vs_control.ssim = parse_csv_value(row[11]);
        r.metrics_vs_control.clip_score_pct = parse_csv_value(row[12]);
        r.status = row[13];
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<TrialRecord> read_records_csv(const std::string& path) {
    return parse_records_csv(read_text_file(path));
}

std::string aggregates_to_csv(const std::vector<AggregateRow>& rows) {
    std::string out = kAggregatesCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.error_type);
        out += ',';
        out += format_csv_value(r.ratio);
        out += ',';
        out += csv_field(r.metric);
        out += ',';
        out += csv_field(r.series);
        out += ',';
        out += format_csv_value(r.mean);
        out += ',';
        out += format_csv_value(r.stddev);
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.excluded);
        out += '\n';
    }
    return out;
}

void write_aggregates_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
    write_text_file(path, aggregates_to_csv(rows));
}

std::vector<AggregateRow> parse_aggregates_csv(const std::string& text) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw std::runtime_error("aggregates CSV is empty");
    auto header = parse_csv(std::string(kAggregatesCsvHeader) + "\n").front();
    if (rows.front() != header) throw std::runtime_error("aggregates CSV header mismatch");

    std::vector<AggregateRow> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != header.size()) {
            throw std::runtime_error("aggregates CSV row " + std::to_string(i) + " has " +
                                     std::to_string(row.size()) + " fields");
        }
        AggregateRow r;
        r.error_type = parse_int(row[0], "error_type");
        r.ratio = parse_csv_value(row[1]);
        r.metric = row[2];
        r.series = row[3];
        r.mean = parse_csv_value(row[4]);
        r.stddev = parse_csv_value(row[5]);
        r.n = static_cast<std::size_t>(parse_u64(row[6], "n"));
        r.excluded = static_cast<std::size_t>(parse_u64(row[7], "excluded"));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<AggregateRow> read_aggregates_csv(const std::string& path) {
    return parse_aggregates_csv(read_text_file(path));
}

double ChartGeometry::x_to_px(double x, double x_min, double x_max) {
    return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_width();
}

double ChartGeometry::y_to_px(double y, double y_min, double y_max) {
    return kMarginTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_height();
}

void metric_y_range(const std::string& metric, double& lo, double& hi) {
    if (metric == "psnr_db") {
        lo = 0.0;
        hi = 80.0;
    } else if (metric == "ssim") {
        lo = 0.0;
        hi = 1.0;
    } else if (metric == "clip_score_pct") {
        lo = 0.0;
        hi = 100.0;
    } else {
        throw std::invalid_argument("unknown metric: " + metric);
    }
}

std::string metric_display_name(const std::string& metric) {
    if (metric == "psnr_db") return "PSNR";
    if (metric == "ssim") return "SSIM";
    if (metric == "clip_score_pct") return "CLIPScore";
    throw std::invalid_argument("unknown metric: " + metric);
}

std::string render_chart(const ChartSpec& spec) {
    const std::size_t n = spec.x_percent.size();
    if (n < 2) throw std::invalid_argument("chart needs at least two points");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(spec.x_percent[i] > spec.x_percent[i - 1])) {
            throw std::invalid_argument("chart x values must be strictly ascending");
        }
    }
    if (spec.vs_original_mean.size() != n || spec.vs_control_mean.size() != n) {
        throw std::invalid_argument("chart series lengths must match x length");
    }
    if (!spec.vs_original_std.empty() && spec.vs_original_std.size() != n) {
        throw std::invalid_argument("vs_original std length mismatch");
    }
    if (!spec.vs_control_std.empty() && spec.vs_control_std.size() != n) {
        throw std::invalid_argument("vs_control std length mismatch");
    }

    double y_lo, y_hi;
    metric_y_range(spec.metric, y_lo, y_hi);
    const double x_lo = spec.x_percent.front();
    const double x_hi = spec.x_percent.back();
    const double plot_left = ChartGeometry::kMarginLeft;
    const double plot_right = ChartGeometry::kWidth - ChartGeometry::kMarginRight;
    const double plot_top = ChartGeometry::kMarginTop;
    const double plot_bottom = ChartGeometry::kHeight - ChartGeometry::kMarginBottom;

    auto xp = [&](double x) { return ChartGeometry::x_to_px(x, x_lo, x_hi); };
    auto yp = [&](double y) { return ChartGeometry::y_to_px(y, y_lo, y_hi); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
           "viewBox=\"0 0 640 420\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"#ffffff\"/>\n";

    std::string title = "Average " + metric_display_name(spec.metric) +
                        " vs Error Percentage (Error Type " +
                        std::to_string(spec.error_type) + ")";
    svg += "<text x=\"320\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" "
           "text-anchor=\"middle\">" + title + "</text>\n";

    // Axes.
    svg += "<line x1=\"" + fmt_px(plot_left) + "\" y1=\"" + fmt_px(plot_bottom) + "\" x2=\"" +
           fmt_px(plot_right) + "\" y2=\"" + fmt_px(plot_bottom) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fmt_px(plot_left) + "\" y1=\"" + fmt_px(plot_top) + "\" x2=\"" +
           fmt_px(plot_left) + "\" y2=\"" + fmt_px(plot_bottom) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // X ticks at every data point.
    for (std::size_t i = 0; i < n; ++i) {
        double px = xp(spec.x_percent[i]);
        svg += "<line x1=\"" + fmt_px(px) + "\" y1=\"" + fmt_px(plot_bottom) + "\" x2=\"" +
               fmt_px(px) + "\" y2=\"" + fmt_px(plot_bottom + 5.0) +
               "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt_px(px) + "\" y=\"" + fmt_px(plot_bottom + 20.0) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
               fmt_tick(spec.x_percent[i]) + "</text>\n";
    }

    // Y ticks across four equal intervals of the fixed range.
    for (int i = 0; i <= 4; ++i) {
        double y = y_lo + (y_hi - y_lo) * i / 4.0;
        double py = yp(y);
        svg += "<line x1=\"" + fmt_px(plot_left - 5.0) + "\" y1=\"" + fmt_px(py) + "\" x2=\"" +
               fmt_px(plot_left) + "\" y2=\"" + fmt_px(py) +
               "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        svg += "<line x1=\"" + fmt_px(plot_left) + "\" y1=\"" + fmt_px(py) + "\" x2=\"" +
               fmt_px(plot_right) + "\" y2=\"" + fmt_px(py) +
               "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt_px(plot_left - 9.0) + "\" y=\"" + fmt_px(py + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
               fmt_tick(y) + "</text>\n";
    }

    // Axis labels.
    svg += "<text x=\"" + fmt_px((plot_left + plot_right) / 2.0) + "\" y=\"" +
           fmt_px(ChartGeometry::kHeight - 12.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">Error "
           "Percentage (%)</text>\n";
    std::string y_label = metric_display_name(spec.metric);
    if (spec.metric == "psnr_db") y_label += " (dB)";
    if (spec.metric == "clip_score_pct") y_label += " (%)";
    svg += "<text x=\"18\" y=\"" + fmt_px((plot_top + plot_bottom) / 2.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 " + fmt_px((plot_top + plot_bottom) / 2.0) +
           ")\">" + y_label + "</text>\n";

    struct Series {
        const char* color;
        const std::vector<double>* mean;
        const std::vector<double>* std;
    };
    const Series series[2] = {{"#1f77b4", &spec.vs_original_mean, &spec.vs_original_std},
                              {"#d62728", &spec.vs_control_mean, &spec.vs_control_std}};

    for (const auto& s : series) {
        // Std whiskers first so the polyline draws over them.
        if (!s.std->empty()) {
            for (std::size_t i = 0; i < n; ++i) {
                double px = xp(spec.x_percent[i]);
                double lo = yp((*s.mean)[i] - (*s.std)[i]);
                double hi = yp((*s.mean)[i] + (*s.std)[i]);
                svg += "<line x1=\"" + fmt_px(px) + "\" y1=\"" + fmt_px(lo) + "\" x2=\"" +
                       fmt_px(px) + "\" y2=\"" + fmt_px(hi) + "\" stroke=\"" + s.color +
                       "\" stroke-width=\"1\" opacity=\"0.45\"/>\n";
            }
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += s.color;
        svg += "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            if (i) svg += ' ';
            svg += fmt_px(xp(spec.x_percent[i]));
            svg += ',';
            svg += fmt_px(yp((*s.mean)[i]));
        }
        svg += "\"/>\n";
        for (std::size_t i = 0; i < n; ++i) {
            svg += "<circle cx=\"" + fmt_px(xp(spec.x_percent[i])) + "\" cy=\"" +
                   fmt_px(yp((*s.mean)[i])) + "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
        }
    }

    // Legend, top-right corner of the plot area.
    double lx = plot_right - 150.0;
    double ly = plot_top + 12.0;
    svg += "<line x1=\"" + fmt_px(lx) + "\" y1=\"" + fmt_px(ly) + "\" x2=\"" +
           fmt_px(lx + 26.0) + "\" y2=\"" + fmt_px(ly) +
           "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt_px(lx + 32.0) + "\" y=\"" + fmt_px(ly + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\">vs original</text>\n";
    svg += "<line x1=\"" + fmt_px(lx) + "\" y1=\"" + fmt_px(ly + 18.0) + "\" x2=\"" +
           fmt_px(lx + 26.0) + "\" y2=\"" + fmt_px(ly + 18.0) +
           "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt_px(lx + 32.0) + "\" y=\"" + fmt_px(ly + 22.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\">vs control</text>\n";

    svg += "</svg>\n";
    return svg;
}

ReportManifest render_all(const std::vector<AggregateRow>& aggregates,
                          const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    struct Point {
        double mean = std::numeric_limits<double>::quiet_NaN();
        double stddev = 0.0;
        bool present = false;
    };
    struct CellPair {
        Point original;
        Point control;
    };
    // (metric, error_type) -> ratio -> both series.
    std::map<std::pair<std::string, int>, std::map<double, CellPair>> charts;
    for (const auto& row : aggregates) {
        auto& cell = charts[{row.metric, row.error_type}][row.ratio];
        Point p;
        p.mean = row.mean;
        p.stddev = row.stddev;
        p.present = row.n > 0;
        if (row.series == "vs_original") cell.original = p;
        else if (row.series == "vs_control") cell.control = p;
    }

    ReportManifest manifest;
    static constexpr const char* kMetricOrder[3] = {"psnr_db", "ssim", "clip_score_pct"};
    for (const char* metric : kMetricOrder) {
        for (int error_type = 1; error_type <= 3; ++error_type) {
            auto it = charts.find({metric, error_type});
            if (it == charts.end()) continue;

            ChartSpec spec;
            spec.metric = metric;
            spec.error_type = error_type;
            for (const auto& [ratio, cell] : it->second) {
                if (!cell.original.present || !cell.control.present) {
                    manifest.warnings.push_back(
                        std::string(metric) + " type " + std::to_string(error_type) +
                        ": no finite samples at ratio " + format_csv_value(ratio) +
                        ", point dropped");
                    continue;
                }
                spec.x_percent.push_back(ratio * 100.0);
                spec.vs_original_mean.push_back(cell.original.mean);
                spec.vs_original_std.push_back(cell.original.stddev);
                spec.vs_control_mean.push_back(cell.control.mean);
                spec.vs_control_std.push_back(cell.control.stddev);
            }
            if (spec.x_percent.size() < 2) {
                manifest.warnings.push_back(std::string(metric) + " type " +
                                            std::to_string(error_type) +
                                            ": fewer than two usable points, chart skipped");
                continue;
            }
            std::string filename = std::string(metric) + "_type" +
                                   std::to_string(error_type) + ".svg";
            write_text_file((fs::path(out_dir) / filename).string(), render_chart(spec));
            manifest.written.push_back(filename);
        }
    }

    nlohmann::json j{{"written", manifest.written}, {"warnings", manifest.warnings}};
    write_text_file((fs::path(out_dir) / "report_manifest.json").string(), j.dump(2) + "\n");
    return manifest;
}

}  // namespace aquasem
