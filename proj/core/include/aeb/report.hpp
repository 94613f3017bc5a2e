#pragma once

#include "aeb/bench.hpp"
#include "aeb/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace aeb {

inline constexpr const char* kResultsHeader =
    "method,bound,cr,eps_abs,eps_rel,bits_code,bits_residual,bits_raw,wall_time,status";

void write_results_csv(std::ostream& out, const std::vector<EvalRow>& rows);
std::vector<EvalRow> read_results_csv(std::istream& in);
std::vector<EvalRow> read_results_csv(const std::filesystem::path& path);

void write_training_csv(std::ostream& out, const std::vector<TrainingRecord>& records);

/// key=value dump of everything that determines the results.
std::string manifest_text(const BenchConfig& cfg, std::size_t vectors);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
};

/// Minimal standalone SVG line chart.
std::string render_svg(const PlotSpec& plot, const std::vector<PlotSeries>& series);

/// Writes cr_vs_rel.svg, cr_vs_abs.svg and bound_vs_cr.svg into `dir`.
void write_plots(const std::filesystem::path& dir, const std::vector<EvalRow>& rows);

/// results.csv, training.csv, timings.csv, manifest.txt and the plots.
void write_report(const std::filesystem::path& dir, const BenchConfig& cfg, const BenchOutput& out);

/// Library version baked in at build time.
const char* version_string() noexcept;

}  // namespace aeb
