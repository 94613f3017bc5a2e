#pragma once

#include "aeb/autoencoder.hpp"
#include "aeb/dataset.hpp"
#include "aeb/metrics.hpp"
#include "aeb/optimizer.hpp"
#include "aeb/residual.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace aeb {

/// Evaluation protocol: leave-one-fold-out over `folds` seeded folds of the
/// window vectors, `repetitions` weight initializations per fold.
struct BenchConfig {
    // Data source: a CSV path, or the synthetic generator when empty.
    std::filesystem::path csv_path;
    CsvSchema schema;
    std::size_t synth_sensors = 23;
    std::size_t synth_steps = 20000;
    double synth_noise = 0.1;

    WindowMode mode = WindowMode::temporal;
    std::size_t window = 32;
    std::size_t stride = 0;  ///< 0: non-overlapping (stride = window)

    /// Any of: ae, ltc, lzw, pca, dct. "ae" expands to every entry of `variants`.
    std::vector<std::string> methods = {"ae", "ltc", "lzw", "pca", "dct"};
    std::vector<CostVariant> variants = {CostVariant::ae, CostVariant::wae, CostVariant::sae};
    std::vector<std::size_t> ks = {4};
    std::vector<double> bounds = {0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0};

    std::size_t folds = 10;
    std::size_t repetitions = 20;
    std::uint64_t seed = 0;

    CostConfig cost;  ///< variant field ignored; the sweep sets it
    LbfgsOptions optimizer;
    ResidualPrecision precision = ResidualPrecision::f32;
    unsigned lzw_int_bits = 8;

    /// Worker cap; 0 means hardware concurrency (AEB_THREADS overrides).
    unsigned threads = 0;
    /// Write measured wall time into the results table. Off keeps the table
    /// byte-reproducible; timings always go to a separate file.
    bool record_timing = false;

    void validate() const;
};

/// How a single autoencoder fit ended.
struct TrainingRecord {
    std::string method;
    std::size_t fold = 0;
    std::size_t repetition = 0;
    std::size_t iterations = 0;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    double final_grad_norm = 0.0;
    std::string stop_reason;
    double sigma = 0.0;
};

struct BenchOutput {
    std::vector<EvalRow> rows;              ///< sorted by method then ascending bound
    std::vector<TrainingRecord> training;   ///< sorted by method, fold, repetition
    std::vector<EvalRow> timings;           ///< same rows, wall_time always measured
    std::size_t vectors = 0;
};

/// Worker count after applying AEB_THREADS and the config cap.
unsigned resolve_threads(unsigned requested);

SensorMatrix load_bench_data(const BenchConfig& cfg);
BenchOutput run_bench(const BenchConfig& cfg);

}  // namespace aeb
