#pragma once

#include "aeb/bench.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace aeb::cli {

/// A model or bench request that failed validation; reported as a usage error.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainArgs {
    std::filesystem::path csv;
    bool synth = false;
    std::size_t synth_sensors = 23;
    std::size_t synth_steps = 20000;
    double synth_noise = 0.1;
    std::string timestamp_column = "t";
    std::string mode = "temporal";
    std::size_t window = 32;
    std::size_t stride = 0;
    std::size_t k = 4;
    std::string variant = "WAE";
    CostConfig cost;
    LbfgsOptions optimizer;
    std::uint64_t seed = 0;
    double bound = 0.1;
    unsigned residual_bits = 32;
    std::size_t folds = 10;
    std::optional<std::size_t> exclude_fold;
    std::filesystem::path out;
};

struct CompressArgs {
    std::filesystem::path model;
    std::filesystem::path input;
    std::filesystem::path out;
    std::optional<double> bound;
    std::string mode = "temporal";
    std::size_t stride = 0;
    std::string timestamp_column = "t";
};

struct DecompressArgs {
    std::filesystem::path model;
    std::filesystem::path input;
    std::filesystem::path out;
    std::filesystem::path layout;
    std::filesystem::path verify;
};

struct BenchArgs {
    BenchConfig cfg;
    std::string mode = "temporal";
    std::vector<std::string> variants = {"AE", "WAE", "SAE"};
    unsigned residual_bits = 32;
    std::filesystem::path out;
};

struct ReportArgs {
    std::filesystem::path results;
    std::filesystem::path out;
};

int run_train(const TrainArgs& args);
int run_compress(const CompressArgs& args);
int run_decompress(const DecompressArgs& args);
int run_bench(BenchArgs args);
int run_report(const ReportArgs& args);

}  // namespace aeb::cli
