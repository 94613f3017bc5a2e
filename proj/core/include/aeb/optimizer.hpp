#pragma once

#include "aeb/autoencoder.hpp"
#include "aeb/dataset.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace aeb {

struct LbfgsOptions {
    std::size_t history = 10;
    std::size_t max_iters = 400;
    double grad_tol = 1e-5;   ///< on the infinity norm
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    std::size_t max_line_search_steps = 25;

    void validate() const;
};

enum class StopReason { converged, max_iters, line_search_failure };

const char* to_string(StopReason r);

struct TrainingTrace {
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    std::vector<double> cost_history;   ///< initial cost, then one per accepted step
    double final_grad_norm = 0.0;
    StopReason stop_reason = StopReason::max_iters;
};

/// Writes the gradient at `x` into `grad` and returns the objective value.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct MinimizeResult {
    std::vector<double> x;
    TrainingTrace trace;
};

/// L-BFGS (two-loop recursion) with a strong-Wolfe line search.
MinimizeResult minimize(const Objective& objective, std::vector<double> x0,
                        const LbfgsOptions& opts = {});

struct TrainResult {
    ModelParams model;
    TrainingTrace trace;
};

/// Estimates sigma on `data`, normalizes it, and fits the weights from
/// init_params(n, k, seed).
TrainResult train(std::span<const DataVector> data, std::size_t n, std::size_t k,
                  const CostConfig& cfg, const LbfgsOptions& opts, std::uint64_t seed);
TrainResult train(std::span<const std::vector<double>> data, std::size_t n, std::size_t k,
                  const CostConfig& cfg, const LbfgsOptions& opts, std::uint64_t seed);

}  // namespace aeb
