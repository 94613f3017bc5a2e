#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace aeb {

double mean_abs_error(std::span<const double> p, std::span<const double> q);

/// Percent: 100 * sum |p - q|^2 / sum p^2.
double relative_error(std::span<const double> p, std::span<const double> q);

/// Percent: (1 - (code + residual) / raw) * 100. Negative means expansion.
double compression_ratio(double bits_code, double bits_residual, double bits_raw);

/// Raw size charged to a vector of n readings (32-bit floats).
constexpr std::size_t raw_bits(std::size_t n) noexcept { return 32 * n; }

struct EvalRow {
    std::string method;
    double bound = 0.0;
    double cr = 0.0;
    double eps_abs = 0.0;
    double eps_rel = 0.0;
    std::size_t bits_code = 0;
    std::size_t bits_residual = 0;
    std::size_t bits_raw = 0;
    double wall_time = 0.0;
    std::string status = "ok";
};

}  // namespace aeb
