#include "aeb/metrics.hpp"

#include "aeb/error.hpp"

#include <cmath>

namespace aeb {

namespace {

void check_pair(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size()) {
        throw ShapeError("metric: vectors differ in length");
    }
    if (p.empty()) {
        throw ArgumentError("metric: empty vectors");
    }
}

}  // namespace

double mean_abs_error(std::span<const double> p, std::span<const double> q)
{
    check_pair(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += std::abs(p[i] - q[i]);
    }
    return s / static_cast<double>(p.size());
}

double relative_error(std::span<const double> p, std::span<const double> q)
{
    check_pair(p, q);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        num += d * d;
        den += p[i] * p[i];
    }
    if (!(den > 0.0)) {
        throw DomainError("relative_error: reference vector is all zero");
    }
    return 100.0 * num / den;
}

double compression_ratio(double bits_code, double bits_residual, double bits_raw)
{
    if (!(bits_raw > 0.0)) {
        throw ArgumentError("compression_ratio: raw size must be positive");
    }
    return (1.0 - (bits_code + bits_residual) / bits_raw) * 100.0;
}

}  // namespace aeb
