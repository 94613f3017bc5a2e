#include "aeb/sphering.hpp"

#include "aeb/error.hpp"

#include <algorithm>
#include <cmath>

namespace aeb {

namespace {

constexpr double kLow = 0.1;
constexpr double kHigh = 0.9;
constexpr double kSpan = 0.4;  // half-width of [0.1, 0.9]
constexpr double kClip = 3.0;  // truncation in standard deviations

template <typename Range, typename Get>
SpheringScale pooled_sigma(const Range& training, Get get)
{
    if (training.empty()) {
        throw ArgumentError("estimate_sigma: empty training set");
    }
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (const auto& item : training) {
        const std::span<const double> v = get(item);
        const double m = mean(v);
        for (double e : v) {
            if (!std::isfinite(e)) {
                throw DomainError("estimate_sigma: non-finite reading");
            }
            const double c = e - m;
            sum_sq += c * c;
        }
        count += v.size();
    }
    if (count == 0 || !(sum_sq > 0.0)) {
        throw DegenerateDataError("estimate_sigma: every training vector is constant");
    }
    return SpheringScale(std::sqrt(sum_sq / static_cast<double>(count)));
}

}  // namespace

SpheringScale::SpheringScale(double sigma) : sigma_(sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("sphering scale must be positive and finite");
    }
}

double mean(std::span<const double> v)
{
    if (v.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double e : v) {
        s += e;
    }
    return s / static_cast<double>(v.size());
}

SpheringScale estimate_sigma(std::span<const DataVector> training)
{
    return pooled_sigma(training, [](const DataVector& d) { return std::span<const double>(d.entries); });
}

SpheringScale estimate_sigma(std::span<const std::vector<double>> training)
{
    return pooled_sigma(training, [](const std::vector<double>& d) { return std::span<const double>(d); });
}

std::vector<double> normalize(std::span<const double> p, const SpheringScale& scale)
{
    for (double e : p) {
        if (!std::isfinite(e)) {
            throw DomainError("normalize: non-finite reading");
        }
    }
    const double m = mean(p);
    const double limit = kClip * scale.sigma();
    std::vector<double> x(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double unit = std::clamp((p[i] - m) / limit, -1.0, 1.0);
        x[i] = std::clamp(0.5 + kSpan * unit, kLow, kHigh);
    }
    return x;
}

std::vector<double> denormalize(std::span<const double> x, double m, const SpheringScale& scale)
{
    if (!std::isfinite(m)) {
        throw DomainError("denormalize: non-finite mean");
    }
    const double gain = kClip * scale.sigma() / kSpan;
    std::vector<double> p(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw DomainError("denormalize: non-finite entry");
        }
        p[i] = gain * (x[i] - 0.5) + m;
    }
    return p;
}

}  // namespace aeb
