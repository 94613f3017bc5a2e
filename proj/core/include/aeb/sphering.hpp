#pragma once

#include "aeb/dataset.hpp"

#include <span>
#include <vector>

namespace aeb {

/// Global scale used to map readings into [0.1, 0.9].
class SpheringScale {
public:
    /// Throws DomainError unless sigma is positive and finite.
    explicit SpheringScale(double sigma);
    double sigma() const noexcept { return sigma_; }
    bool operator==(const SpheringScale&) const = default;

private:
    double sigma_;
};

double mean(std::span<const double> v);

/// Population standard deviation of all training entries after removing each
/// vector's own mean.
SpheringScale estimate_sigma(std::span<const DataVector> training);
SpheringScale estimate_sigma(std::span<const std::vector<double>> training);

/// 0.5 + 0.4/(3 sigma) * clamp(p - mean(p), -3 sigma, 3 sigma).
std::vector<double> normalize(std::span<const double> p, const SpheringScale& scale);

/// (3 sigma / 0.4) * (x - 0.5) + m.
std::vector<double> denormalize(std::span<const double> x, double m, const SpheringScale& scale);

}  // namespace aeb
