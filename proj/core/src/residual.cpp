#include "aeb/residual.hpp"

#include "aeb/error.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace aeb {

ResidualCode residual_code(std::span<const double> r, double bound)
{
    if (!(bound >= 0.0)) {
        throw ArgumentError("residual bound must be nonnegative");
    }
    ResidualCode code;
    code.indicator.assign(r.size(), false);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (std::abs(r[i]) > bound) {
            code.indicator[i] = true;
            code.values.push_back(r[i]);
        }
    }
    return code;
}

std::vector<double> residual_decode(const ResidualCode& code, std::size_t n)
{
    if (code.indicator.size() != n) {
        throw FormatError("residual indicator covers " + std::to_string(code.indicator.size()) +
                          " positions, expected " + std::to_string(n));
    }
    std::size_t set = 0;
    for (bool b : code.indicator) {
        set += b ? 1 : 0;
    }
    if (set != code.values.size()) {
        throw FormatError("residual indicator has " + std::to_string(set) + " set bits but " +
                          std::to_string(code.values.size()) + " values");
    }
    std::vector<double> r(n, 0.0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (code.indicator[i]) {
            r[i] = code.values[next++];
        }
    }
    return r;
}

std::vector<double> apply_residual(std::span<const double> q, const ResidualCode& code)
{
    const auto r = residual_decode(code, q.size());
    std::vector<double> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        out[i] = q[i] + r[i];
    }
    return out;
}

namespace {

// Neighbouring values of the wire type tried when plain rounding misses.
constexpr int kSearchSteps = 16;

template <typename Wire>
std::optional<double> pick_value(double p, double q, double bound, bool best_effort)
{
    const double r = p - q;
    const auto wire = static_cast<Wire>(r);
    if (!std::isfinite(wire)) {
        return std::nullopt;
    }
    auto error = [&](Wire v) { return std::abs(p - (q + static_cast<double>(v))); };
    Wire best = wire;
    double best_err = error(wire);
    if (best_err <= bound) {
        return static_cast<double>(best);
    }
    for (const Wire toward : {std::numeric_limits<Wire>::infinity(), -std::numeric_limits<Wire>::infinity()}) {
        Wire v = wire;
        for (int s = 0; s < kSearchSteps; ++s) {
            v = std::nextafter(v, toward);
            if (!std::isfinite(v)) {
                break;
            }
            const double e = error(v);
            if (e < best_err) {
                best = v;
                best_err = e;
            }
            if (best_err <= bound) {
                return static_cast<double>(best);
            }
        }
    }
    if (best_effort) {
        return static_cast<double>(best);
    }
    return std::nullopt;
}

}  // namespace

ResidualCode encode_residual(std::span<const double> p, std::span<const double> q, double bound,
                             ResidualPrecision precision)
{
    if (p.size() != q.size()) {
        throw ShapeError("encode_residual: reading and reconstruction lengths differ");
    }
    if (!(bound >= 0.0) || std::isnan(bound)) {
        throw ArgumentError("residual bound must be nonnegative");
    }
    ResidualCode code;
    code.indicator.assign(p.size(), false);
    const bool best_effort = bound == 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p[i] - q[i];
        if (!(std::abs(r) > bound)) {
            continue;
        }
        const auto value = precision == ResidualPrecision::f32
                               ? pick_value<float>(p[i], q[i], bound, best_effort)
                               : pick_value<double>(p[i], q[i], bound, best_effort);
        if (!value) {
            throw PrecisionError("residual " + std::to_string(r) + " at index " + std::to_string(i) +
                                 " cannot be stored in " + std::to_string(bits_of(precision)) +
                                 " bits within bound " + std::to_string(bound));
        }
        code.indicator[i] = true;
        code.values.push_back(*value);
    }
    return code;
}

}  // namespace aeb
