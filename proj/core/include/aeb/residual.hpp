#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aeb {

/// Out-of-bound reconstruction errors: a bitmap over the N positions plus one
/// value per set bit, in ascending index order.
struct ResidualCode {
    std::vector<bool> indicator;
    std::vector<double> values;

    std::size_t size() const noexcept { return indicator.size(); }
    std::size_t transmitted() const noexcept { return values.size(); }

    bool operator==(const ResidualCode&) const = default;
};

/// Width of each residual value on the wire.
enum class ResidualPrecision : unsigned { f32 = 32, f64 = 64 };

constexpr std::size_t bits_of(ResidualPrecision p) noexcept
{
    return static_cast<std::size_t>(p);
}

/// Marks every i with |r_i| > bound and keeps r_i verbatim.
ResidualCode residual_code(std::span<const double> r, double bound);

/// Zeros where the indicator is clear, stored values where it is set.
std::vector<double> residual_decode(const ResidualCode& code, std::size_t n);

/// Residual code for `p` against a decoder-side reconstruction `q`, with the
/// stored values already rounded to `precision`. Each stored value is picked
/// so that q_i + value reproduces p_i within `bound` under the decoder's own
/// arithmetic; throws PrecisionError when no value of that width does (never
/// for bound == 0, which is best effort).
ResidualCode encode_residual(std::span<const double> p, std::span<const double> q, double bound,
                             ResidualPrecision precision);

/// q + residual_decode(code), the decoder's final step.
std::vector<double> apply_residual(std::span<const double> q, const ResidualCode& code);

}  // namespace aeb
