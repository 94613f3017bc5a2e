#pragma once

#include "aeb/dataset.hpp"
#include "aeb/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace aeb {

// ---------------------------------------------------------------------------
// Lightweight temporal compression: greedy piecewise-linear fit.

/// Consecutive segments share endpoints: segment i ends where i+1 starts.
/// Endpoint values are exactly representable as 32-bit floats.
struct LtcSegment {
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    double start_value = 0.0;
    double end_value = 0.0;

    bool operator==(const LtcSegment&) const = default;
};

std::vector<LtcSegment> ltc_compress(std::span<const double> series, double bound);
std::vector<double> ltc_decompress(std::span<const LtcSegment> segments);

/// 32-bit start value plus (32-bit end index + 32-bit end value) per segment.
std::size_t ltc_bits(std::span<const LtcSegment> segments);

// ---------------------------------------------------------------------------
// Truncated LZW: fixed-point quantization followed by classic 12-bit LZW.

struct FixedPointFormat {
    unsigned int_bits = 8;   ///< two's complement, sign included
    unsigned frac_bits = 0;

    unsigned width() const noexcept { return int_bits + frac_bits; }
    double step() const noexcept;
    double min_value() const noexcept;
    double max_value() const noexcept;
};

inline constexpr unsigned kMaxFracBits = 24;

/// Smallest fraction width whose round-to-nearest error stays within `bound`,
/// capped at kMaxFracBits (bound == 0 maps to the cap).
unsigned frac_bits_for_bound(double bound);

std::int64_t quantize_fixed(double v, const FixedPointFormat& fmt);
double dequantize_fixed(std::int64_t q, const FixedPointFormat& fmt);

/// Human-readable binary form, e.g. 10.5 with 8.1 bits -> "00001010.1".
std::string fixed_point_string(double v, const FixedPointFormat& fmt);

/// Classic LZW over bytes: 256 literal codes, dictionary grows to 4096, then
/// resets. Codes are 12 bits, packed MSB-first.
std::vector<std::uint8_t> lzw_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> lzw_decode(std::span<const std::uint8_t> packed);
std::size_t lzw_code_count(std::span<const std::uint8_t> packed);

/// The stream starts with a two-byte header (int_bits, frac_bits) followed by
/// LZW codes over the packed fixed-point words.
std::vector<std::uint8_t> lzw_truncated_compress(std::span<const double> p, double bound,
                                                 unsigned int_bits = 8);
std::vector<double> lzw_truncated_decompress(std::span<const std::uint8_t> bytes, std::size_t count);

/// Emitted code bits only (12 per code); the header is configuration.
std::size_t lzw_truncated_bits(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Linear bases.

enum class BasisKind { pca, dct };

struct LinearBasisModel {
    BasisKind kind = BasisKind::pca;
    std::vector<double> mean;  ///< training mean (PCA); zeros for DCT
    Matrix components;         ///< k x n, orthonormal rows
};

LinearBasisModel pca_fit(std::span<const std::vector<double>> training, std::size_t k);
LinearBasisModel pca_fit(std::span<const DataVector> training, std::size_t k);
std::vector<double> pca_compress(std::span<const double> p, const LinearBasisModel& model);
std::vector<double> pca_decompress(std::span<const double> coefficients, const LinearBasisModel& model);

/// Orthonormal DCT-II basis, row j = frequency j.
Matrix dct_matrix(std::size_t n);
std::vector<double> dct_forward(std::span<const double> p);
std::vector<double> dct_inverse(std::span<const double> coefficients);

struct DctCoefficient {
    std::size_t index = 0;
    double value = 0.0;
};

/// Keeps the k largest-magnitude coefficients (ties: lower index first),
/// sorted by index.
std::vector<DctCoefficient> dct_compress(std::span<const double> p, std::size_t k);
std::vector<double> dct_decompress(std::span<const DctCoefficient> coefficients, std::size_t n);

/// k * (32 + ceil(log2 n)).
std::size_t dct_bits(std::size_t k, std::size_t n);

/// Symmetric eigen-decomposition by cyclic Jacobi rotations. Eigenvalues are
/// returned in descending order; eigenvector j is column j.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& a);

}  // namespace aeb
