#pragma once

#include "aeb/matrix.hpp"
#include "aeb/sphering.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aeb {

/// Encoder/decoder weights of a three-layer autoencoder with `n` inputs and a
/// `k`-wide code. Also used as the shape of a gradient.
struct Weights {
    Matrix w_enc;                ///< k x n
    std::vector<double> b_enc;    ///< k
    Matrix w_dec;                ///< n x k
    std::vector<double> b_dec;    ///< n

    Weights() = default;
    Weights(std::size_t n, std::size_t k);

    std::size_t n() const noexcept { return b_dec.size(); }
    std::size_t k() const noexcept { return b_enc.size(); }

    /// Parameter count: 2nk + n + k.
    std::size_t flat_size() const noexcept;
    static std::size_t flat_size(std::size_t n, std::size_t k) noexcept;

    /// Layout: w_enc (row-major), b_enc, w_dec (row-major), b_dec.
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
    static Weights unflatten(std::span<const double> flat, std::size_t n, std::size_t k);

    bool operator==(const Weights&) const = default;
};

/// Trained model as distributed to encoder and decoder sides.
struct ModelParams {
    Weights weights;
    SpheringScale sigma{1.0};

    std::size_t n() const noexcept { return weights.n(); }
    std::size_t k() const noexcept { return weights.k(); }

    bool operator==(const ModelParams&) const = default;
};

enum class CostVariant { ae, wae, sae };

const char* to_string(CostVariant v);
CostVariant parse_cost_variant(const std::string& text);

struct CostConfig {
    CostVariant variant = CostVariant::wae;
    double beta = 1e-4;   ///< weight decay
    double eta = 0.1;     ///< sparsity weight
    double rho = 0.05;    ///< target mean activation

    /// Throws ArgumentError on negative weights or rho outside (0, 1).
    void validate() const;
};

/// Hidden activations whose batch mean falls outside this band are clamped
/// before the KL term.
inline constexpr double kActivationClamp = 1e-8;

double sigmoid(double v) noexcept;

struct ForwardResult {
    std::vector<double> y;  ///< code, length k
    std::vector<double> z;  ///< reconstruction, length n
};

ForwardResult forward(const Weights& theta, std::span<const double> x);
std::vector<double> encode(const Weights& theta, std::span<const double> x);
std::vector<double> decode(const Weights& theta, std::span<const double> y);

/// KL(rho || rho_hat) for Bernoulli means.
double kl_divergence(double rho, double rho_hat);

double cost(const Weights& theta, std::span<const std::vector<double>> data, const CostConfig& cfg);
Weights gradient(const Weights& theta, std::span<const std::vector<double>> data, const CostConfig& cfg);

/// Cost and gradient in one pass; `grad` must have flat_size() entries.
double cost_and_gradient(const Weights& theta, std::span<const std::vector<double>> data,
                         const CostConfig& cfg, std::span<double> grad);

/// Weights uniform on +-sqrt(6/(n+k)), zero biases.
Weights init_params(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace aeb
