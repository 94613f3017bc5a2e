#include "aeb/autoencoder.hpp"

#include "aeb/error.hpp"
#include "aeb/random.hpp"

#include <algorithm>
#include <cmath>

namespace aeb {

Weights::Weights(std::size_t n, std::size_t k) : w_enc(k, n), b_enc(k, 0.0), w_dec(n, k), b_dec(n, 0.0) {}

std::size_t Weights::flat_size(std::size_t n, std::size_t k) noexcept
{
    return 2 * n * k + n + k;
}

std::size_t Weights::flat_size() const noexcept
{
    return flat_size(n(), k());
}

std::vector<double> Weights::flatten() const
{
    std::vector<double> flat;
    flat.reserve(flat_size());
    flat.insert(flat.end(), w_enc.data().begin(), w_enc.data().end());
    flat.insert(flat.end(), b_enc.begin(), b_enc.end());
    flat.insert(flat.end(), w_dec.data().begin(), w_dec.data().end());
    flat.insert(flat.end(), b_dec.begin(), b_dec.end());
    return flat;
}

void Weights::assign(std::span<const double> flat)
{
    if (flat.size() != flat_size()) {
        throw ShapeError("flat parameter vector has " + std::to_string(flat.size()) +
                         " entries, expected " + std::to_string(flat_size()));
    }
    auto it = flat.begin();
    auto take = [&it](std::span<double> dst) {
        std::copy_n(it, dst.size(), dst.begin());
        it += static_cast<std::ptrdiff_t>(dst.size());
    };
    take(w_enc.data());
    take(b_enc);
    take(w_dec.data());
    take(b_dec);
}

Weights Weights::unflatten(std::span<const double> flat, std::size_t n, std::size_t k)
{
    Weights w(n, k);
    w.assign(flat);
    return w;
}

const char* to_string(CostVariant v)
{
    switch (v) {
    case CostVariant::ae:
        return "AE";
    case CostVariant::wae:
        return "WAE";
    case CostVariant::sae:
        return "SAE";
    }
    return "?";
}

CostVariant parse_cost_variant(const std::string& text)
{
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (t == "AE") {
        return CostVariant::ae;
    }
    if (t == "WAE") {
        return CostVariant::wae;
    }
    if (t == "SAE") {
        return CostVariant::sae;
    }
    throw ArgumentError("unknown cost variant '" + text + "'");
}

void CostConfig::validate() const
{
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw ArgumentError("beta must be nonnegative");
    }
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
        throw ArgumentError("eta must be nonnegative");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw ArgumentError("rho must lie in (0, 1)");
    }
}

double sigmoid(double v) noexcept
{
    if (v >= 0.0) {
        return 1.0 / (1.0 + std::exp(-v));
    }
    const double e = std::exp(v);
    return e / (1.0 + e);
}

namespace {

void check_shape(const Weights& theta)
{
    const std::size_t n = theta.n();
    const std::size_t k = theta.k();
    if (k == 0 || n == 0 || theta.w_enc.rows() != k || theta.w_enc.cols() != n ||
        theta.w_dec.rows() != n || theta.w_dec.cols() != k) {
        throw ShapeError("inconsistent autoencoder weight shapes");
    }
}

// out = F(W v + b)
void layer(const Matrix& w, const std::vector<double>& b, std::span<const double> v, std::span<double> out)
{
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const auto row = w.row(r);
        double a = b[r];
        for (std::size_t c = 0; c < row.size(); ++c) {
            a += row[c] * v[c];
        }
        out[r] = sigmoid(a);
    }
}

double squared_norm(std::span<const double> v)
{
    double s = 0.0;
    for (double e : v) {
        s += e * e;
    }
    return s;
}

void check_data(const Weights& theta, std::span<const std::vector<double>> data)
{
    check_shape(theta);
    if (data.empty()) {
        throw ArgumentError("cost: empty data set");
    }
    for (const auto& x : data) {
        if (x.size() != theta.n()) {
            throw ShapeError("cost: data vector of length " + std::to_string(x.size()) +
                             ", model expects " + std::to_string(theta.n()));
        }
    }
}

double clamp_activation(double rho_hat)
{
    return std::clamp(rho_hat, kActivationClamp, 1.0 - kActivationClamp);
}

}  // namespace

std::vector<double> encode(const Weights& theta, std::span<const double> x)
{
    check_shape(theta);
    if (x.size() != theta.n()) {
        throw ShapeError("encode: input of length " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(theta.n()));
    }
    std::vector<double> y(theta.k());
    layer(theta.w_enc, theta.b_enc, x, y);
    return y;
}

std::vector<double> decode(const Weights& theta, std::span<const double> y)
{
    check_shape(theta);
    if (y.size() != theta.k()) {
        throw ShapeError("decode: code of length " + std::to_string(y.size()) + ", model expects " +
                         std::to_string(theta.k()));
    }
    std::vector<double> z(theta.n());
    layer(theta.w_dec, theta.b_dec, y, z);
    return z;
}

ForwardResult forward(const Weights& theta, std::span<const double> x)
{
    ForwardResult r;
    r.y = encode(theta, x);
    r.z = decode(theta, r.y);
    return r;
}

double kl_divergence(double rho, double rho_hat)
{
    return rho * std::log(rho / rho_hat) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - rho_hat));
}

double cost_and_gradient(const Weights& theta, std::span<const std::vector<double>> data,
                         const CostConfig& cfg, std::span<double> grad)
{
    check_data(theta, data);
    cfg.validate();
    const std::size_t n = theta.n();
    const std::size_t k = theta.k();
    const bool want_grad = !grad.empty();
    if (want_grad && grad.size() != theta.flat_size()) {
        throw ShapeError("gradient buffer has the wrong size");
    }
    const bool decay = cfg.variant != CostVariant::ae;
    const bool sparse = cfg.variant == CostVariant::sae;
    const double inv_count = 1.0 / static_cast<double>(data.size());

    // Hidden activations for every vector; the sparsity term needs their mean
    // before any backward pass.
    Matrix hidden(data.size(), k);
    for (std::size_t d = 0; d < data.size(); ++d) {
        layer(theta.w_enc, theta.b_enc, data[d], hidden.row(d));
    }

    std::vector<double> rho_hat(k, 0.0);
    std::vector<double> sparsity_grad(k, 0.0);
    double kl_sum = 0.0;
    if (sparse) {
        for (std::size_t d = 0; d < data.size(); ++d) {
            const auto y = hidden.row(d);
            for (std::size_t j = 0; j < k; ++j) {
                rho_hat[j] += y[j];
            }
        }
        for (std::size_t j = 0; j < k; ++j) {
            const double raw = rho_hat[j] * inv_count;
            const double clamped = clamp_activation(raw);
            kl_sum += kl_divergence(cfg.rho, clamped);
            if (raw == clamped) {
                sparsity_grad[j] = cfg.eta * (-cfg.rho / clamped + (1.0 - cfg.rho) / (1.0 - clamped));
            }
        }
    }

    const std::size_t off_b_enc = n * k;
    const std::size_t off_w_dec = off_b_enc + k;
    const std::size_t off_b_dec = off_w_dec + n * k;
    if (want_grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
    }

    std::vector<double> z(n);
    std::vector<double> delta_out(n);
    std::vector<double> delta_hid(k);
    double recon = 0.0;
    for (std::size_t d = 0; d < data.size(); ++d) {
        const auto& x = data[d];
        const auto y = hidden.row(d);
        layer(theta.w_dec, theta.b_dec, y, z);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = z[i] - x[i];
            sq += e * e;
            delta_out[i] = e * z[i] * (1.0 - z[i]) * inv_count;
        }
        recon += 0.5 * sq;
        if (!want_grad) {
            continue;
        }
        for (std::size_t j = 0; j < k; ++j) {
            double back = sparsity_grad[j] * inv_count;
            for (std::size_t i = 0; i < n; ++i) {
                back += theta.w_dec(i, j) * delta_out[i];
            }
            delta_hid[j] = back * y[j] * (1.0 - y[j]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double* g = grad.data() + off_w_dec + i * k;
            for (std::size_t j = 0; j < k; ++j) {
                g[j] += delta_out[i] * y[j];
            }
            grad[off_b_dec + i] += delta_out[i];
        }
        for (std::size_t j = 0; j < k; ++j) {
            double* g = grad.data() + j * n;
            for (std::size_t i = 0; i < n; ++i) {
                g[i] += delta_hid[j] * x[i];
            }
            grad[off_b_enc + j] += delta_hid[j];
        }
    }

    double total = recon * inv_count;
    if (decay) {
        total += 0.5 * cfg.beta * (squared_norm(theta.w_enc.data()) + squared_norm(theta.w_dec.data()));
        if (want_grad) {
            const auto we = theta.w_enc.data();
            const auto wd = theta.w_dec.data();
            for (std::size_t i = 0; i < we.size(); ++i) {
                grad[i] += cfg.beta * we[i];
            }
            for (std::size_t i = 0; i < wd.size(); ++i) {
                grad[off_w_dec + i] += cfg.beta * wd[i];
            }
        }
    }
    if (sparse) {
        total += cfg.eta * kl_sum;
    }
    return total;
}

double cost(const Weights& theta, std::span<const std::vector<double>> data, const CostConfig& cfg)
{
    return cost_and_gradient(theta, data, cfg, {});
}

Weights gradient(const Weights& theta, std::span<const std::vector<double>> data, const CostConfig& cfg)
{
    check_shape(theta);
    std::vector<double> flat(theta.flat_size());
    cost_and_gradient(theta, data, cfg, flat);
    return Weights::unflatten(flat, theta.n(), theta.k());
}

Weights init_params(std::size_t n, std::size_t k, std::uint64_t seed)
{
    if (n == 0 || k == 0) {
        throw ArgumentError("init_params: n and k must be positive");
    }
    Weights w(n, k);
    const double r = std::sqrt(6.0 / static_cast<double>(n + k));
    Rng rng(seed);
    for (double& e : w.w_enc.data()) {
        e = uniform(rng, -r, r);
    }
    for (double& e : w.w_dec.data()) {
        e = uniform(rng, -r, r);
    }
    return w;
}

}  // namespace aeb
