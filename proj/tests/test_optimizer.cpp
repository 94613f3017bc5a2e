#include "aeb/error.hpp"
#include "aeb/optimizer.hpp"
#include "aeb/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aeb;

namespace {

double rosenbrock(std::span<const double> x, std::span<double> g)
{
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
}

// Closed-form minimizer by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<double> a, std::vector<double> b, std::size_t d)
{
    std::vector<long double> m(a.begin(), a.end()), v(b.begin(), b.end());
    for (std::size_t c = 0; c < d; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < d; ++r) {
            if (std::abs(m[r * d + c]) > std::abs(m[piv * d + c])) {
                piv = r;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            std::swap(m[c * d + j], m[piv * d + j]);
        }
        std::swap(v[c], v[piv]);
        for (std::size_t r = c + 1; r < d; ++r) {
            const long double f = m[r * d + c] / m[c * d + c];
            for (std::size_t j = c; j < d; ++j) {
                m[r * d + j] -= f * m[c * d + j];
            }
            v[r] -= f * v[c];
        }
    }
    std::vector<double> x(d);
    for (std::size_t c = d; c-- > 0;) {
        long double s = v[c];
        for (std::size_t j = c + 1; j < d; ++j) {
            s -= m[c * d + j] * x[j];
        }
        x[c] = static_cast<double>(s / m[c * d + c]);
    }
    return x;
}

}  // namespace

TEST(Minimize, ShiftedSphere)
{
    const std::vector<double> c = {1.0, -2.0, 3.5, 0.25, -7.0};
    Objective f = [&](std::span<const double> x, std::span<double> g) {
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            g[i] = x[i] - c[i];
            v += 0.5 * g[i] * g[i];
        }
        return v;
    };
    const auto r = minimize(f, std::vector<double>(5, 10.0));
    EXPECT_EQ(r.trace.stop_reason, StopReason::converged);
    EXPECT_LE(r.trace.iterations, 5u + 2);
    EXPECT_LE(r.trace.final_grad_norm, 1e-5);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_NEAR(r.x[i], c[i], 1e-5);
    }
}

TEST(Minimize, Rosenbrock)
{
    const auto r = minimize(rosenbrock, {-1.2, 1.0});
    EXPECT_LE(r.trace.iterations, 200u);
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
    EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(Minimize, CostHistoryNonIncreasing)
{
    const auto r = minimize(rosenbrock, {-1.2, 1.0});
    ASSERT_GE(r.trace.cost_history.size(), 2u);
    for (std::size_t i = 1; i < r.trace.cost_history.size(); ++i) {
        EXPECT_LE(r.trace.cost_history[i], r.trace.cost_history[i - 1]);
    }
    EXPECT_EQ(r.trace.cost_history.size(), r.trace.iterations + 1);
    EXPECT_GE(r.trace.evaluations, r.trace.iterations);
}

TEST(Minimize, RandomConvexQuadratics)
{
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 2 + uniform_index(rng, 19);
        // A = B^T B + I, strictly convex; f(x) = 0.5 (x - c)^T A (x - c) + f_min.
        std::vector<double> b(d * d), a(d * d, 0.0), c(d);
        for (auto& v : b) {
            v = uniform(rng, -1, 1);
        }
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t l = 0; l < d; ++l) {
                    a[i * d + j] += b[l * d + i] * b[l * d + j];
                }
            }
            a[i * d + i] += 1.0;
            c[i] = uniform(rng, -5, 5);
        }
        // Linear term A c gives the minimizer independently of the shifted form.
        std::vector<double> rhs(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                rhs[i] += a[i * d + j] * c[j];
            }
        }
        Objective f = [&](std::span<const double> x, std::span<double> g) {
            double v = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                double ae = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    ae += a[i * d + j] * (x[j] - c[j]);
                }
                g[i] = ae;
                v += 0.5 * (x[i] - c[i]) * ae;
            }
            return v;
        };
        LbfgsOptions opts;
        opts.history = d;
        opts.grad_tol = 1e-11;
        const auto r = minimize(f, std::vector<double>(d, 0.0), opts);
        const auto exact = solve(a, rhs, d);
        for (std::size_t i = 0; i < d; ++i) {
            EXPECT_NEAR(r.x[i], exact[i], 1e-8) << "dim " << d;
        }
    }
}

TEST(Minimize, NonFiniteStart)
{
    Objective f = [](std::span<const double>, std::span<double> g) {
        g[0] = 0.0;
        return std::nan("");
    };
    EXPECT_THROW(minimize(f, {0.0}), InputError);
}

TEST(Minimize, LineSearchFailureIsReported)
{
    // Gradient points the wrong way, so no step ever decreases the value.
    Objective f = [](std::span<const double> x, std::span<double> g) {
        g[0] = -1.0;
        return x[0];
    };
    const auto r = minimize(f, {0.0});
    EXPECT_EQ(r.trace.stop_reason, StopReason::line_search_failure);
    EXPECT_EQ(r.x[0], 0.0);
}

TEST(Minimize, IterationCap)
{
    LbfgsOptions opts;
    opts.max_iters = 3;
    const auto r = minimize(rosenbrock, {-1.2, 1.0}, opts);
    EXPECT_EQ(r.trace.stop_reason, StopReason::max_iters);
    EXPECT_EQ(r.trace.iterations, 3u);
}

TEST(Options, Validation)
{
    LbfgsOptions o;
    EXPECT_NO_THROW(o.validate());
    o.wolfe_c1 = 0.95;
    EXPECT_THROW(o.validate(), ArgumentError);
    o = {};
    o.history = 0;
    EXPECT_THROW(o.validate(), ArgumentError);
    EXPECT_STREQ(to_string(StopReason::converged), "converged");
}

namespace {

std::vector<std::vector<double>> random_unit_data(std::size_t count, std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<std::vector<double>> d(count, std::vector<double>(n));
    for (auto& v : d) {
        for (auto& e : v) {
            e = uniform(rng, 0.0, 10.0);
        }
    }
    return d;
}

}  // namespace

TEST(Train, IdentityCapableFits)
{
    const auto data = random_unit_data(50, 5, 3);
    CostConfig cfg;
    cfg.variant = CostVariant::ae;
    const auto r = train(data, 5, 5, cfg, {}, 9);
    ASSERT_GE(r.trace.cost_history.size(), 2u);
    EXPECT_LT(r.trace.cost_history.back(), 0.1 * r.trace.cost_history.front());
    EXPECT_EQ(r.model.n(), 5u);
    EXPECT_EQ(r.model.k(), 5u);
}

TEST(Train, Deterministic)
{
    const auto data = random_unit_data(30, 6, 4);
    CostConfig cfg;
    LbfgsOptions opts;
    opts.max_iters = 50;
    const auto a = train(data, 6, 2, cfg, opts, 1);
    const auto b = train(data, 6, 2, cfg, opts, 1);
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(a.trace.cost_history, b.trace.cost_history);
}

TEST(Train, SigmaFromTrainingData)
{
    const auto data = random_unit_data(20, 4, 8);
    LbfgsOptions opts;
    opts.max_iters = 5;
    const auto r = train(data, 4, 2, {}, opts, 1);
    EXPECT_EQ(r.model.sigma, estimate_sigma(data));
}

TEST(Train, Errors)
{
    EXPECT_THROW(train(std::vector<std::vector<double>>{}, 4, 2, {}, {}, 1), ArgumentError);
    const auto data = random_unit_data(5, 4, 1);
    EXPECT_THROW(train(data, 5, 2, {}, {}, 1), ShapeError);
}
