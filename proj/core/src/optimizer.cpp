#include "aeb/optimizer.hpp"

#include "aeb/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

namespace aeb {

void LbfgsOptions::validate() const
{
    if (history == 0 || max_iters == 0 || max_line_search_steps == 0) {
        throw ArgumentError("L-BFGS history, max_iters and max_line_search_steps must be positive");
    }
    if (!(grad_tol > 0.0)) {
        throw ArgumentError("grad_tol must be positive");
    }
    if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
        throw ArgumentError("Wolfe constants must satisfy 0 < c1 < c2 < 1");
    }
}

const char* to_string(StopReason r)
{
    switch (r) {
    case StopReason::converged:
        return "converged";
    case StopReason::max_iters:
        return "max_iters";
    case StopReason::line_search_failure:
        return "line_search_failure";
    }
    return "?";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double inf_norm(std::span<const double> v)
{
    double m = 0.0;
    for (double e : v) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

struct Point {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;  // directional derivative
    std::vector<double> x;
    std::vector<double> g;
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db); NaN when the
// cubic has no real minimizer.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db)
{
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (!(disc >= 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return b - (b - a) * (db + d2 - d1) / denom;
}

class LineSearch {
public:
    LineSearch(const Objective& objective, const LbfgsOptions& opts, std::span<const double> x0,
               double f0, std::span<const double> dir, double slope0, std::size_t& evaluations)
        : objective_(objective), opts_(opts), x0_(x0), dir_(dir), f0_(f0), slope0_(slope0),
          evaluations_(evaluations)
    {
    }

    /// A step satisfying the strong Wolfe conditions. When the evaluation
    /// budget runs out, the best sufficient-decrease point seen is returned
    /// instead; an empty result means no such point was found.
    std::optional<Point> run()
    {
        Point prev{0.0, f0_, slope0_, {}, {}};
        double alpha = 1.0;
        for (std::size_t i = 0; i < opts_.max_line_search_steps; ++i) {
            Point cur = evaluate(alpha);
            if (!armijo(cur) || (i > 0 && cur.f >= prev.f)) {
                return zoom(std::move(prev), std::move(cur));
            }
            note_candidate(cur);
            if (std::abs(cur.slope) <= -opts_.wolfe_c2 * slope0_) {
                return cur;
            }
            if (cur.slope >= 0.0) {
                return zoom(std::move(cur), std::move(prev));
            }
            prev = std::move(cur);
            alpha *= 2.0;
        }
        return fallback();
    }

private:
    bool armijo(const Point& p) const
    {
        if (!std::isfinite(p.f)) {
            return false;
        }
        if (p.f <= f0_ + opts_.wolfe_c1 * p.alpha * slope0_) {
            return true;
        }
        // Once the predicted decrease is below the resolution of f, fall back
        // to the approximate Wolfe test on the slope.
        const bool in_noise = p.alpha * -slope0_ <= 1e-10 * std::abs(f0_);
        return in_noise && p.f <= f0_ && p.slope <= (1.0 - 2.0 * opts_.wolfe_c1) * -slope0_;
    }

    Point evaluate(double alpha)
    {
        Point p;
        p.alpha = alpha;
        p.x.resize(x0_.size());
        p.g.resize(x0_.size());
        for (std::size_t i = 0; i < x0_.size(); ++i) {
            p.x[i] = x0_[i] + alpha * dir_[i];
        }
        p.f = objective_(p.x, p.g);
        ++evaluations_;
        ++used_;
        p.slope = all_finite(p.g) ? dot(p.g, dir_) : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(p.slope)) {
            p.f = std::numeric_limits<double>::infinity();
        }
        return p;
    }

    void note_candidate(const Point& p)
    {
        if (p.alpha > 0.0 && armijo(p) && (!best_ || p.f < best_->f)) {
            best_ = p;
        }
    }

    std::optional<Point> fallback()
    {
        if (best_ && best_->f < f0_) {
            return best_;
        }
        return std::nullopt;
    }

    // lo satisfies sufficient decrease and has the lower value; the minimizer
    // is bracketed between lo and hi.
    std::optional<Point> zoom(Point lo, Point hi)
    {
        while (used_ < opts_.max_line_search_steps) {
            const double a = lo.alpha;
            const double b = hi.alpha;
            const double width = std::abs(b - a);
            if (width <= 1e-16 * std::max(1.0, std::abs(a))) {
                break;
            }
            double alpha = std::numeric_limits<double>::quiet_NaN();
            if (std::isfinite(hi.f) && std::isfinite(hi.slope)) {
                alpha = cubic_minimizer(a, lo.f, lo.slope, b, hi.f, hi.slope);
            }
            const double lo_edge = std::min(a, b) + 0.1 * width;
            const double hi_edge = std::max(a, b) - 0.1 * width;
            if (!std::isfinite(alpha) || alpha < lo_edge || alpha > hi_edge) {
                alpha = 0.5 * (a + b);
            }
            Point cur = evaluate(alpha);
            if (!armijo(cur) || cur.f > lo.f || (cur.f == lo.f && lo.alpha > 0.0)) {
                hi = std::move(cur);
                continue;
            }
            note_candidate(cur);
            if (std::abs(cur.slope) <= -opts_.wolfe_c2 * slope0_) {
                return cur;
            }
            if (cur.slope * (b - a) >= 0.0) {
                hi = std::move(lo);
            }
            lo = std::move(cur);
        }
        note_candidate(lo);
        return fallback();
    }

    const Objective& objective_;
    const LbfgsOptions& opts_;
    std::span<const double> x0_;
    std::span<const double> dir_;
    double f0_;
    double slope0_;
    std::size_t& evaluations_;
    std::size_t used_ = 0;
    std::optional<Point> best_;
};

struct CorrectionPair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;  // 1 / (s . y)
};

// d = -H g via the two-loop recursion.
std::vector<double> search_direction(const std::deque<CorrectionPair>& pairs, std::span<const double> g)
{
    std::vector<double> q(g.begin(), g.end());
    std::vector<double> alpha(pairs.size());
    for (std::size_t i = pairs.size(); i-- > 0;) {
        alpha[i] = pairs[i].rho * dot(pairs[i].s, q);
        for (std::size_t j = 0; j < q.size(); ++j) {
            q[j] -= alpha[i] * pairs[i].y[j];
        }
    }
    if (!pairs.empty()) {
        const auto& last = pairs.back();
        const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
        for (double& e : q) {
            e *= gamma;
        }
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double beta = pairs[i].rho * dot(pairs[i].y, q);
        for (std::size_t j = 0; j < q.size(); ++j) {
            q[j] += (alpha[i] - beta) * pairs[i].s[j];
        }
    }
    for (double& e : q) {
        e = -e;
    }
    return q;
}

}  // namespace

MinimizeResult minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& opts)
{
    opts.validate();
    if (!all_finite(x0)) {
        throw InputError("minimize: non-finite starting point");
    }
    MinimizeResult result;
    auto& trace = result.trace;
    std::vector<double> x = std::move(x0);
    std::vector<double> g(x.size());
    double f = objective(x, g);
    ++trace.evaluations;
    if (!std::isfinite(f) || !all_finite(g)) {
        throw InputError("minimize: non-finite cost or gradient at the starting point");
    }
    trace.cost_history.push_back(f);

    std::deque<CorrectionPair> pairs;
    trace.stop_reason = StopReason::max_iters;
    while (true) {
        if (inf_norm(g) <= opts.grad_tol) {
            trace.stop_reason = StopReason::converged;
            break;
        }
        if (trace.iterations >= opts.max_iters) {
            break;
        }
        std::vector<double> dir = search_direction(pairs, g);
        double slope = dot(g, dir);
        if (!(slope < 0.0)) {
            pairs.clear();
            dir = search_direction(pairs, g);
            slope = dot(g, dir);
        }
        auto step = LineSearch(objective, opts, x, f, dir, slope, trace.evaluations).run();
        if (!step && !pairs.empty()) {
            // Retry once along steepest descent with the history dropped.
            pairs.clear();
            dir = search_direction(pairs, g);
            slope = dot(g, dir);
            step = LineSearch(objective, opts, x, f, dir, slope, trace.evaluations).run();
        }
        if (!step) {
            trace.stop_reason = StopReason::line_search_failure;
            break;
        }

        CorrectionPair pair;
        pair.s.resize(x.size());
        pair.y.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            pair.s[i] = step->x[i] - x[i];
            pair.y[i] = step->g[i] - g[i];
        }
        const double sy = dot(pair.s, pair.y);
        const double scale = std::sqrt(dot(pair.s, pair.s) * dot(pair.y, pair.y));
        if (sy > 1e-10 * scale && sy > 0.0) {
            pair.rho = 1.0 / sy;
            pairs.push_back(std::move(pair));
            if (pairs.size() > opts.history) {
                pairs.pop_front();
            }
        }
        x = std::move(step->x);
        g = std::move(step->g);
        f = step->f;
        trace.cost_history.push_back(f);
        ++trace.iterations;
    }
    trace.final_grad_norm = inf_norm(g);
    result.x = std::move(x);
    return result;
}

TrainResult train(std::span<const std::vector<double>> data, std::size_t n, std::size_t k,
                  const CostConfig& cfg, const LbfgsOptions& opts, std::uint64_t seed)
{
    if (data.empty()) {
        throw ArgumentError("train: empty training set");
    }
    for (const auto& v : data) {
        if (v.size() != n) {
            throw ShapeError("train: vector of length " + std::to_string(v.size()) + ", expected " +
                             std::to_string(n));
        }
    }
    cfg.validate();
    opts.validate();
    const SpheringScale sigma = estimate_sigma(data);
    std::vector<std::vector<double>> unit;
    unit.reserve(data.size());
    for (const auto& v : data) {
        unit.push_back(normalize(v, sigma));
    }

    Weights shape(n, k);
    const Objective objective = [&](std::span<const double> flat, std::span<double> grad) {
        shape.assign(flat);
        return cost_and_gradient(shape, unit, cfg, grad);
    };
    auto fit = minimize(objective, init_params(n, k, seed).flatten(), opts);

    TrainResult out;
    out.model.weights = Weights::unflatten(fit.x, n, k);
    out.model.sigma = sigma;
    out.trace = std::move(fit.trace);
    return out;
}

TrainResult train(std::span<const DataVector> data, std::size_t n, std::size_t k, const CostConfig& cfg,
                  const LbfgsOptions& opts, std::uint64_t seed)
{
    std::vector<std::vector<double>> raw;
    raw.reserve(data.size());
    for (const auto& v : data) {
        raw.push_back(v.entries);
    }
    return train(std::span<const std::vector<double>>(raw), n, k, cfg, opts, seed);
}

}  // namespace aeb
