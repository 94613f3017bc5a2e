#include "aeb/bench.hpp"

#include "aeb/baselines.hpp"
#include "aeb/codec.hpp"
#include "aeb/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <thread>

namespace aeb {

namespace {

const std::vector<std::string> kKnownMethods = {"ae", "ltc", "lzw", "pca", "dct"};

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t h = splitmix(base);
    for (auto t : tags) {
        h = splitmix(h ^ t);
    }
    return h;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

enum class Kind { ae, pca, dct, ltc, lzw };

struct Cell {
    Kind kind;
    std::string method;
    CostVariant variant = CostVariant::ae;
    std::size_t k = 0;
    std::size_t fold = 0;
    std::size_t repetition = 0;
};

struct Accum {
    double sum_abs = 0.0;
    double sum_sq_err = 0.0;
    double sum_sq_ref = 0.0;
    std::size_t readings = 0;
    std::size_t bits_code = 0;
    std::size_t bits_residual = 0;
    std::size_t bits_raw = 0;
    double seconds = 0.0;
    std::string error;

    void add(std::span<const double> p, std::span<const double> q)
    {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = p[i] - q[i];
            sum_abs += std::abs(d);
            sum_sq_err += d * d;
            sum_sq_ref += p[i] * p[i];
        }
        readings += p.size();
        bits_raw += raw_bits(p.size());
    }

    void merge(const Accum& o)
    {
        sum_abs += o.sum_abs;
        sum_sq_err += o.sum_sq_err;
        sum_sq_ref += o.sum_sq_ref;
        readings += o.readings;
        bits_code += o.bits_code;
        bits_residual += o.bits_residual;
        bits_raw += o.bits_raw;
        seconds += o.seconds;
    }
};

struct CellResult {
    std::vector<Accum> per_bound;
    std::optional<TrainingRecord> training;
    std::string error;  // whole-cell failure
};

double f32(double v)
{
    return static_cast<double>(static_cast<float>(v));
}

// Runs `code` once per bound, recording failures per bound.
template <typename Fn>
void sweep_bounds(const BenchConfig& cfg, CellResult& out, Fn&& code)
{
    out.per_bound.resize(cfg.bounds.size());
    for (std::size_t b = 0; b < cfg.bounds.size(); ++b) {
        auto& acc = out.per_bound[b];
        const auto t0 = Clock::now();
        try {
            code(cfg.bounds[b], acc);
        } catch (const std::exception& e) {
            acc = Accum{};
            acc.error = e.what();
        }
        acc.seconds = seconds_since(t0);
    }
}

void add_residual_coded(std::span<const double> p, std::span<const double> q, double bound,
                        ResidualPrecision precision, std::size_t code_bits, Accum& acc)
{
    const auto eps = encode_residual(p, q, bound, precision);
    const auto out = apply_residual(q, eps);
    acc.add(p, out);
    acc.bits_code += code_bits;
    acc.bits_residual += p.size() + bits_of(precision) * eps.transmitted();
}

CellResult run_cell(const BenchConfig& cfg, const Cell& cell, const std::vector<DataVector>& windows,
                    const FoldSplit& split)
{
    CellResult out;
    const auto test_idx = split.members(cell.fold);
    const std::size_t n = windows.front().size();
    try {
        switch (cell.kind) {
        case Kind::ae: {
            std::vector<DataVector> train_set;
            for (std::size_t i : split.complement(cell.fold)) {
                train_set.push_back(windows[i]);
            }
            CostConfig cost = cfg.cost;
            cost.variant = cell.variant;
            const auto seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(cell.variant), cell.k, cell.fold,
                                                     cell.repetition});
            const auto fit = train(train_set, n, cell.k, cost, cfg.optimizer, seed);
            TrainingRecord rec;
            rec.method = cell.method;
            rec.fold = cell.fold;
            rec.repetition = cell.repetition;
            rec.iterations = fit.trace.iterations;
            rec.initial_cost = fit.trace.cost_history.front();
            rec.final_cost = fit.trace.cost_history.back();
            rec.final_grad_norm = fit.trace.final_grad_norm;
            rec.stop_reason = to_string(fit.trace.stop_reason);
            rec.sigma = fit.model.sigma.sigma();
            out.training = rec;
            const auto& model = fit.model;
            sweep_bounds(cfg, out, [&](double bound, Accum& acc) {
                for (std::size_t i : test_idx) {
                    const auto& p = windows[i].entries;
                    const auto pkt = compress(p, model, bound, cfg.precision);
                    const auto wire = serialize_packet(pkt, n, cell.k, cfg.precision);
                    const auto received = deserialize_packet(wire, n, cell.k, cfg.precision);
                    const auto q = decompress(received, model);
                    acc.add(p, q);
                    const auto bits = packet_size_bits(received, n, cell.k, cfg.precision);
                    acc.bits_code += bits.bits_y;
                    acc.bits_residual += bits.bits_eps;
                }
            });
            break;
        }
        case Kind::pca: {
            std::vector<std::vector<double>> train_set;
            for (std::size_t i : split.complement(cell.fold)) {
                train_set.push_back(windows[i].entries);
            }
            const auto basis = pca_fit(std::span<const std::vector<double>>(train_set), cell.k);
            std::vector<std::vector<double>> recon;
            for (std::size_t i : test_idx) {
                auto coeffs = pca_compress(windows[i].entries, basis);
                for (double& c : coeffs) {
                    c = f32(c);
                }
                recon.push_back(pca_decompress(coeffs, basis));
            }
            sweep_bounds(cfg, out, [&](double bound, Accum& acc) {
                for (std::size_t t = 0; t < test_idx.size(); ++t) {
                    add_residual_coded(windows[test_idx[t]].entries, recon[t], bound, cfg.precision, 32 * cell.k, acc);
                }
            });
            break;
        }
        case Kind::dct: {
            std::vector<std::vector<double>> recon;
            for (std::size_t i : test_idx) {
                auto coeffs = dct_compress(windows[i].entries, cell.k);
                for (auto& c : coeffs) {
                    c.value = f32(c.value);
                }
                recon.push_back(dct_decompress(coeffs, n));
            }
            sweep_bounds(cfg, out, [&](double bound, Accum& acc) {
                for (std::size_t t = 0; t < test_idx.size(); ++t) {
                    add_residual_coded(windows[test_idx[t]].entries, recon[t], bound, cfg.precision,
                                       dct_bits(cell.k, n), acc);
                }
            });
            break;
        }
        case Kind::ltc:
            sweep_bounds(cfg, out, [&](double bound, Accum& acc) {
                for (std::size_t i : test_idx) {
                    const auto& p = windows[i].entries;
                    const auto segs = ltc_compress(p, bound);
                    acc.add(p, ltc_decompress(segs));
                    acc.bits_code += ltc_bits(segs);
                }
            });
            break;
        case Kind::lzw:
            sweep_bounds(cfg, out, [&](double bound, Accum& acc) {
                for (std::size_t i : test_idx) {
                    const auto& p = windows[i].entries;
                    const auto bytes = lzw_truncated_compress(p, bound, cfg.lzw_int_bits);
                    acc.add(p, lzw_truncated_decompress(bytes, p.size()));
                    acc.bits_code += lzw_truncated_bits(bytes);
                }
            });
            break;
        }
    } catch (const std::exception& e) {
        out.error = e.what();
        out.per_bound.assign(cfg.bounds.size(), Accum{});
    }
    return out;
}

std::vector<Cell> enumerate_cells(const BenchConfig& cfg, std::vector<std::string>& method_order)
{
    std::vector<Cell> cells;
    auto add_folds = [&](Cell base, std::size_t reps) {
        for (std::size_t f = 0; f < cfg.folds; ++f) {
            for (std::size_t r = 0; r < reps; ++r) {
                Cell c = base;
                c.fold = f;
                c.repetition = r;
                cells.push_back(c);
            }
        }
    };
    for (const auto& m : cfg.methods) {
        if (m == "ae") {
            for (auto v : cfg.variants) {
                for (auto k : cfg.ks) {
                    Cell c{Kind::ae, std::string(to_string(v)) + "-k" + std::to_string(k), v, k};
                    method_order.push_back(c.method);
                    add_folds(c, cfg.repetitions);
                }
            }
        } else if (m == "pca" || m == "dct") {
            for (auto k : cfg.ks) {
                const bool pca = m == "pca";
                Cell c{pca ? Kind::pca : Kind::dct, std::string(pca ? "PCA" : "DCT") + "-k" + std::to_string(k)};
                c.k = k;
                method_order.push_back(c.method);
                // Deterministic given the fold, so one repetition suffices.
                add_folds(c, 1);
            }
        } else {
            const bool ltc = m == "ltc";
            Cell c{ltc ? Kind::ltc : Kind::lzw, ltc ? "LTC" : "LZW"};
            method_order.push_back(c.method);
            add_folds(c, 1);
        }
    }
    return cells;
}

}  // namespace

void BenchConfig::validate() const
{
    if (methods.empty() || ks.empty() || bounds.empty()) {
        throw ArgumentError("bench: method, k and bound sweeps must be non-empty");
    }
    for (const auto& m : methods) {
        if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end()) {
            throw ArgumentError("bench: unknown method '" + m + "'");
        }
        if (m == "ae" && variants.empty()) {
            throw ArgumentError("bench: variant sweep must be non-empty");
        }
    }
    if (folds < 2) {
        throw ArgumentError("bench: folds must be at least 2");
    }
    if (repetitions < 1) {
        throw ArgumentError("bench: repetitions must be at least 1");
    }
    for (double b : bounds) {
        if (!(b >= 0.0) || !std::isfinite(b)) {
            throw ArgumentError("bench: bounds must be nonnegative and finite");
        }
    }
    for (auto k : ks) {
        if (k == 0) {
            throw ArgumentError("bench: k must be positive");
        }
    }
    if (mode == WindowMode::temporal && window == 0) {
        throw ArgumentError("bench: temporal mode needs a window size");
    }
    cost.validate();
    optimizer.validate();
}

unsigned resolve_threads(unsigned requested)
{
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("AEB_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) {
            n = std::min(n, static_cast<unsigned>(cap));
        }
    }
    return std::max(1u, n);
}

SensorMatrix load_bench_data(const BenchConfig& cfg)
{
    if (!cfg.csv_path.empty()) {
        return fill_missing(load_csv(cfg.csv_path, cfg.schema));
    }
    return synth_dataset(cfg.synth_sensors, cfg.synth_steps, cfg.seed, cfg.synth_noise);
}

BenchOutput run_bench(const BenchConfig& cfg)
{
    cfg.validate();
    const SensorMatrix data = load_bench_data(cfg);
    const std::size_t window = cfg.mode == WindowMode::spatial && cfg.window == 0 ? data.sensors() : cfg.window;
    const std::size_t stride = cfg.stride != 0 ? cfg.stride : (cfg.mode == WindowMode::temporal ? window : 1);
    const auto windows = make_windows(data, cfg.mode, window, stride);
    const auto split = split_folds(windows.size(), cfg.folds, cfg.seed);

    std::vector<std::string> method_order;
    const auto cells = enumerate_cells(cfg, method_order);
    std::vector<CellResult> results(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            results[i] = run_cell(cfg, cells[i], windows, split);
        }
    };
    const unsigned threads = std::min<std::size_t>(resolve_threads(cfg.threads), std::max<std::size_t>(cells.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }

    BenchOutput out;
    out.vectors = windows.size();
    std::map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < method_order.size(); ++i) {
        rank.emplace(method_order[i], i);
    }
    std::vector<std::size_t> bound_order(cfg.bounds.size());
    std::iota(bound_order.begin(), bound_order.end(), std::size_t{0});
    std::stable_sort(bound_order.begin(), bound_order.end(),
                     [&](std::size_t a, std::size_t b) { return cfg.bounds[a] < cfg.bounds[b]; });
    for (const auto& method : method_order) {
        for (const std::size_t b : bound_order) {
            Accum total;
            std::size_t cell_count = 0;
            std::size_t failed = 0;
            std::string first_error;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (cells[c].method != method) {
                    continue;
                }
                ++cell_count;
                const auto& r = results[c];
                const std::string& err = !r.error.empty() ? r.error : r.per_bound[b].error;
                if (!err.empty()) {
                    ++failed;
                    if (first_error.empty()) {
                        first_error = err;
                    }
                    continue;
                }
                total.merge(r.per_bound[b]);
            }
            EvalRow row;
            row.method = method;
            row.bound = cfg.bounds[b];
            row.bits_code = total.bits_code;
            row.bits_residual = total.bits_residual;
            row.bits_raw = total.bits_raw;
            if (total.bits_raw > 0) {
                row.cr = compression_ratio(static_cast<double>(total.bits_code), static_cast<double>(total.bits_residual),
                                           static_cast<double>(total.bits_raw));
                row.eps_abs = total.sum_abs / static_cast<double>(total.readings);
                row.eps_rel = total.sum_sq_ref > 0.0 ? 100.0 * total.sum_sq_err / total.sum_sq_ref : 0.0;
            } else {
                row.cr = row.eps_abs = row.eps_rel = std::nan("");
            }
            if (failed > 0) {
                row.status = "failed " + std::to_string(failed) + "/" + std::to_string(cell_count) + ": " + first_error;
            }
            EvalRow timed = row;
            timed.wall_time = total.seconds;
            row.wall_time = cfg.record_timing ? total.seconds : 0.0;
            out.rows.push_back(std::move(row));
            out.timings.push_back(std::move(timed));
        }
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (results[c].training) {
            out.training.push_back(*results[c].training);
        } else if (cells[c].kind == Kind::ae) {
            TrainingRecord rec;
            rec.method = cells[c].method;
            rec.fold = cells[c].fold;
            rec.repetition = cells[c].repetition;
            rec.stop_reason = "error: " + results[c].error;
            out.training.push_back(rec);
        }
    }
    std::stable_sort(out.training.begin(), out.training.end(), [&](const TrainingRecord& a, const TrainingRecord& b) {
        const auto ra = rank.at(a.method);
        const auto rb = rank.at(b.method);
        if (ra != rb) {
            return ra < rb;
        }
        if (a.fold != b.fold) {
            return a.fold < b.fold;
        }
        return a.repetition < b.repetition;
    });
    return out;
}

}  // namespace aeb
