#include "commands.hpp"

#include "sidecar.hpp"

#include "aeb/codec.hpp"
#include "aeb/error.hpp"
#include "aeb/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

namespace aeb::cli {

namespace {

ResidualPrecision precision_from_bits(unsigned bits)
{
    if (bits == 32) {
        return ResidualPrecision::f32;
    }
    if (bits == 64) {
        return ResidualPrecision::f64;
    }
    throw UsageError("residual bits must be 32 or 64");
}

WindowMode mode_from(const std::string& text)
{
    try {
        return parse_window_mode(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

std::size_t default_stride(WindowMode mode, std::size_t window, std::size_t stride)
{
    if (stride != 0) {
        return stride;
    }
    return mode == WindowMode::temporal ? window : 1;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::filesystem::path layout_path_for(const std::filesystem::path& stream)
{
    return std::filesystem::path(stream.string() + ".meta");
}

void print_row_table(const std::vector<EvalRow>& rows)
{
    std::printf("%-10s %8s %9s %11s %11s  %s\n", "method", "bound", "cr", "eps_abs", "eps_rel", "status");
    for (const auto& r : rows) {
        std::printf("%-10s %8.4g %9.3f %11.5g %11.5g  %s\n", r.method.c_str(), r.bound, r.cr, r.eps_abs, r.eps_rel,
                    r.status.c_str());
    }
}

}  // namespace

int run_train(const TrainArgs& args)
{
    const WindowMode mode = mode_from(args.mode);
    const ResidualPrecision precision = precision_from_bits(args.residual_bits);
    CostConfig cost = args.cost;
    try {
        cost.variant = parse_cost_variant(args.variant);
        cost.validate();
        args.optimizer.validate();
    } catch (const ArgumentError& e) {
        throw UsageError(e.what());
    }

    SensorMatrix data;
    if (!args.csv.empty()) {
        CsvSchema schema;
        schema.timestamp_column = args.timestamp_column;
        data = fill_missing(load_csv(args.csv, schema));
    } else {
        data = synth_dataset(args.synth_sensors, args.synth_steps, args.seed, args.synth_noise);
    }
    const std::size_t window = mode == WindowMode::spatial && args.window == 0 ? data.sensors() : args.window;
    auto windows = make_windows(data, mode, window, default_stride(mode, window, args.stride));

    if (args.exclude_fold) {
        const auto split = split_folds(windows.size(), args.folds, args.seed);
        if (*args.exclude_fold >= args.folds) {
            throw UsageError("excluded fold must be below the fold count");
        }
        std::vector<DataVector> kept;
        for (auto i : split.complement(*args.exclude_fold)) {
            kept.push_back(windows[i]);
        }
        windows = std::move(kept);
    }
    if (args.k >= window) {
        std::fprintf(stderr, "warning: code width %zu is not smaller than the window %zu; no compression\n", args.k,
                     window);
    }

    const auto result = train(windows, window, args.k, cost, args.optimizer, args.seed);
    ModelFile file{result.model, args.bound, precision};
    save_model(file, args.out);

    const auto& tr = result.trace;
    std::printf("vectors=%zu n=%zu k=%zu variant=%s sigma=%.6g\n", windows.size(), window, args.k,
                to_string(cost.variant), result.model.sigma.sigma());
    std::printf("iterations=%zu evaluations=%zu initial_cost=%.9g final_cost=%.9g grad_norm=%.3g stop=%s\n",
                tr.iterations, tr.evaluations, tr.cost_history.front(), tr.cost_history.back(), tr.final_grad_norm,
                to_string(tr.stop_reason));
    return 0;
}

int run_compress(const CompressArgs& args)
{
    const ModelFile file = load_model(args.model);
    const WindowMode mode = mode_from(args.mode);
    const double bound = args.bound.value_or(file.default_bound);
    if (!(bound >= 0.0) || !std::isfinite(bound)) {
        throw UsageError("bound must be nonnegative");
    }
    CsvSchema schema;
    schema.timestamp_column = args.timestamp_column;
    const SensorMatrix data = fill_missing(load_csv(args.input, schema));
    const std::size_t n = file.model.n();
    const std::size_t k = file.model.k();
    const std::size_t stride = default_stride(mode, n, args.stride);
    const auto windows = make_windows(data, mode, n, stride);

    std::vector<std::uint8_t> stream;
    std::size_t bits = 0;
    for (const auto& v : windows) {
        const Packet packet = compress(v.entries, file.model, bound, file.precision);
        append_frame(stream, serialize_packet(packet, n, k, file.precision));
        bits += packet_size_bits(packet, n, k, file.precision).total();
    }
    write_bytes(args.out, stream);

    StreamLayout layout;
    layout.mode = mode;
    layout.window = n;
    layout.stride = stride;
    layout.bound = bound;
    layout.packets = windows.size();
    layout.timestamp_column = args.timestamp_column;
    layout.sensor_ids = data.sensor_ids;
    layout.timestamps = data.timestamps;
    write_layout(layout_path_for(args.out), layout);

    const double raw = static_cast<double>(raw_bits(n) * windows.size());
    std::printf("packets=%zu bytes=%zu payload_bits=%zu cr=%.3f\n", windows.size(), stream.size(), bits,
                compression_ratio(static_cast<double>(bits), 0.0, raw));
    return 0;
}

int run_decompress(const DecompressArgs& args)
{
    const ModelFile file = load_model(args.model);
    const std::size_t n = file.model.n();
    const std::size_t k = file.model.k();
    const StreamLayout layout = read_layout(args.layout.empty() ? layout_path_for(args.input) : args.layout);
    if (layout.window != n) {
        throw FormatError("stream was cut into windows of " + std::to_string(layout.window) +
                          " but the model expects " + std::to_string(n));
    }

    const auto frames = split_frames(read_bytes(args.input));
    if (frames.size() != layout.packets) {
        throw FramingError(frames.size(), "expected " + std::to_string(layout.packets) + " packets, found " +
                                              std::to_string(frames.size()));
    }

    SensorMatrix out;
    out.sensor_ids = layout.sensor_ids;
    out.timestamps = layout.timestamps;
    out.values = Matrix(layout.sensor_ids.size(), layout.timestamps.size(), std::nan(""));

    // Windows come in the same order make_windows produced them.
    const std::size_t steps = out.steps();
    std::size_t sensor = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        Packet packet;
        try {
            packet = deserialize_packet(frames[i], n, k, file.precision);
        } catch (const FormatError& e) {
            throw FramingError(i, e.what());
        }
        const auto q = decompress(packet, file.model);
        if (layout.mode == WindowMode::temporal) {
            if (start + n > steps) {
                start = 0;
                ++sensor;
            }
            if (sensor >= out.sensors()) {
                throw FramingError(i, "more packets than the layout has windows");
            }
            for (std::size_t j = 0; j < n; ++j) {
                out.values(sensor, start + j) = q[j];
            }
            start += layout.stride;
        } else {
            if (start >= steps || n != out.sensors()) {
                throw FramingError(i, "more packets than the layout has windows");
            }
            for (std::size_t s = 0; s < n; ++s) {
                out.values(s, start) = q[s];
            }
            start += layout.stride;
        }
    }
    write_sensor_csv(args.out, out, layout.timestamp_column);
    std::printf("packets=%zu readings=%zu\n", frames.size(), out.sensors() * out.steps());

    if (args.verify.empty()) {
        return 0;
    }
    CsvSchema schema;
    schema.timestamp_column = layout.timestamp_column;
    const SensorMatrix original = load_csv(args.verify, schema);
    std::map<std::string, std::size_t> row_of;
    for (std::size_t s = 0; s < out.sensors(); ++s) {
        row_of[out.sensor_ids[s]] = s;
    }
    std::map<std::int64_t, std::size_t> col_of;
    for (std::size_t t = 0; t < out.steps(); ++t) {
        col_of[out.timestamps[t]] = t;
    }
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t s = 0; s < original.sensors(); ++s) {
        const auto r = row_of.find(original.sensor_ids[s]);
        if (r == row_of.end()) {
            continue;
        }
        for (std::size_t t = 0; t < original.steps(); ++t) {
            const auto c = col_of.find(original.timestamps[t]);
            const double p = original.values(s, t);
            if (c == col_of.end() || std::isnan(p)) {
                continue;
            }
            const double q = out.values(r->second, c->second);
            if (std::isnan(q)) {
                continue;
            }
            const double err = std::abs(p - q);
            worst = std::max(worst, err);
            ++checked;
            if (err > layout.bound) {
                ++violations;
            }
        }
    }
    std::printf("verify: checked=%zu max_error=%.6g bound=%.6g violations=%zu\n", checked, worst, layout.bound,
                violations);
    return violations == 0 ? 0 : 1;
}

int run_bench(BenchArgs args)
{
    BenchConfig& cfg = args.cfg;
    cfg.mode = mode_from(args.mode);
    cfg.precision = precision_from_bits(args.residual_bits);
    cfg.variants.clear();
    try {
        for (const auto& v : args.variants) {
            cfg.variants.push_back(parse_cost_variant(v));
        }
        cfg.validate();
    } catch (const ArgumentError& e) {
        throw UsageError(e.what());
    }
    const BenchOutput out = aeb::run_bench(cfg);
    write_report(args.out, cfg, out);
    print_row_table(out.rows);
    std::printf("report written to %s\n", args.out.string().c_str());
    return 0;
}

int run_report(const ReportArgs& args)
{
    const auto dir = std::filesystem::is_directory(args.results) ? args.results : args.results.parent_path();
    const auto csv = std::filesystem::is_directory(args.results) ? args.results / "results.csv" : args.results;
    const auto rows = read_results_csv(csv);
    const auto out = args.out.empty() ? dir : args.out;
    std::filesystem::create_directories(out);
    write_plots(out, rows);
    print_row_table(rows);
    return 0;
}

}  // namespace aeb::cli
