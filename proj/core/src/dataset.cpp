#include "aeb/dataset.hpp"

#include "aeb/error.hpp"
#include "aeb/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace aeb {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

bool parse_int(const std::string& s, std::int64_t& out)
{
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool is_missing_token(const std::string& s)
{
    return s.empty() || s == "NaN" || s == "nan" || s == "NA";
}

bool parse_real(const std::string& s, double& out)
{
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

}  // namespace

const char* to_string(WindowMode mode)
{
    return mode == WindowMode::temporal ? "temporal" : "spatial";
}

WindowMode parse_window_mode(const std::string& text)
{
    if (text == "temporal") {
        return WindowMode::temporal;
    }
    if (text == "spatial") {
        return WindowMode::spatial;
    }
    throw ArgumentError("unknown window mode '" + text + "'");
}

SensorMatrix load_csv(const std::filesystem::path& path, const CsvSchema& schema)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), schema);
}

SensorMatrix parse_csv(const std::string& text, const CsvSchema& schema)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("empty CSV: no header row");
    }
    const auto header = split_row(line);

    const auto ts_it = std::find(header.begin(), header.end(), schema.timestamp_column);
    if (ts_it == header.end()) {
        throw SchemaError("no timestamp column '" + schema.timestamp_column + "'");
    }
    const std::size_t ts_col = static_cast<std::size_t>(ts_it - header.begin());

    std::vector<std::size_t> reading_cols;
    std::vector<std::string> ids;
    if (schema.reading_columns.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c != ts_col) {
                reading_cols.push_back(c);
                ids.push_back(header[c]);
            }
        }
    } else {
        for (const auto& name : schema.reading_columns) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) {
                throw SchemaError("no reading column '" + name + "'");
            }
            reading_cols.push_back(static_cast<std::size_t>(it - header.begin()));
            ids.push_back(name);
        }
    }
    if (reading_cols.empty()) {
        throw SchemaError("schema names no reading column");
    }

    // timestamp -> readings; duplicate timestamps merge cell by cell.
    std::map<std::int64_t, std::vector<double>> rows;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        ++row_no;
        const auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw ParseError(row_no, "expected " + std::to_string(header.size()) + " cells, found " +
                                         std::to_string(cells.size()));
        }
        std::int64_t ts = 0;
        if (!parse_int(cells[ts_col], ts)) {
            throw ParseError(row_no, "timestamp '" + cells[ts_col] + "' is not an integer");
        }
        auto [it, inserted] = rows.try_emplace(ts, std::vector<double>(reading_cols.size(), kMissing));
        auto& dst = it->second;
        for (std::size_t j = 0; j < reading_cols.size(); ++j) {
            const auto& cell = cells[reading_cols[j]];
            if (is_missing_token(cell)) {
                continue;
            }
            double v = 0.0;
            if (!parse_real(cell, v)) {
                throw ParseError(row_no, "reading '" + cell + "' in column '" + ids[j] +
                                             "' is not a decimal number");
            }
            if (!std::isnan(dst[j]) && dst[j] != v) {
                throw ParseError(row_no, "conflicting readings for timestamp " + std::to_string(ts));
            }
            dst[j] = v;
        }
    }

    SensorMatrix m;
    m.sensor_ids = std::move(ids);
    m.values = Matrix(reading_cols.size(), rows.size(), kMissing);
    m.timestamps.reserve(rows.size());
    std::size_t col = 0;
    for (const auto& [ts, readings] : rows) {
        m.timestamps.push_back(ts);
        for (std::size_t s = 0; s < readings.size(); ++s) {
            m.values(s, col) = readings[s];
        }
        ++col;
    }
    return m;
}

SensorMatrix fill_missing(const SensorMatrix& m)
{
    SensorMatrix out = m;
    const std::size_t steps = m.steps();
    for (std::size_t s = 0; s < m.sensors(); ++s) {
        auto row = out.values.row(s);
        std::vector<std::size_t> present;
        for (std::size_t t = 0; t < steps; ++t) {
            if (std::isfinite(row[t])) {
                present.push_back(t);
            }
        }
        if (present.size() < 2) {
            const std::string id = s < m.sensor_ids.size() ? m.sensor_ids[s] : std::to_string(s);
            throw InsufficientDataError("sensor '" + id + "' has fewer than 2 readings");
        }
        for (std::size_t t = 0; t < present.front(); ++t) {
            row[t] = row[present.front()];
        }
        for (std::size_t t = present.back() + 1; t < steps; ++t) {
            row[t] = row[present.back()];
        }
        for (std::size_t i = 0; i + 1 < present.size(); ++i) {
            const std::size_t a = present[i];
            const std::size_t b = present[i + 1];
            for (std::size_t t = a + 1; t < b; ++t) {
                const double w = static_cast<double>(t - a) / static_cast<double>(b - a);
                row[t] = row[a] + w * (row[b] - row[a]);
            }
        }
    }
    return out;
}

std::vector<DataVector> make_windows(const SensorMatrix& m, WindowMode mode, std::size_t n,
                                     std::size_t stride)
{
    if (n == 0) {
        throw WindowError("window size must be positive");
    }
    if (stride == 0) {
        throw WindowError("stride must be positive");
    }
    std::vector<DataVector> out;
    if (mode == WindowMode::temporal) {
        if (n > m.steps()) {
            throw WindowError("window of " + std::to_string(n) + " exceeds " +
                              std::to_string(m.steps()) + " timesteps");
        }
        const std::size_t per_row = (m.steps() - n) / stride + 1;
        out.reserve(per_row * m.sensors());
        for (std::size_t s = 0; s < m.sensors(); ++s) {
            const auto row = m.values.row(s);
            for (std::size_t start = 0; start + n <= m.steps(); start += stride) {
                DataVector v;
                v.entries.assign(row.begin() + static_cast<std::ptrdiff_t>(start),
                                 row.begin() + static_cast<std::ptrdiff_t>(start + n));
                v.mode = mode;
                v.sensor = s;
                v.start = start;
                out.push_back(std::move(v));
            }
        }
    } else {
        if (n != m.sensors()) {
            throw WindowError("spatial window must equal the sensor count (" +
                              std::to_string(m.sensors()) + "), got " + std::to_string(n));
        }
        out.reserve(m.steps());
        for (std::size_t t = 0; t < m.steps(); t += stride) {
            DataVector v;
            v.entries.resize(n);
            for (std::size_t s = 0; s < n; ++s) {
                v.entries[s] = m.values(s, t);
            }
            v.mode = mode;
            v.start = t;
            out.push_back(std::move(v));
        }
    }
    for (const auto& v : out) {
        for (double e : v.entries) {
            if (!std::isfinite(e)) {
                throw DomainError("window contains a missing or non-finite reading; run fill_missing first");
            }
        }
    }
    return out;
}

std::vector<std::size_t> FoldSplit::members(std::size_t fold) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_assignment.size(); ++i) {
        if (fold_assignment[i] == fold) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> FoldSplit::complement(std::size_t fold) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_assignment.size(); ++i) {
        if (fold_assignment[i] != fold) {
            out.push_back(i);
        }
    }
    return out;
}

FoldSplit split_folds(std::size_t count, std::size_t k, std::uint64_t seed)
{
    if (k < 2) {
        throw ArgumentError("fold count must be at least 2");
    }
    if (count < k) {
        throw ArgumentError("cannot split " + std::to_string(count) + " items into " +
                            std::to_string(k) + " folds");
    }
    std::vector<std::size_t> perm(count);
    for (std::size_t i = 0; i < count; ++i) {
        perm[i] = i;
    }
    Rng rng(seed);
    for (std::size_t i = count; i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(perm[i - 1], perm[j]);
    }
    FoldSplit split;
    split.folds = k;
    split.seed = seed;
    split.fold_assignment.resize(count);
    for (std::size_t pos = 0; pos < count; ++pos) {
        split.fold_assignment[perm[pos]] = pos % k;
    }
    return split;
}

SensorMatrix synth_dataset(std::size_t sensors, std::size_t steps, std::uint64_t seed, double noise_sd)
{
    if (sensors == 0 || steps == 0) {
        throw ArgumentError("synthetic dataset needs at least one sensor and one step");
    }
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw ArgumentError("noise_sd must be a nonnegative finite number");
    }
    Rng rng(seed);

    struct Wave {
        double amplitude;
        double period;
        double phase;
    };
    const std::size_t waves = 2 + static_cast<std::size_t>(uniform_index(rng, 3));
    std::vector<Wave> base;
    for (std::size_t j = 0; j < waves; ++j) {
        // Periods log-uniform between 24 and 480 steps.
        const double period = 24.0 * std::exp(uniform01(rng) * std::log(20.0));
        base.push_back({uniform(rng, 1.0, 5.0), period, uniform(rng, 0.0, 2.0 * std::numbers::pi)});
    }
    const double level = uniform(rng, 5.0, 15.0);
    const double drift_amp = uniform(rng, 1.0, 3.0);
    const double drift_phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double drift_period = 4.0 * static_cast<double>(std::max<std::size_t>(steps, 1000));

    std::vector<double> offsets(sensors);
    for (auto& o : offsets) {
        o = uniform(rng, -5.0, 5.0);
    }

    SensorMatrix m;
    m.values = Matrix(sensors, steps);
    m.timestamps.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        m.timestamps[t] = static_cast<std::int64_t>(t) * 600;
    }
    for (std::size_t s = 0; s < sensors; ++s) {
        m.sensor_ids.push_back("s" + std::to_string(s));
    }
    std::vector<double> shape(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const double tt = static_cast<double>(t);
        double v = level + drift_amp * std::sin(2.0 * std::numbers::pi * tt / drift_period + drift_phase);
        for (const auto& w : base) {
            v += w.amplitude * std::sin(2.0 * std::numbers::pi * tt / w.period + w.phase);
        }
        shape[t] = v;
    }
    for (std::size_t s = 0; s < sensors; ++s) {
        for (std::size_t t = 0; t < steps; ++t) {
            const double noise = noise_sd > 0.0 ? noise_sd * standard_normal(rng) : 0.0;
            m.values(s, t) = shape[t] + offsets[s] + noise;
        }
    }
    return m;
}

}  // namespace aeb
