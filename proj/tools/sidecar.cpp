#include "sidecar.hpp"

#include "aeb/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace aeb::cli {

namespace {

std::string join(const auto& values)
{
    std::ostringstream out;
    bool first = true;
    for (const auto& v : values) {
        if (!first) {
            out << ',';
        }
        out << v;
        first = false;
    }
    return out.str();
}

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    if (text.empty()) {
        return out;
    }
    std::string cell;
    std::istringstream ss(text);
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

std::string exact(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_layout(const std::filesystem::path& path, const StreamLayout& layout)
{
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << "mode=" << to_string(layout.mode) << '\n'
        << "window=" << layout.window << '\n'
        << "stride=" << layout.stride << '\n'
        << "bound=" << exact(layout.bound) << '\n'
        << "packets=" << layout.packets << '\n'
        << "timestamp_column=" << layout.timestamp_column << '\n'
        << "sensors=" << join(layout.sensor_ids) << '\n'
        << "timestamps=" << join(layout.timestamps) << '\n';
}

StreamLayout read_layout(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open layout file " + path.string());
    }
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const char* required[] = {"mode", "window", "stride", "bound", "packets", "sensors", "timestamps"};
    for (const char* key : required) {
        if (!kv.count(key)) {
            throw FormatError(path.string() + ": missing key '" + key + "'");
        }
    }
    StreamLayout layout;
    try {
        layout.mode = parse_window_mode(kv["mode"]);
        layout.window = std::stoull(kv["window"]);
        layout.stride = std::stoull(kv["stride"]);
        layout.bound = std::stod(kv["bound"]);
        layout.packets = std::stoull(kv["packets"]);
        if (kv.count("timestamp_column")) {
            layout.timestamp_column = kv["timestamp_column"];
        }
        layout.sensor_ids = split(kv["sensors"]);
        for (const auto& t : split(kv["timestamps"])) {
            layout.timestamps.push_back(std::stoll(t));
        }
    } catch (const std::logic_error&) {
        throw FormatError(path.string() + ": malformed value");
    }
    return layout;
}

void write_sensor_csv(const std::filesystem::path& path, const SensorMatrix& m,
                      const std::string& timestamp_column)
{
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << timestamp_column;
    for (const auto& id : m.sensor_ids) {
        out << ',' << id;
    }
    out << '\n';
    for (std::size_t t = 0; t < m.steps(); ++t) {
        out << m.timestamps[t];
        for (std::size_t s = 0; s < m.sensors(); ++s) {
            out << ',';
            if (!std::isnan(m.values(s, t))) {
                out << exact(m.values(s, t));
            }
        }
        out << '\n';
    }
}

}  // namespace aeb::cli
