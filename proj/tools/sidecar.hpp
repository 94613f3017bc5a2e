#pragma once

#include "aeb/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace aeb::cli {

// Layout of a compressed CSV, written next to the packet stream so the
// decoder can rebuild the table.
struct StreamLayout {
    WindowMode mode = WindowMode::temporal;
    std::size_t window = 0;
    std::size_t stride = 0;
    double bound = 0.0;
    std::size_t packets = 0;
    std::string timestamp_column = "t";
    std::vector<std::string> sensor_ids;
    std::vector<std::int64_t> timestamps;
};

void write_layout(const std::filesystem::path& path, const StreamLayout& layout);
StreamLayout read_layout(const std::filesystem::path& path);

void write_sensor_csv(const std::filesystem::path& path, const SensorMatrix& m,
                      const std::string& timestamp_column);

}  // namespace aeb::cli
