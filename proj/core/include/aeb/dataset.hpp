#pragma once

#include "aeb/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace aeb {

/// Aligned readings: row = sensor, column = timestep. Missing cells hold NaN
/// until `fill_missing` runs.
struct SensorMatrix {
    Matrix values;
    std::vector<std::string> sensor_ids;
    std::vector<std::int64_t> timestamps;

    std::size_t sensors() const noexcept { return values.rows(); }
    std::size_t steps() const noexcept { return values.cols(); }

    bool operator==(const SensorMatrix&) const = default;
};

enum class WindowMode { temporal, spatial };

const char* to_string(WindowMode mode);
WindowMode parse_window_mode(const std::string& text);

/// One input vector and where it was cut from. For temporal windows `sensor`
/// is the row and `start` the first timestep; for spatial windows `sensor` is
/// 0 and `start` the timestep.
struct DataVector {
    std::vector<double> entries;
    WindowMode mode = WindowMode::temporal;
    std::size_t sensor = 0;
    std::size_t start = 0;

    std::size_t size() const noexcept { return entries.size(); }
};

struct CsvSchema {
    std::string timestamp_column = "t";
    /// Empty means every non-timestamp column.
    std::vector<std::string> reading_columns;
};

SensorMatrix load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
SensorMatrix parse_csv(const std::string& text, const CsvSchema& schema = {});

/// Linear interpolation between the nearest present neighbours, nearest-value
/// extension at the edges.
SensorMatrix fill_missing(const SensorMatrix& m);

std::vector<DataVector> make_windows(const SensorMatrix& m, WindowMode mode, std::size_t n,
                                     std::size_t stride);

struct FoldSplit {
    std::vector<std::size_t> fold_assignment;
    std::size_t folds = 0;
    std::uint64_t seed = 0;

    /// Indices assigned to `fold`, ascending.
    std::vector<std::size_t> members(std::size_t fold) const;
    /// Every index not in `fold`, ascending.
    std::vector<std::size_t> complement(std::size_t fold) const;
};

FoldSplit split_folds(std::size_t count, std::size_t k, std::uint64_t seed);

/// Seeded correlated sensor data: a shared sum of 2-4 sinusoids plus slow
/// drift, a constant per-sensor offset, and Gaussian noise.
SensorMatrix synth_dataset(std::size_t sensors, std::size_t steps, std::uint64_t seed,
                           double noise_sd = 0.1);

}  // namespace aeb
