#include "aeb/dataset.hpp"
#include "aeb/error.hpp"

#include "oracles/brute_force.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

using namespace aeb;

TEST(Csv, ThreeRowsOneSensor)
{
    const auto m = parse_csv("t,s1\n1,10.0\n2,11.0\n3,12.0\n");
    ASSERT_EQ(m.sensors(), 1u);
    ASSERT_EQ(m.steps(), 3u);
    EXPECT_EQ(m.sensor_ids, std::vector<std::string>{"s1"});
    EXPECT_EQ(m.timestamps, (std::vector<std::int64_t>{1, 2, 3}));
    EXPECT_DOUBLE_EQ(m.values(0, 0), 10.0);
    EXPECT_DOUBLE_EQ(m.values(0, 2), 12.0);
}

TEST(Csv, EmptyCellIsMissing)
{
    const auto m = parse_csv("t,s1,s2\n1,1,5\n2,2,\n3,3,NaN\n");
    EXPECT_FALSE(std::isnan(m.values(1, 0)));
    EXPECT_TRUE(std::isnan(m.values(1, 1)));
    EXPECT_TRUE(std::isnan(m.values(1, 2)));
    EXPECT_DOUBLE_EQ(m.values(0, 1), 2.0);
}

TEST(Csv, RowsAreAlignedOnSortedTimestamps)
{
    const auto m = parse_csv("t,a\n30,3\n10,1\n20,2\n");
    EXPECT_EQ(m.timestamps, (std::vector<std::int64_t>{10, 20, 30}));
    EXPECT_DOUBLE_EQ(m.values(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(m.values(0, 2), 3.0);
}

TEST(Csv, NonNumericTimestampNamesLine)
{
    try {
        parse_csv("t,s1\nabc,1.0\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
    }
}

TEST(Csv, BadReadingNamesItsRow)
{
    try {
        parse_csv("t,s1\n1,1.0\n2,x7\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Csv, MissingTimestampColumn)
{
    EXPECT_THROW(parse_csv("time,s1\n1,1\n"), SchemaError);
    CsvSchema schema;
    schema.timestamp_column = "time";
    EXPECT_NO_THROW(parse_csv("time,s1\n1,1\n", schema));
}

TEST(Csv, SelectedReadingColumns)
{
    CsvSchema schema;
    schema.reading_columns = {"b"};
    const auto m = parse_csv("t,a,b\n1,1,2\n2,3,4\n", schema);
    ASSERT_EQ(m.sensors(), 1u);
    EXPECT_EQ(m.sensor_ids[0], "b");
    EXPECT_DOUBLE_EQ(m.values(0, 1), 4.0);
    schema.reading_columns = {"zzz"};
    EXPECT_THROW(parse_csv("t,a\n1,1\n", schema), SchemaError);
}

TEST(Csv, LoadFromFile)
{
    const auto path = std::filesystem::temp_directory_path() / "aeb_dataset_load.csv";
    {
        std::ofstream f(path);
        f << "t,x\n5,1.5\n6,2.5\n";
    }
    const auto m = load_csv(path);
    EXPECT_EQ(m.steps(), 2u);
    EXPECT_DOUBLE_EQ(m.values(0, 1), 2.5);
    std::filesystem::remove(path);
    EXPECT_THROW(load_csv(path), InputError);
}

namespace {

SensorMatrix single_row(std::vector<double> v)
{
    SensorMatrix m;
    m.values = Matrix(1, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        m.values(0, i) = v[i];
        m.timestamps.push_back(static_cast<std::int64_t>(i));
    }
    m.sensor_ids = {"s"};
    return m;
}

const double kNaN = std::nan("");

}  // namespace

TEST(FillMissing, Midpoint)
{
    const auto m = fill_missing(single_row({10, kNaN, 12}));
    EXPECT_DOUBLE_EQ(m.values(0, 1), 11.0);
}

TEST(FillMissing, EdgeExtension)
{
    const auto m = fill_missing(single_row({kNaN, 5, 6}));
    EXPECT_DOUBLE_EQ(m.values(0, 0), 5.0);
    EXPECT_DOUBLE_EQ(m.values(0, 2), 6.0);
    const auto tail = fill_missing(single_row({1, 2, kNaN, kNaN}));
    EXPECT_DOUBLE_EQ(tail.values(0, 3), 2.0);
}

TEST(FillMissing, LongGapIsLinear)
{
    const auto m = fill_missing(single_row({0, kNaN, kNaN, kNaN, 8}));
    EXPECT_DOUBLE_EQ(m.values(0, 1), 2.0);
    EXPECT_DOUBLE_EQ(m.values(0, 2), 4.0);
    EXPECT_DOUBLE_EQ(m.values(0, 3), 6.0);
}

TEST(FillMissing, TooFewReadings)
{
    EXPECT_THROW(fill_missing(single_row({kNaN, kNaN})), InsufficientDataError);
    EXPECT_THROW(fill_missing(single_row({kNaN, 1.0, kNaN})), InsufficientDataError);
}

TEST(FillMissing, Idempotent)
{
    auto m = synth_dataset(3, 50, 4);
    for (std::size_t t = 0; t < 50; t += 7) {
        m.values(t % 3, t) = kNaN;
    }
    const auto once = fill_missing(m);
    const auto twice = fill_missing(once);
    EXPECT_EQ(once, twice);
    for (double v : once.values.data()) {
        EXPECT_TRUE(std::isfinite(v));
    }
}

TEST(Windows, ExactTiling)
{
    const auto m = single_row({1, 2, 3, 4, 5, 6});
    const auto w = make_windows(m, WindowMode::temporal, 3, 3);
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(w[1].entries, (std::vector<double>{4, 5, 6}));
    EXPECT_EQ(w[1].start, 3u);
}

TEST(Windows, SpatialUsesEverySensor)
{
    const auto m = synth_dataset(23, 5, 1);
    const auto w = make_windows(m, WindowMode::spatial, 23, 1);
    ASSERT_EQ(w.size(), 5u);
    for (const auto& v : w) {
        EXPECT_EQ(v.size(), 23u);
        EXPECT_EQ(v.mode, WindowMode::spatial);
    }
    EXPECT_DOUBLE_EQ(w[2].entries[7], m.values(7, 2));
}

TEST(Windows, TooLongWindow)
{
    EXPECT_THROW(make_windows(single_row({1, 2}), WindowMode::temporal, 3, 3), WindowError);
    EXPECT_THROW(make_windows(synth_dataset(4, 5, 1), WindowMode::spatial, 3, 1), WindowError);
    EXPECT_THROW(make_windows(single_row({1, 2}), WindowMode::temporal, 1, 0), WindowError);
}

TEST(Windows, CountMatchesEnumeration)
{
    for (std::size_t steps : {5u, 17u, 40u}) {
        const auto m = synth_dataset(3, steps, steps);
        for (std::size_t n = 1; n <= 5; ++n) {
            for (std::size_t stride = 1; stride <= 6; ++stride) {
                const auto w = make_windows(m, WindowMode::temporal, n, stride);
                EXPECT_EQ(w.size(), oracle::count_temporal_windows(3, steps, n, stride));
                EXPECT_EQ(w.size(), 3 * ((steps - n) / stride + 1));
            }
        }
    }
}

TEST(Windows, ModeNames)
{
    EXPECT_EQ(parse_window_mode("spatial"), WindowMode::spatial);
    EXPECT_STREQ(to_string(WindowMode::temporal), "temporal");
    EXPECT_THROW(parse_window_mode("diagonal"), ArgumentError);
}

TEST(Folds, PigeonholeAndBalance)
{
    const auto one_each = split_folds(10, 10, 3);
    for (std::size_t f = 0; f < 10; ++f) {
        EXPECT_EQ(one_each.members(f).size(), 1u);
    }
    const auto split = split_folds(103, 10, 99);
    std::size_t lo = 1000, hi = 0;
    for (std::size_t f = 0; f < 10; ++f) {
        lo = std::min(lo, split.members(f).size());
        hi = std::max(hi, split.members(f).size());
    }
    EXPECT_LE(hi - lo, 1u);
}

TEST(Folds, Deterministic)
{
    EXPECT_EQ(split_folds(20, 10, 7).fold_assignment, split_folds(20, 10, 7).fold_assignment);
    EXPECT_NE(split_folds(200, 10, 7).fold_assignment, split_folds(200, 10, 8).fold_assignment);
}

TEST(Folds, EveryIndexInExactlyOneFold)
{
    const auto split = split_folds(57, 6, 11);
    std::multiset<std::size_t> seen;
    for (std::size_t f = 0; f < 6; ++f) {
        const auto mem = split.members(f);
        const auto rest = split.complement(f);
        EXPECT_EQ(mem.size() + rest.size(), 57u);
        seen.insert(mem.begin(), mem.end());
    }
    ASSERT_EQ(seen.size(), 57u);
    for (std::size_t i = 0; i < 57; ++i) {
        EXPECT_EQ(seen.count(i), 1u);
    }
}

TEST(Folds, Errors)
{
    EXPECT_THROW(split_folds(5, 10, 0), ArgumentError);
    EXPECT_THROW(split_folds(5, 1, 0), ArgumentError);
}

TEST(Synth, NoiselessRowsDifferByConstant)
{
    const auto m = synth_dataset(2, 300, 5, 0.0);
    const double offset = m.values(1, 0) - m.values(0, 0);
    for (std::size_t t = 0; t < 300; ++t) {
        EXPECT_NEAR(m.values(1, t) - m.values(0, t), offset, 1e-9);
    }
}

TEST(Synth, Deterministic)
{
    EXPECT_EQ(synth_dataset(4, 100, 42), synth_dataset(4, 100, 42));
    EXPECT_NE(synth_dataset(4, 100, 42), synth_dataset(4, 100, 43));
}

TEST(Synth, StronglyAutocorrelated)
{
    const auto m = synth_dataset(23, 2000, 1);
    for (std::size_t s = 0; s < m.sensors(); ++s) {
        const auto row = m.values.row(s);
        double mu = 0.0;
        for (double v : row) {
            mu += v;
        }
        mu /= static_cast<double>(row.size());
        double num = 0.0, den = 0.0;
        for (std::size_t t = 0; t < row.size(); ++t) {
            den += (row[t] - mu) * (row[t] - mu);
            if (t + 1 < row.size()) {
                num += (row[t] - mu) * (row[t + 1] - mu);
            }
        }
        EXPECT_GT(num / den, 0.9) << "sensor " << s;
    }
}

TEST(Synth, ShapeAndIds)
{
    const auto m = synth_dataset(3, 4, 0);
    EXPECT_EQ(m.sensor_ids, (std::vector<std::string>{"s0", "s1", "s2"}));
    EXPECT_EQ(m.timestamps, (std::vector<std::int64_t>{0, 600, 1200, 1800}));
}
