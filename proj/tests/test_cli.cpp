#include "aeb/codec.hpp"
#include "aeb/dataset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string(AEB_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) {
        r.output += buf;
    }
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() / ("aeb_cli_" + std::string(
            ::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    void write_csv(const std::string& name, std::size_t sensors, std::size_t steps)
    {
        const auto m = aeb::synth_dataset(sensors, steps, 77, 0.3);
        std::ofstream f(path(name));
        f.precision(17);
        f << "t";
        for (const auto& id : m.sensor_ids) {
            f << "," << id;
        }
        f << "\n";
        for (std::size_t t = 0; t < steps; ++t) {
            f << m.timestamps[t];
            for (std::size_t s = 0; s < sensors; ++s) {
                f << ",";
                if (!(s == 1 && t == 5)) {
                    f << m.values(s, t);
                }
            }
            f << "\n";
        }
    }

    fs::path dir;
};

}  // namespace

TEST_F(Cli, TrainWithSquareCodeIsLoadable)
{
    const auto r = run("train --synth --synth-sensors 3 --synth-steps 200 --window 8 -k 8 --max-iters 20 --seed 1 -o " +
                       path("m.aeb"));
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("warning"), std::string::npos);
    EXPECT_NE(r.output.find("stop="), std::string::npos);
    const auto f = aeb::load_model(path("m.aeb"));
    EXPECT_EQ(f.model.n(), 8u);
    EXPECT_EQ(f.model.k(), 8u);
}

TEST_F(Cli, TrainIsByteReproducible)
{
    const std::string args = "train --synth --synth-sensors 3 --synth-steps 300 --window 10 -k 3 --max-iters 40 --seed 9";
    ASSERT_EQ(run(args + " -o " + path("a.aeb")).code, 0);
    ASSERT_EQ(run(args + " -o " + path("b.aeb")).code, 0);
    EXPECT_EQ(slurp(path("a.aeb")), slurp(path("b.aeb")));
}

TEST_F(Cli, TrainOnHeldOutFoldSubset)
{
    write_csv("in.csv", 3, 160);
    const auto r = run("train --csv " + path("in.csv") + " --window 8 -k 2 --folds 4 --exclude-fold 1 --max-iters 20 -o " +
                       path("m.aeb"));
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("vectors=45"), std::string::npos) << r.output;
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run("train --csv " + path("missing.csv") + " -o " + path("m.aeb")).code, 2);
    EXPECT_EQ(run("train -o " + path("m.aeb")).code, 2);
    EXPECT_EQ(run("bench -o " + path("r")).code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("bench --seed 1 --folds 1 -o " + path("r")).code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ConfigFileWithOverrides)
{
    {
        std::ofstream c(path("train.ini"));
        c << "# model settings\nsynth=true\nsynth_sensors=2\nsynth_steps=120\nwindow=6\ncode=5\nmax_iters=10\n";
    }
    const auto r = run("train --config " + path("train.ini") + " --code 2 -o " + path("m.aeb"));
    EXPECT_EQ(r.code, 0) << r.output;
    const auto f = aeb::load_model(path("m.aeb"));
    EXPECT_EQ(f.model.n(), 6u);
    EXPECT_EQ(f.model.k(), 2u);
    {
        std::ofstream c(path("bad.ini"));
        c << "colour=blue\n";
    }
    EXPECT_EQ(run("train --config " + path("bad.ini") + " -o " + path("m.aeb")).code, 2);
}

TEST_F(Cli, CompressDecompressVerify)
{
    write_csv("in.csv", 3, 160);
    ASSERT_EQ(run("train --csv " + path("in.csv") + " --window 16 -k 3 --max-iters 80 -o " + path("m.aeb")).code, 0);
    std::uintmax_t last_size = UINTMAX_MAX;
    for (const std::string b : {"0.001", "0.05", "1"}) {
        const auto c = run("compress -m " + path("m.aeb") + " -i " + path("in.csv") + " --bound " + b + " -o " +
                           path("p" + b + ".bin"));
        ASSERT_EQ(c.code, 0) << c.output;
        const auto size = fs::file_size(path("p" + b + ".bin"));
        EXPECT_LT(size, last_size);
        last_size = size;
        const auto d = run("decompress -m " + path("m.aeb") + " -i " + path("p" + b + ".bin") + " -o " +
                           path("out.csv") + " --verify " + path("in.csv"));
        EXPECT_EQ(d.code, 0) << d.output;
        EXPECT_NE(d.output.find("violations=0"), std::string::npos) << d.output;
    }
    const auto rebuilt = aeb::load_csv(path("out.csv"));
    EXPECT_EQ(rebuilt.sensors(), 3u);
    EXPECT_EQ(rebuilt.steps(), 160u);
}

TEST_F(Cli, VerifyCatchesTampering)
{
    write_csv("in.csv", 2, 64);
    ASSERT_EQ(run("train --csv " + path("in.csv") + " --window 16 -k 2 --max-iters 30 -o " + path("m.aeb")).code, 0);
    ASSERT_EQ(run("compress -m " + path("m.aeb") + " -i " + path("in.csv") + " --bound 0.01 -o " + path("p.bin")).code, 0);
    {
        std::ofstream c(path("other.csv"));
        c << "t,s0\n0,1000\n";
    }
    const auto d = run("decompress -m " + path("m.aeb") + " -i " + path("p.bin") + " -o " + path("out.csv") +
                       " --verify " + path("other.csv"));
    EXPECT_EQ(d.code, 1) << d.output;
}

TEST_F(Cli, TruncatedStreamNamesPacket)
{
    write_csv("in.csv", 2, 64);
    ASSERT_EQ(run("train --csv " + path("in.csv") + " --window 16 -k 2 --max-iters 30 -o " + path("m.aeb")).code, 0);
    ASSERT_EQ(run("compress -m " + path("m.aeb") + " -i " + path("in.csv") + " --bound 0.1 -o " + path("p.bin")).code, 0);
    auto bytes = slurp(path("p.bin"));
    const auto frames = aeb::split_frames(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
    ASSERT_EQ(frames.size(), 8u);
    std::size_t cut = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        cut += 4 + frames[i].size();
    }
    {
        std::ofstream f(path("t.bin"), std::ios::binary);
        f.write(bytes.data(), static_cast<std::streamsize>(cut + 6));
    }
    fs::copy_file(path("p.bin.meta"), path("t.bin.meta"));
    const auto d = run("decompress -m " + path("m.aeb") + " -i " + path("t.bin") + " -o " + path("out.csv"));
    EXPECT_EQ(d.code, 1);
    EXPECT_NE(d.output.find("packet 3"), std::string::npos) << d.output;
}

TEST_F(Cli, BenchAndReport)
{
    const std::string args = "bench --seed 4 --synth-sensors 3 --synth-steps 320 --window 16 --methods ltc,ae "
                             "--variants WAE --ks 3 --bounds 0.2 --folds 2 --reps 1 --max-iters 30 -o ";
    const auto a = run(args + path("r1"));
    ASSERT_EQ(a.code, 0) << a.output;
    const auto b = run(args + path("r2"));
    ASSERT_EQ(b.code, 0) << b.output;
    const auto csv = slurp(path("r1") + "/results.csv");
    EXPECT_EQ(csv, slurp(path("r2") + "/results.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    fs::remove(path("r1") + "/cr_vs_abs.svg");
    const auto r = run("report " + path("r1"));
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(path("r1") + "/cr_vs_abs.svg"));
    EXPECT_NE(r.output.find("WAE-k3"), std::string::npos);
}
