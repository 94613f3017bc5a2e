#include "commands.hpp"

#include "aeb/codec.hpp"
#include "aeb/error.hpp"
#include "aeb/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

using namespace aeb;
using namespace aeb::cli;

std::filesystem::path config_file;

void add_config(CLI::App* sub)
{
    sub->add_option("--config", config_file, "key=value file; command-line flags take precedence")
        ->check(CLI::ExistingFile);
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool given_on_command_line(const std::vector<std::string>& args, const CLI::Option* opt)
{
    for (const auto& a : args) {
        for (const auto& name : opt->get_lnames()) {
            const std::string flag = "--" + name;
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                return true;
            }
        }
        for (const auto& name : opt->get_snames()) {
            if (a.rfind("-" + name, 0) == 0) {
                return true;
            }
        }
    }
    return false;
}

// Expands `--config FILE` into ordinary flags for every key not already
// given. Keys are long option names; '_' and '-' are interchangeable.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args)
{
    if (args.size() < 2) {
        return args;
    }
    CLI::App* sub = app.get_subcommand_no_throw(args[1]);
    if (sub == nullptr) {
        return args;
    }
    std::string path;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw CLI::ValidationError("--config", "cannot open " + path);
    }
    std::vector<std::string> extra;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--config", path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") {
            throw CLI::ValidationError("--config", path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!given_on_command_line(args, opt)) {
            extra.push_back("--" + key + "=" + value);
        }
    }
    args.insert(args.begin() + 2, extra.begin(), extra.end());
    return args;
}

void add_cost_options(CLI::App* sub, CostConfig& cost)
{
    sub->add_option("--beta", cost.beta, "Weight-decay coefficient")->capture_default_str();
    sub->add_option("--eta", cost.eta, "Sparsity coefficient")->capture_default_str();
    sub->add_option("--rho", cost.rho, "Target mean activation")->capture_default_str();
}

void add_optimizer_options(CLI::App* sub, LbfgsOptions& opt)
{
    sub->add_option("--history", opt.history, "L-BFGS correction pairs")->capture_default_str();
    sub->add_option("--max-iters", opt.max_iters, "Iteration cap")->capture_default_str();
    sub->add_option("--grad-tol", opt.grad_tol, "Stop when the gradient infinity norm drops below")
        ->capture_default_str();
    sub->add_option("--c1", opt.wolfe_c1, "Sufficient-decrease constant")->capture_default_str();
    sub->add_option("--c2", opt.wolfe_c2, "Curvature constant")->capture_default_str();
    sub->add_option("--line-search-steps", opt.max_line_search_steps, "Evaluations per line search")
        ->capture_default_str();
}

const auto kModes = CLI::IsMember({"temporal", "spatial"});
const auto kPrecisions = CLI::IsMember({32u, 64u});

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Error-bounded autoencoder compression for sensor data"};
    app.set_version_flag("--version", std::string("aeb ") + version_string());
    app.name("aeb");
    app.require_subcommand(1);

    TrainArgs train;
    auto* cmd_train = app.add_subcommand("train", "Fit an autoencoder and write a model file");
    add_config(cmd_train);
    auto* csv_opt = cmd_train->add_option("--csv", train.csv, "Input CSV")->check(CLI::ExistingFile);
    auto* synth_opt = cmd_train->add_flag("--synth", train.synth, "Use the synthetic generator");
    csv_opt->excludes(synth_opt);
    cmd_train->add_option("--timestamp-column", train.timestamp_column)->capture_default_str();
    cmd_train->add_option("--synth-sensors", train.synth_sensors)->capture_default_str();
    cmd_train->add_option("--synth-steps", train.synth_steps)->capture_default_str();
    cmd_train->add_option("--synth-noise", train.synth_noise)->capture_default_str();
    cmd_train->add_option("--mode", train.mode)->check(kModes)->capture_default_str();
    cmd_train->add_option("--window", train.window, "Vector length (0 = sensor count in spatial mode)")
        ->capture_default_str();
    cmd_train->add_option("--stride", train.stride, "0 = window (temporal) or 1 (spatial)")->capture_default_str();
    cmd_train->add_option("-k,--code", train.k, "Code width")->capture_default_str();
    cmd_train->add_option("--variant", train.variant)->check(CLI::IsMember({"AE", "WAE", "SAE"}))
        ->capture_default_str();
    add_cost_options(cmd_train, train.cost);
    add_optimizer_options(cmd_train, train.optimizer);
    cmd_train->add_option("--seed", train.seed)->capture_default_str();
    cmd_train->add_option("--bound", train.bound, "Default error bound stored in the model")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd_train->add_option("--residual-bits", train.residual_bits)->check(kPrecisions)->capture_default_str();
    cmd_train->add_option("--folds", train.folds, "Fold count for --exclude-fold")->capture_default_str();
    cmd_train->add_option("--exclude-fold", train.exclude_fold, "Train on every fold but this one");
    cmd_train->add_option("-o,--out", train.out, "Model file")->required();

    CompressArgs comp;
    auto* cmd_compress = app.add_subcommand("compress", "Compress a CSV into a framed packet stream");
    add_config(cmd_compress);
    cmd_compress->add_option("-m,--model", comp.model)->required()->check(CLI::ExistingFile);
    cmd_compress->add_option("-i,--input", comp.input)->required()->check(CLI::ExistingFile);
    cmd_compress->add_option("-o,--out", comp.out)->required();
    cmd_compress->add_option("--bound", comp.bound, "Error bound (default: the model's)")
        ->check(CLI::NonNegativeNumber);
    cmd_compress->add_option("--mode", comp.mode)->check(kModes)->capture_default_str();
    cmd_compress->add_option("--stride", comp.stride)->capture_default_str();
    cmd_compress->add_option("--timestamp-column", comp.timestamp_column)->capture_default_str();

    DecompressArgs decomp;
    auto* cmd_decompress = app.add_subcommand("decompress", "Rebuild a CSV from a packet stream");
    add_config(cmd_decompress);
    cmd_decompress->add_option("-m,--model", decomp.model)->required()->check(CLI::ExistingFile);
    cmd_decompress->add_option("-i,--input", decomp.input)->required()->check(CLI::ExistingFile);
    cmd_decompress->add_option("-o,--out", decomp.out)->required();
    cmd_decompress->add_option("--layout", decomp.layout, "Layout file (default: <input>.meta)");
    cmd_decompress->add_option("--verify", decomp.verify, "Original CSV; fail if any reading exceeds the bound")
        ->check(CLI::ExistingFile);

    BenchArgs bench;
    auto& bc = bench.cfg;
    auto* cmd_bench = app.add_subcommand("bench", "Run the cross-validated method comparison");
    add_config(cmd_bench);
    cmd_bench->add_option("--seed", bc.seed)->required();
    cmd_bench->add_option("--csv", bc.csv_path, "Input CSV (default: synthetic data)")->check(CLI::ExistingFile);
    cmd_bench->add_option("--timestamp-column", bc.schema.timestamp_column)->capture_default_str();
    cmd_bench->add_option("--synth-sensors", bc.synth_sensors)->capture_default_str();
    cmd_bench->add_option("--synth-steps", bc.synth_steps)->capture_default_str();
    cmd_bench->add_option("--synth-noise", bc.synth_noise)->capture_default_str();
    cmd_bench->add_option("--mode", bench.mode)->check(kModes)->capture_default_str();
    cmd_bench->add_option("--window", bc.window)->capture_default_str();
    cmd_bench->add_option("--stride", bc.stride)->capture_default_str();
    cmd_bench->add_option("--methods", bc.methods, "Any of ae,ltc,lzw,pca,dct")->delimiter(',')
        ->capture_default_str();
    cmd_bench->add_option("--variants", bench.variants)->delimiter(',')
        ->check(CLI::IsMember({"AE", "WAE", "SAE"}))
        ->capture_default_str();
    cmd_bench->add_option("--ks", bc.ks)->delimiter(',')->capture_default_str();
    cmd_bench->add_option("--bounds", bc.bounds)->delimiter(',')->capture_default_str();
    cmd_bench->add_option("--folds", bc.folds)->capture_default_str();
    cmd_bench->add_option("--reps", bc.repetitions, "Weight initializations per fold")->capture_default_str();
    add_cost_options(cmd_bench, bc.cost);
    add_optimizer_options(cmd_bench, bc.optimizer);
    cmd_bench->add_option("--residual-bits", bench.residual_bits)->check(kPrecisions)->capture_default_str();
    cmd_bench->add_option("--lzw-int-bits", bc.lzw_int_bits)->capture_default_str();
    cmd_bench->add_option("--threads", bc.threads, "Worker cap (0 = all cores)")->capture_default_str();
    cmd_bench->add_flag("--record-timing", bc.record_timing, "Put measured wall time into results.csv");
    cmd_bench->add_option("-o,--out", bench.out, "Report directory")->required();

    ReportArgs report;
    auto* cmd_report = app.add_subcommand("report", "Redraw plots and print a results table");
    cmd_report->add_option("results", report.results, "results.csv or the directory holding it")
        ->required()
        ->check(CLI::ExistingPath);
    cmd_report->add_option("-o,--out", report.out, "Plot directory (default: next to the results)");

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(app, std::move(args));
        std::reverse(args.begin(), args.end());
        args.pop_back();
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cmd_train) {
            if (train.csv.empty() && !train.synth) {
                throw UsageError("train needs --csv or --synth");
            }
            return run_train(train);
        }
        if (*cmd_compress) {
            return run_compress(comp);
        }
        if (*cmd_decompress) {
            return run_decompress(decomp);
        }
        if (*cmd_bench) {
            return run_bench(bench);
        }
        if (*cmd_report) {
            return run_report(report);
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const FramingError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
