#include "aeb/report.hpp"

#include "aeb/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#ifndef AEB_VERSION_STRING
#define AEB_VERSION_STRING "unknown"
#endif

namespace aeb {

const char* version_string() noexcept
{
    return AEB_VERSION_STRING;
}

namespace {

// Shortest text that parses back to the same double.
std::string fmt_real(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

std::string csv_safe(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double parse_real(const std::string& s)
{
    if (s == "nan") {
        return std::nan("");
    }
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
        throw std::invalid_argument(s);
    }
    return v;
}

std::string join_list(const auto& values, auto&& fmt)
{
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) {
            out += ',';
        }
        out += fmt(v);
    }
    return out;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<EvalRow>& rows)
{
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        out << csv_safe(r.method) << ',' << fmt_real(r.bound) << ',' << fmt_real(r.cr) << ',' << fmt_real(r.eps_abs)
            << ',' << fmt_real(r.eps_rel) << ',' << r.bits_code << ',' << r.bits_residual << ',' << r.bits_raw << ','
            << fmt_real(r.wall_time) << ',' << csv_safe(r.status) << '\n';
    }
}

std::vector<EvalRow> read_results_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader) {
        throw FormatError("results CSV: unexpected header");
    }
    std::vector<EvalRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 10) {
            throw FormatError("results CSV line " + std::to_string(line_no) + ": expected 10 columns");
        }
        try {
            EvalRow r;
            r.method = cells[0];
            r.bound = parse_real(cells[1]);
            r.cr = parse_real(cells[2]);
            r.eps_abs = parse_real(cells[3]);
            r.eps_rel = parse_real(cells[4]);
            r.bits_code = std::stoull(cells[5]);
            r.bits_residual = std::stoull(cells[6]);
            r.bits_raw = std::stoull(cells[7]);
            r.wall_time = parse_real(cells[8]);
            r.status = cells[9];
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw FormatError("results CSV line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

std::vector<EvalRow> read_results_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    return read_results_csv(in);
}

void write_training_csv(std::ostream& out, const std::vector<TrainingRecord>& records)
{
    out << "method,fold,repetition,iterations,initial_cost,final_cost,final_grad_norm,stop_reason,sigma\n";
    for (const auto& r : records) {
        out << csv_safe(r.method) << ',' << r.fold << ',' << r.repetition << ',' << r.iterations << ','
            << fmt_real(r.initial_cost) << ',' << fmt_real(r.final_cost) << ',' << fmt_real(r.final_grad_norm) << ','
            << csv_safe(r.stop_reason) << ',' << fmt_real(r.sigma) << '\n';
    }
}

std::string manifest_text(const BenchConfig& cfg, std::size_t vectors)
{
    std::ostringstream m;
    m << "version=" << version_string() << '\n';
    m << "seed=" << cfg.seed << '\n';
    if (cfg.csv_path.empty()) {
        m << "dataset=synth\n";
        m << "synth_sensors=" << cfg.synth_sensors << '\n';
        m << "synth_steps=" << cfg.synth_steps << '\n';
        m << "synth_noise=" << fmt_real(cfg.synth_noise) << '\n';
    } else {
        m << "dataset=" << cfg.csv_path.string() << '\n';
        m << "timestamp_column=" << cfg.schema.timestamp_column << '\n';
    }
    m << "mode=" << to_string(cfg.mode) << '\n';
    m << "window=" << cfg.window << '\n';
    m << "stride=" << cfg.stride << '\n';
    m << "vectors=" << vectors << '\n';
    m << "methods=" << join_list(cfg.methods, [](const std::string& s) { return s; }) << '\n';
    m << "variants=" << join_list(cfg.variants, [](CostVariant v) { return std::string(to_string(v)); }) << '\n';
    m << "ks=" << join_list(cfg.ks, [](std::size_t k) { return std::to_string(k); }) << '\n';
    m << "bounds=" << join_list(cfg.bounds, [](double b) { return fmt_real(b); }) << '\n';
    m << "folds=" << cfg.folds << '\n';
    m << "repetitions=" << cfg.repetitions << '\n';
    m << "beta=" << fmt_real(cfg.cost.beta) << '\n';
    m << "eta=" << fmt_real(cfg.cost.eta) << '\n';
    m << "rho=" << fmt_real(cfg.cost.rho) << '\n';
    m << "lbfgs_history=" << cfg.optimizer.history << '\n';
    m << "lbfgs_max_iters=" << cfg.optimizer.max_iters << '\n';
    m << "lbfgs_grad_tol=" << fmt_real(cfg.optimizer.grad_tol) << '\n';
    m << "lbfgs_c1=" << fmt_real(cfg.optimizer.wolfe_c1) << '\n';
    m << "lbfgs_c2=" << fmt_real(cfg.optimizer.wolfe_c2) << '\n';
    m << "lbfgs_max_line_search_steps=" << cfg.optimizer.max_line_search_steps << '\n';
    m << "residual_bits=" << bits_of(cfg.precision) << '\n';
    m << "lzw_int_bits=" << cfg.lzw_int_bits << '\n';
    m << "raw_bits_per_reading=32\n";
    m << "mean_charged_to=code\n";
    m << "record_timing=" << (cfg.record_timing ? "true" : "false") << '\n';
    return m.str();
}

std::string render_svg(const PlotSpec& plot, const std::vector<PlotSeries>& series)
{
    constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 55;
    auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (plot.log_x && s.x[i] <= 0.0)) {
                continue;
            }
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    }
    if (xmax == xmin) {
        xmin -= 0.5, xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 0.5, ymax += 0.5;
    }
    const double pw = W - L - R;
    const double ph = H - T - B;
    auto px = [&](double x) { return L + (tx(x) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return T + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << plot.title << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        const double gx = L + pw * i / 4.0;
        const double gy = T + ph * (1.0 - i / 4.0);
        const double label_x = plot.log_x ? std::pow(10.0, fx) : fx;
        o << "<text x=\"" << gx << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">" << fmt_real(std::round(label_x * 1e4) / 1e4)
          << "</text>\n";
        o << "<text x=\"" << L - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">" << fmt_real(std::round(fy * 100) / 100)
          << "</text>\n";
    }
    o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << plot.x_label << "</text>\n";
    o << "<text transform=\"translate(16," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << plot.y_label
      << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % std::size(palette)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            const double x = series[s].x[i];
            const double y = series[s].y[i];
            if (!std::isfinite(x) || !std::isfinite(y) || (plot.log_x && x <= 0.0)) {
                continue;
            }
            o << px(x) << ',' << py(y) << ' ';
        }
        o << "\"/>\n";
        const double ly = T + 14 + 16.0 * static_cast<double>(s);
        o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << W - R + 36 << "\" y=\"" << ly << "\">" << series[s].name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_plots(const std::filesystem::path& dir, const std::vector<EvalRow>& rows)
{
    std::vector<std::string> order;
    std::map<std::string, std::vector<const EvalRow*>> by_method;
    for (const auto& r : rows) {
        if (!by_method.count(r.method)) {
            order.push_back(r.method);
        }
        by_method[r.method].push_back(&r);
    }
    auto build = [&](auto xf, auto yf) {
        std::vector<PlotSeries> out;
        for (const auto& m : order) {
            PlotSeries s{m, {}, {}};
            auto pts = by_method[m];
            std::sort(pts.begin(), pts.end(), [&](const EvalRow* a, const EvalRow* b) { return xf(*a) < xf(*b); });
            for (const auto* r : pts) {
                s.x.push_back(xf(*r));
                s.y.push_back(yf(*r));
            }
            out.push_back(std::move(s));
        }
        return out;
    };
    auto cr = [](const EvalRow& r) { return r.cr; };
    auto write = [&](const std::string& name, const PlotSpec& plot, const std::vector<PlotSeries>& series) {
        std::ofstream f(dir / name);
        if (!f) {
            throw InputError("cannot write " + (dir / name).string());
        }
        f << render_svg(plot, series);
    };
    write("cr_vs_rel.svg", {"Compression ratio vs relative error", "relative error (%)", "CR (%)", false},
          build([](const EvalRow& r) { return r.eps_rel; }, cr));
    write("cr_vs_abs.svg", {"Compression ratio vs mean absolute error", "mean absolute error", "CR (%)", true},
          build([](const EvalRow& r) { return r.eps_abs; }, cr));
    write("bound_vs_cr.svg", {"Compression ratio vs error bound", "error bound", "CR (%)", false},
          build([](const EvalRow& r) { return r.bound; }, cr));
}

void write_report(const std::filesystem::path& dir, const BenchConfig& cfg, const BenchOutput& out)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) {
            throw InputError("cannot write " + (dir / name).string());
        }
        return f;
    };
    {
        auto f = open("results.csv");
        write_results_csv(f, out.rows);
    }
    {
        auto f = open("timings.csv");
        write_results_csv(f, out.timings);
    }
    {
        auto f = open("training.csv");
        write_training_csv(f, out.training);
    }
    {
        auto f = open("manifest.txt");
        f << manifest_text(cfg, out.vectors);
    }
    write_plots(dir, out.rows);
}

}  // namespace aeb
