#include "aeb/baselines.hpp"

#include "aeb/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace aeb {

// ---------------------------------------------------------------------------
// LTC

namespace {

double to_f32(double v)
{
    return static_cast<double>(static_cast<float>(v));
}

// Value the decoder produces at index j of a segment; endpoints are exact.
double interpolate(const LtcSegment& seg, std::size_t j)
{
    if (j == seg.start_index) {
        return seg.start_value;
    }
    if (j == seg.end_index) {
        return seg.end_value;
    }
    const double w = static_cast<double>(j - seg.start_index) / static_cast<double>(seg.end_index - seg.start_index);
    return seg.start_value + (seg.end_value - seg.start_value) * w;
}

bool segment_within(const LtcSegment& seg, std::span<const double> series, double bound)
{
    for (std::size_t j = seg.start_index + 1; j <= seg.end_index; ++j) {
        if (std::abs(interpolate(seg, j) - series[j]) > bound) {
            return false;
        }
    }
    return true;
}

// Closest 32-bit value to `target` lying within `bound` of it.
std::optional<double> f32_within(double target, double bound)
{
    float v = static_cast<float>(target);
    for (int s = 0; s < 4 && std::isfinite(v); ++s) {
        if (std::abs(static_cast<double>(v) - target) <= bound) {
            return static_cast<double>(v);
        }
        v = std::nextafter(v, static_cast<double>(v) < target ? std::numeric_limits<float>::infinity()
                                                             : -std::numeric_limits<float>::infinity());
    }
    return std::nullopt;
}

}  // namespace

std::vector<LtcSegment> ltc_compress(std::span<const double> series, double bound)
{
    if (series.size() < 2) {
        throw ArgumentError("ltc_compress: series needs at least 2 samples");
    }
    if (!(bound > 0.0) || !std::isfinite(bound)) {
        throw ArgumentError("ltc_compress: bound must be positive");
    }
    for (double v : series) {
        if (!std::isfinite(v)) {
            throw DomainError("ltc_compress: non-finite sample");
        }
    }
    const auto first = f32_within(series[0], bound);
    if (!first) {
        throw PrecisionError("ltc_compress: bound below 32-bit resolution of the data");
    }

    std::vector<LtcSegment> segments;
    std::size_t start = 0;
    double start_value = *first;
    std::vector<double> lo_at;
    std::vector<double> hi_at;
    while (start + 1 < series.size()) {
        // Corridor of slopes from the start point that keep every sample so far
        // within the bound; lo_at/hi_at[d] is the corridor after d samples.
        lo_at.assign(1, -std::numeric_limits<double>::infinity());
        hi_at.assign(1, std::numeric_limits<double>::infinity());
        for (std::size_t j = start + 1; j < series.size(); ++j) {
            const double d = static_cast<double>(j - start);
            const double lo = std::max(lo_at.back(), (series[j] - bound - start_value) / d);
            const double hi = std::min(hi_at.back(), (series[j] + bound - start_value) / d);
            if (lo > hi) {
                break;
            }
            lo_at.push_back(lo);
            hi_at.push_back(hi);
        }

        std::optional<LtcSegment> chosen;
        for (std::size_t len = lo_at.size() - 1; len >= 1 && !chosen; --len) {
            LtcSegment seg{start, start + len, start_value, 0.0};
            const double slope = 0.5 * (lo_at[len] + hi_at[len]);
            seg.end_value = to_f32(start_value + slope * static_cast<double>(len));
            if (segment_within(seg, series, bound)) {
                chosen = seg;
                break;
            }
            if (len == 1) {
                if (const auto v = f32_within(series[start + 1], bound)) {
                    seg.end_value = *v;
                    chosen = seg;
                }
            }
        }
        if (!chosen) {
            throw PrecisionError("ltc_compress: bound below 32-bit resolution of the data");
        }
        segments.push_back(*chosen);
        start = chosen->end_index;
        start_value = chosen->end_value;
    }
    return segments;
}

std::vector<double> ltc_decompress(std::span<const LtcSegment> segments)
{
    if (segments.empty()) {
        return {};
    }
    if (segments.front().start_index != 0) {
        throw FormatError("LTC segments must start at index 0");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if (s.end_index <= s.start_index) {
            throw FormatError("LTC segment " + std::to_string(i) + " is empty or reversed");
        }
        if (i > 0) {
            const auto& prev = segments[i - 1];
            if (s.start_index != prev.end_index) {
                throw FormatError("LTC segment " + std::to_string(i) +
                                  (s.start_index < prev.end_index ? " overlaps" : " leaves a gap after") +
                                  " its predecessor");
            }
            if (s.start_value != prev.end_value) {
                throw FormatError("LTC segment " + std::to_string(i) + " does not share its start value");
            }
        }
    }
    std::vector<double> out(segments.back().end_index + 1);
    for (const auto& s : segments) {
        for (std::size_t j = s.start_index; j < s.end_index; ++j) {
            out[j] = interpolate(s, j);
        }
    }
    out.back() = segments.back().end_value;
    return out;
}

std::size_t ltc_bits(std::span<const LtcSegment> segments)
{
    return segments.empty() ? 0 : 32 + 64 * segments.size();
}

// ---------------------------------------------------------------------------
// Truncated LZW

double FixedPointFormat::step() const noexcept
{
    return std::ldexp(1.0, -static_cast<int>(frac_bits));
}

double FixedPointFormat::min_value() const noexcept
{
    return -std::ldexp(1.0, static_cast<int>(int_bits) - 1);
}

double FixedPointFormat::max_value() const noexcept
{
    return std::ldexp(1.0, static_cast<int>(int_bits) - 1) - step();
}

unsigned frac_bits_for_bound(double bound)
{
    if (!(bound >= 0.0)) {
        throw ArgumentError("bound must be nonnegative");
    }
    unsigned f = 0;
    // Round-to-nearest error is step/2, so the step may be up to 2 * bound.
    while (f < kMaxFracBits && std::ldexp(1.0, -static_cast<int>(f)) > 2.0 * bound) {
        ++f;
    }
    return f;
}

namespace {

void check_format(const FixedPointFormat& fmt)
{
    if (fmt.int_bits < 1 || fmt.width() > 56 || fmt.frac_bits > kMaxFracBits) {
        throw ArgumentError("unsupported fixed-point format " + std::to_string(fmt.int_bits) + "." +
                            std::to_string(fmt.frac_bits));
    }
}

}  // namespace

std::int64_t quantize_fixed(double v, const FixedPointFormat& fmt)
{
    check_format(fmt);
    if (!std::isfinite(v)) {
        throw RangeError("cannot quantize a non-finite reading");
    }
    const double scaled = std::ldexp(v, static_cast<int>(fmt.frac_bits));
    const double limit = std::ldexp(1.0, static_cast<int>(fmt.width()) - 1);
    const double q = std::nearbyint(scaled);
    if (q < -limit || q > limit - 1.0) {
        throw RangeError("reading " + std::to_string(v) + " outside fixed-point range [" +
                         std::to_string(fmt.min_value()) + ", " + std::to_string(fmt.max_value()) + "]");
    }
    return static_cast<std::int64_t>(q);
}

double dequantize_fixed(std::int64_t q, const FixedPointFormat& fmt)
{
    return std::ldexp(static_cast<double>(q), -static_cast<int>(fmt.frac_bits));
}

std::string fixed_point_string(double v, const FixedPointFormat& fmt)
{
    const std::int64_t q = quantize_fixed(v, fmt);
    const std::uint64_t bits = static_cast<std::uint64_t>(q) & ((std::uint64_t{1} << fmt.width()) - 1);
    std::string s;
    for (unsigned i = fmt.width(); i-- > 0;) {
        s.push_back(((bits >> i) & 1u) ? '1' : '0');
        if (i == fmt.frac_bits && fmt.frac_bits > 0) {
            s.push_back('.');
        }
    }
    return s;
}

namespace {

constexpr unsigned kCodeBits = 12;
constexpr std::uint32_t kDictLimit = 1u << kCodeBits;

class BitWriter {
public:
    void put(std::uint64_t value, unsigned width)
    {
        for (unsigned i = width; i-- > 0;) {
            acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((value >> i) & 1u));
            if (++fill_ == 8) {
                out_.push_back(acc_);
                acc_ = 0;
                fill_ = 0;
            }
        }
    }
    std::vector<std::uint8_t> finish()
    {
        if (fill_ > 0) {
            out_.push_back(static_cast<std::uint8_t>(acc_ << (8 - fill_)));
            acc_ = 0;
            fill_ = 0;
        }
        return std::move(out_);
    }

private:
    std::vector<std::uint8_t> out_;
    std::uint8_t acc_ = 0;
    unsigned fill_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}
    std::size_t remaining() const noexcept { return in_.size() * 8 - pos_; }
    std::uint64_t get(unsigned width)
    {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) {
            const std::uint8_t byte = in_[pos_ / 8];
            v = (v << 1) | ((byte >> (7 - pos_ % 8)) & 1u);
            ++pos_;
        }
        return v;
    }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> lzw_encode(std::span<const std::uint8_t> bytes)
{
    BitWriter out;
    if (bytes.empty()) {
        return out.finish();
    }
    std::unordered_map<std::uint32_t, std::uint32_t> dict;
    dict.reserve(kDictLimit);
    std::uint32_t next = 256;
    std::uint32_t w = bytes[0];
    for (std::size_t i = 1; i < bytes.size(); ++i) {
        const std::uint32_t c = bytes[i];
        const std::uint32_t key = (w << 8) | c;
        if (const auto it = dict.find(key); it != dict.end()) {
            w = it->second;
            continue;
        }
        out.put(w, kCodeBits);
        dict.emplace(key, next++);
        if (next == kDictLimit) {
            dict.clear();
            next = 256;
        }
        w = c;
    }
    out.put(w, kCodeBits);
    return out.finish();
}

std::size_t lzw_code_count(std::span<const std::uint8_t> packed)
{
    return packed.size() * 8 / kCodeBits;
}

std::vector<std::uint8_t> lzw_decode(std::span<const std::uint8_t> packed)
{
    const std::size_t codes = lzw_code_count(packed);
    BitReader in(packed);
    std::vector<std::vector<std::uint8_t>> table;
    auto reset = [&table] {
        table.clear();
        table.reserve(kDictLimit);
        for (std::uint32_t c = 0; c < 256; ++c) {
            table.push_back({static_cast<std::uint8_t>(c)});
        }
    };
    reset();
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> prev;
    for (std::size_t i = 0; i < codes; ++i) {
        const auto code = static_cast<std::uint32_t>(in.get(kCodeBits));
        std::vector<std::uint8_t> cur;
        if (prev.empty()) {
            if (code >= 256) {
                throw FormatError("LZW stream starts with non-literal code " + std::to_string(code));
            }
            cur = table[code];
        } else {
            if (code < table.size()) {
                cur = table[code];
            } else if (code == table.size()) {
                cur = prev;
                cur.push_back(prev.front());
            } else {
                throw FormatError("invalid LZW code " + std::to_string(code) + " at position " + std::to_string(i));
            }
            auto entry = prev;
            entry.push_back(cur.front());
            table.push_back(std::move(entry));
            if (table.size() == kDictLimit) {
                reset();
            }
        }
        out.insert(out.end(), cur.begin(), cur.end());
        prev = std::move(cur);
    }
    return out;
}

std::vector<std::uint8_t> lzw_truncated_compress(std::span<const double> p, double bound, unsigned int_bits)
{
    const FixedPointFormat fmt{int_bits, frac_bits_for_bound(bound)};
    check_format(fmt);
    BitWriter words;
    const std::uint64_t mask = (std::uint64_t{1} << fmt.width()) - 1;
    for (double v : p) {
        words.put(static_cast<std::uint64_t>(quantize_fixed(v, fmt)) & mask, fmt.width());
    }
    const auto packed = words.finish();
    std::vector<std::uint8_t> out = {static_cast<std::uint8_t>(fmt.int_bits), static_cast<std::uint8_t>(fmt.frac_bits)};
    const auto codes = lzw_encode(packed);
    out.insert(out.end(), codes.begin(), codes.end());
    return out;
}

std::vector<double> lzw_truncated_decompress(std::span<const std::uint8_t> bytes, std::size_t count)
{
    if (bytes.size() < 2) {
        throw FormatError("truncated LZW stream: missing header");
    }
    const FixedPointFormat fmt{bytes[0], bytes[1]};
    try {
        check_format(fmt);
    } catch (const ArgumentError& e) {
        throw FormatError(e.what());
    }
    const auto packed = lzw_decode(bytes.subspan(2));
    BitReader in(packed);
    if (in.remaining() < count * fmt.width()) {
        throw FormatError("LZW stream decodes to fewer than " + std::to_string(count) + " readings");
    }
    std::vector<double> out(count);
    const unsigned w = fmt.width();
    for (auto& v : out) {
        auto u = in.get(w);
        if ((u >> (w - 1)) & 1u) {
            u |= ~((std::uint64_t{1} << w) - 1);  // sign-extend
        }
        v = dequantize_fixed(static_cast<std::int64_t>(u), fmt);
    }
    return out;
}

std::size_t lzw_truncated_bits(std::span<const std::uint8_t> bytes)
{
    return bytes.size() < 2 ? 0 : kCodeBits * lzw_code_count(bytes.subspan(2));
}

// ---------------------------------------------------------------------------
// Linear bases

SymmetricEigen symmetric_eigen(const Matrix& input)
{
    const std::size_t n = input.rows();
    if (input.cols() != n) {
        throw ShapeError("symmetric_eigen: matrix is not square");
    }
    Matrix a = input;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        v(i, i) = 1.0;
    }
    double total = 0.0;
    for (double e : a.data()) {
        total += e * e;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off <= 1e-30 * total || off == 0.0) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(r, q) = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double apr = a(p, r);
                    const double aqr = a(q, r);
                    a(p, r) = c * apr - s * aqr;
                    a(q, r) = s * apr + c * aqr;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors(r, j) = v(r, order[j]);
        }
    }
    return out;
}

LinearBasisModel pca_fit(std::span<const std::vector<double>> training, std::size_t k)
{
    if (training.empty()) {
        throw ArgumentError("pca_fit: empty training set");
    }
    const std::size_t n = training.front().size();
    if (k == 0 || k > n) {
        throw ArgumentError("pca_fit: k must lie in [1, n]");
    }
    if (training.size() < k) {
        throw ArgumentError("pca_fit: fewer training vectors than components");
    }
    LinearBasisModel model;
    model.kind = BasisKind::pca;
    model.mean.assign(n, 0.0);
    for (const auto& x : training) {
        if (x.size() != n) {
            throw ShapeError("pca_fit: inconsistent vector lengths");
        }
        for (std::size_t i = 0; i < n; ++i) {
            model.mean[i] += x[i];
        }
    }
    for (double& m : model.mean) {
        m /= static_cast<double>(training.size());
    }
    Matrix scatter(n, n);
    std::vector<double> c(n);
    for (const auto& x : training) {
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = x[i] - model.mean[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                scatter(i, j) += c[i] * c[j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            scatter(i, j) = scatter(j, i);
        }
    }
    const auto eig = symmetric_eigen(scatter);
    const double top = eig.values.empty() ? 0.0 : eig.values.front();
    std::size_t rank = 0;
    for (double l : eig.values) {
        rank += (top > 0.0 && l > 1e-10 * top) ? 1 : 0;
    }
    if (k > rank) {
        throw RankError("pca_fit: k = " + std::to_string(k) + " exceeds the data rank " + std::to_string(rank));
    }
    model.components = Matrix(k, n);
    for (std::size_t j = 0; j < k; ++j) {
        // Sign convention: the largest-magnitude entry is positive.
        std::size_t arg = 0;
        for (std::size_t r = 1; r < n; ++r) {
            if (std::abs(eig.vectors(r, j)) > std::abs(eig.vectors(arg, j))) {
                arg = r;
            }
        }
        const double sign = eig.vectors(arg, j) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            model.components(j, r) = sign * eig.vectors(r, j);
        }
    }
    return model;
}

LinearBasisModel pca_fit(std::span<const DataVector> training, std::size_t k)
{
    std::vector<std::vector<double>> raw;
    raw.reserve(training.size());
    for (const auto& v : training) {
        raw.push_back(v.entries);
    }
    return pca_fit(std::span<const std::vector<double>>(raw), k);
}

std::vector<double> pca_compress(std::span<const double> p, const LinearBasisModel& model)
{
    const std::size_t n = model.components.cols();
    if (p.size() != n) {
        throw ShapeError("pca_compress: vector length does not match the basis");
    }
    std::vector<double> coeffs(model.components.rows(), 0.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const auto row = model.components.row(j);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += row[i] * (p[i] - model.mean[i]);
        }
        coeffs[j] = s;
    }
    return coeffs;
}

std::vector<double> pca_decompress(std::span<const double> coefficients, const LinearBasisModel& model)
{
    if (coefficients.size() != model.components.rows()) {
        throw ShapeError("pca_decompress: coefficient count does not match the basis");
    }
    std::vector<double> out = model.mean;
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        const auto row = model.components.row(j);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += coefficients[j] * row[i];
        }
    }
    return out;
}

Matrix dct_matrix(std::size_t n)
{
    Matrix c(n, n);
    const double nd = static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double scale = std::sqrt((j == 0 ? 1.0 : 2.0) / nd);
        for (std::size_t i = 0; i < n; ++i) {
            c(j, i) = scale * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) * static_cast<double>(j) / nd);
        }
    }
    return c;
}

std::vector<double> dct_forward(std::span<const double> p)
{
    const Matrix c = dct_matrix(p.size());
    std::vector<double> out(p.size(), 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
        const auto row = c.row(j);
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            s += row[i] * p[i];
        }
        out[j] = s;
    }
    return out;
}

std::vector<double> dct_inverse(std::span<const double> coefficients)
{
    const std::size_t n = coefficients.size();
    const Matrix c = dct_matrix(n);
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (coefficients[j] == 0.0) {
            continue;
        }
        const auto row = c.row(j);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += coefficients[j] * row[i];
        }
    }
    return out;
}

std::vector<DctCoefficient> dct_compress(std::span<const double> p, std::size_t k)
{
    if (k < 1 || k > p.size()) {
        throw ArgumentError("dct_compress: k must lie in [1, n]");
    }
    const auto spectrum = dct_forward(p);
    std::vector<std::size_t> order(spectrum.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(spectrum[a]) > std::abs(spectrum[b]); });
    order.resize(k);
    std::sort(order.begin(), order.end());
    std::vector<DctCoefficient> out;
    out.reserve(k);
    for (std::size_t idx : order) {
        out.push_back({idx, spectrum[idx]});
    }
    return out;
}

std::vector<double> dct_decompress(std::span<const DctCoefficient> coefficients, std::size_t n)
{
    std::vector<double> spectrum(n, 0.0);
    for (const auto& c : coefficients) {
        if (c.index >= n) {
            throw FormatError("DCT coefficient index " + std::to_string(c.index) + " out of range");
        }
        spectrum[c.index] = c.value;
    }
    return dct_inverse(spectrum);
}

std::size_t dct_bits(std::size_t k, std::size_t n)
{
    std::size_t index_bits = 0;
    while ((std::size_t{1} << index_bits) < n) {
        ++index_bits;
    }
    return k * (32 + index_bits);
}

}  // namespace aeb
