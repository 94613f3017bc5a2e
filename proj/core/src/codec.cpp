#include "aeb/codec.hpp"

#include "aeb/error.hpp"
#include "aeb/sphering.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace aeb {

namespace {

// Little-endian byte writer/reader; values are copied through their bit
// patterns so NaN payloads and signed zeros survive.
class Writer {
public:
    explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

private:
    std::vector<std::uint8_t>& out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::size_t remaining() const noexcept { return in_.size() - pos_; }

    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        }
        return v;
    }
    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        }
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::span<const std::uint8_t> bytes(std::size_t count)
    {
        need(count);
        auto s = in_.subspan(pos_, count);
        pos_ += count;
        return s;
    }

private:
    void need(std::size_t count) const
    {
        if (remaining() < count) {
            throw FormatError("truncated buffer: need " + std::to_string(count) + " more bytes, have " +
                              std::to_string(remaining()));
        }
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void check_model(const ModelParams& model)
{
    if (model.n() == 0 || model.k() == 0) {
        throw ShapeError("model has empty dimensions");
    }
}

}  // namespace

std::vector<double> reconstruct(const ModelParams& model, std::span<const float> y, float m)
{
    const std::vector<double> code(y.begin(), y.end());
    const auto z = decode(model.weights, code);
    return denormalize(z, static_cast<double>(m), model.sigma);
}

Packet compress(std::span<const double> p, const ModelParams& model, double bound, ResidualPrecision precision)
{
    check_model(model);
    if (p.size() != model.n()) {
        throw ShapeError("compress: vector of length " + std::to_string(p.size()) + ", model expects " +
                         std::to_string(model.n()));
    }
    if (!(bound >= 0.0) || std::isnan(bound)) {
        throw ArgumentError("compress: bound must be nonnegative");
    }
    for (double e : p) {
        if (!std::isfinite(e)) {
            throw DomainError("compress: non-finite reading");
        }
    }
    Packet pkt;
    const double m = mean(p);
    pkt.m = static_cast<float>(m);
    if (!std::isfinite(pkt.m)) {
        throw DomainError("compress: mean does not fit a 32-bit float");
    }
    const auto x = normalize(p, model.sigma);
    const auto y = encode(model.weights, x);
    pkt.y.resize(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        pkt.y[j] = static_cast<float>(y[j]);
    }
    // Residuals against what the decoder will rebuild from the wire values.
    const auto q = reconstruct(model, pkt.y, pkt.m);
    pkt.eps = encode_residual(p, q, bound, precision);
    return pkt;
}

std::vector<double> decompress(const Packet& packet, const ModelParams& model)
{
    check_model(model);
    if (packet.y.size() != model.k()) {
        throw FormatError("packet code has " + std::to_string(packet.y.size()) + " entries, model expects " +
                          std::to_string(model.k()));
    }
    if (packet.eps.size() != model.n()) {
        throw FormatError("packet residual covers " + std::to_string(packet.eps.size()) +
                          " positions, model expects " + std::to_string(model.n()));
    }
    const auto q = reconstruct(model, packet.y, packet.m);
    return apply_residual(q, packet.eps);
}

std::vector<std::uint8_t> serialize_packet(const Packet& packet, std::size_t n, std::size_t k,
                                           ResidualPrecision precision)
{
    if (packet.y.size() != k || packet.eps.indicator.size() != n) {
        throw ShapeError("serialize_packet: packet shape does not match (n, k)");
    }
    std::size_t set = 0;
    for (bool b : packet.eps.indicator) {
        set += b ? 1 : 0;
    }
    if (set != packet.eps.values.size()) {
        throw ShapeError("serialize_packet: indicator bit count differs from value count");
    }
    std::vector<std::uint8_t> out;
    out.reserve(4 * k + 4 + (n + 7) / 8 + set * bits_of(precision) / 8);
    Writer w(out);
    for (float v : packet.y) {
        w.f32(v);
    }
    w.f32(packet.m);
    std::vector<std::uint8_t> bitmap((n + 7) / 8, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (packet.eps.indicator[i]) {
            bitmap[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
        }
    }
    w.bytes(bitmap);
    for (double v : packet.eps.values) {
        if (precision == ResidualPrecision::f32) {
            w.f32(static_cast<float>(v));
        } else {
            w.f64(v);
        }
    }
    return out;
}

Packet deserialize_packet(std::span<const std::uint8_t> bytes, std::size_t n, std::size_t k,
                          ResidualPrecision precision)
{
    Reader r(bytes);
    Packet pkt;
    pkt.y.resize(k);
    for (auto& v : pkt.y) {
        v = r.f32();
    }
    pkt.m = r.f32();
    const auto bitmap = r.bytes((n + 7) / 8);
    pkt.eps.indicator.assign(n, false);
    std::size_t set = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if ((bitmap[i / 8] >> (i % 8)) & 1u) {
            pkt.eps.indicator[i] = true;
            ++set;
        }
    }
    if (n % 8 != 0 && (bitmap.back() >> (n % 8)) != 0) {
        throw FormatError("indicator padding bits are not zero");
    }
    pkt.eps.values.reserve(set);
    for (std::size_t i = 0; i < set; ++i) {
        pkt.eps.values.push_back(precision == ResidualPrecision::f32 ? static_cast<double>(r.f32()) : r.f64());
    }
    if (r.remaining() != 0) {
        throw FormatError(std::to_string(r.remaining()) + " trailing bytes after packet");
    }
    return pkt;
}

PacketBits packet_size_bits(const Packet& packet, std::size_t n, std::size_t k, ResidualPrecision precision)
{
    PacketBits b;
    b.bits_y = 32 * k + 32;
    b.bits_eps = n + bits_of(precision) * packet.eps.values.size();
    return b;
}

// ---------------------------------------------------------------------------
// Model file: "AEB1", u32 version, u32 n, u32 k, u32 residual bits,
// f64 sigma, f64 default bound, then w_enc, b_enc, w_dec, b_dec as f64.

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'A', 'E', 'B', '1'};

}  // namespace

std::vector<std::uint8_t> encode_model(const ModelFile& file)
{
    const auto& model = file.model;
    check_model(model);
    std::vector<std::uint8_t> out;
    Writer w(out);
    w.bytes(kMagic);
    w.u32(ModelFile::kVersion);
    w.u32(static_cast<std::uint32_t>(model.n()));
    w.u32(static_cast<std::uint32_t>(model.k()));
    w.u32(static_cast<std::uint32_t>(bits_of(file.precision)));
    w.f64(model.sigma.sigma());
    w.f64(file.default_bound);
    for (double v : model.weights.flatten()) {
        w.f64(v);
    }
    return out;
}

ModelFile decode_model(std::span<const std::uint8_t> bytes)
{
    Reader r(bytes);
    const auto magic = r.bytes(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
        throw FormatError("bad model file magic");
    }
    const std::uint32_t version = r.u32();
    if (version != ModelFile::kVersion) {
        throw UnsupportedVersionError(version);
    }
    const std::size_t n = r.u32();
    const std::size_t k = r.u32();
    if (n == 0 || k == 0) {
        throw FormatError("model file has zero dimensions");
    }
    const std::uint32_t bits = r.u32();
    ModelFile file;
    if (bits == 32) {
        file.precision = ResidualPrecision::f32;
    } else if (bits == 64) {
        file.precision = ResidualPrecision::f64;
    } else {
        throw FormatError("unsupported residual width " + std::to_string(bits));
    }
    const double sigma = r.f64();
    try {
        file.model.sigma = SpheringScale(sigma);
    } catch (const DomainError&) {
        throw FormatError("model file sigma is not positive and finite");
    }
    file.default_bound = r.f64();
    if (!(file.default_bound >= 0.0) || !std::isfinite(file.default_bound)) {
        throw FormatError("model file default bound is invalid");
    }
    const std::size_t count = Weights::flat_size(n, k);
    if (r.remaining() != 8 * count) {
        throw FormatError("model file holds " + std::to_string(r.remaining()) + " parameter bytes, expected " +
                          std::to_string(8 * count));
    }
    std::vector<double> flat(count);
    for (auto& v : flat) {
        v = r.f64();
        if (!std::isfinite(v)) {
            throw FormatError("model file contains a non-finite parameter");
        }
    }
    file.model.weights = Weights::unflatten(flat, n, k);
    return file;
}

void save_model(const ModelFile& file, const std::filesystem::path& path)
{
    const auto bytes = encode_model(file);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw InputError("write failed for " + path.string());
    }
}

ModelFile load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_model(bytes);
}

// ---------------------------------------------------------------------------

FramingError::FramingError(std::size_t index, const std::string& what)
    : FormatError("packet " + std::to_string(index) + ": " + what), index_(index)
{
}

void append_frame(std::vector<std::uint8_t>& stream, std::span<const std::uint8_t> payload)
{
    Writer w(stream);
    w.u32(static_cast<std::uint32_t>(payload.size()));
    w.bytes(payload);
}

std::vector<std::vector<std::uint8_t>> split_frames(std::span<const std::uint8_t> stream)
{
    std::vector<std::vector<std::uint8_t>> frames;
    std::size_t pos = 0;
    while (pos < stream.size()) {
        const std::size_t index = frames.size();
        if (stream.size() - pos < 4) {
            throw FramingError(index, "truncated length prefix");
        }
        std::uint32_t len = 0;
        for (int i = 0; i < 4; ++i) {
            len |= static_cast<std::uint32_t>(stream[pos + static_cast<std::size_t>(i)]) << (8 * i);
        }
        pos += 4;
        if (stream.size() - pos < len) {
            throw FramingError(index, "frame declares " + std::to_string(len) + " bytes, only " +
                                          std::to_string(stream.size() - pos) + " remain");
        }
        frames.emplace_back(stream.begin() + static_cast<std::ptrdiff_t>(pos),
                            stream.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return frames;
}

}  // namespace aeb
