#include "aeb/codec.hpp"
#include "aeb/error.hpp"
#include "aeb/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

using namespace aeb;

namespace {

ModelParams random_model(Rng& rng, std::size_t n, std::size_t k, double sigma)
{
    ModelParams m;
    m.weights = Weights(n, k);
    auto flat = m.weights.flatten();
    for (auto& v : flat) {
        v = uniform(rng, -3, 3);
    }
    m.weights.assign(flat);
    m.sigma = SpheringScale(sigma);
    return m;
}

std::vector<double> series(Rng& rng, std::size_t n, double level, double spread)
{
    std::vector<double> p(n);
    for (auto& v : p) {
        v = level + spread * standard_normal(rng);
    }
    return p;
}

}  // namespace

TEST(Compress, LargeBoundSendsNoResiduals)
{
    Rng rng(41);
    const auto model = random_model(rng, 10, 3, 2.0);
    const auto p = series(rng, 10, 20, 2);
    const auto pkt = compress(p, model, 1e30);
    EXPECT_EQ(pkt.eps.transmitted(), 0u);
    EXPECT_EQ(pkt.y.size(), 3u);
    const auto bits = packet_size_bits(pkt, 10, 3);
    EXPECT_EQ(bits.bits_y, 3u * 32 + 32);
    EXPECT_EQ(bits.bits_eps, 10u);
}

TEST(Compress, ConstantVectorAtZeroBound)
{
    Rng rng(42);
    const auto model = random_model(rng, 6, 2, 1.0);
    const std::vector<double> p(6, 12.5);
    const auto pkt = compress(p, model, 0.0, ResidualPrecision::f64);
    const auto q = reconstruct(model, pkt.y, pkt.m);
    // z sits somewhere in (0,1) so q differs from the mean by a model-dependent
    // offset; residuals repair it exactly.
    const auto out = decompress(pkt, model);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(out[i], 12.5);
    }
    EXPECT_EQ(pkt.m, 12.5f);
    (void)q;
}

TEST(Compress, OutlierStaysInBound)
{
    Rng rng(43);
    const auto model = random_model(rng, 16, 4, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto p = series(rng, 16, 50, 1);
        p[uniform_index(rng, 16)] += (trial % 2 ? 10.0 : -10.0);
        const double bound = uniform(rng, 1e-3, 0.5);
        const auto out = decompress(compress(p, model, bound), model);
        for (std::size_t i = 0; i < 16; ++i) {
            EXPECT_LE(std::abs(out[i] - p[i]), bound);
        }
    }
}

TEST(Decompress, HandBuiltPacket)
{
    ModelParams model;
    model.weights = Weights(2, 1);
    model.sigma = SpheringScale(1.0);
    Packet pkt;
    pkt.y = {0.7f};
    pkt.m = 5.0f;
    pkt.eps = ResidualCode{{false, true}, {0.3}};
    const auto out = decompress(pkt, model);
    EXPECT_DOUBLE_EQ(out[0], 5.0);
    EXPECT_DOUBLE_EQ(out[1], 5.3);
    pkt.eps = ResidualCode{{false, false}, {}};
    const auto plain = decompress(pkt, model);
    EXPECT_EQ(plain, reconstruct(model, pkt.y, pkt.m));
}

TEST(Decompress, ShapeMismatch)
{
    Rng rng(44);
    const auto model = random_model(rng, 4, 2, 1.0);
    Packet pkt;
    pkt.y = {0.1f, 0.2f, 0.3f};
    pkt.eps = ResidualCode{std::vector<bool>(4, false), {}};
    EXPECT_THROW(decompress(pkt, model), FormatError);
    EXPECT_THROW(compress(std::vector<double>(3, 1.0), model, 0.1), ShapeError);
    EXPECT_THROW(compress(std::vector<double>{1, 2, std::nan(""), 4}, model, 0.1), DomainError);
}

TEST(Compress, MonotoneInBound)
{
    Rng rng(45);
    const auto model = random_model(rng, 20, 3, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = series(rng, 20, 0, 2);
        std::size_t last = SIZE_MAX;
        for (double b : {0.001, 0.01, 0.1, 0.5, 1.0, 5.0}) {
            const auto bits = packet_size_bits(compress(p, model, b), 20, 3).total();
            EXPECT_LE(bits, last);
            last = bits;
        }
    }
}

TEST(Wire, EmptyResidualSize)
{
    Packet pkt;
    pkt.y = {1.0f, 2.0f};
    pkt.m = 3.0f;
    pkt.eps.indicator.assign(8, false);
    EXPECT_EQ(serialize_packet(pkt, 8, 2).size(), 13u);
}

TEST(Wire, ExactLayout)
{
    Packet pkt;
    pkt.y = {1.0f};
    pkt.m = -2.0f;
    pkt.eps.indicator = {false, true, false, false, false, false, false, false, true};
    pkt.eps.values = {0.5, -0.25};
    const auto bytes = serialize_packet(pkt, 9, 1);
    const std::vector<std::uint8_t> expect = {
        0x00, 0x00, 0x80, 0x3f,  // 1.0f
        0x00, 0x00, 0x00, 0xc0,  // -2.0f
        0x02, 0x01,              // bits 1 and 8
        0x00, 0x00, 0x00, 0x3f,  // 0.5f
        0x00, 0x00, 0x80, 0xbe,  // -0.25f
    };
    EXPECT_EQ(bytes, expect);
    EXPECT_EQ(deserialize_packet(bytes, 9, 1), pkt);
}

TEST(Wire, RandomRoundTrip)
{
    Rng rng(46);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 40);
        const std::size_t k = 1 + uniform_index(rng, 6);
        const auto precision = trial % 2 ? ResidualPrecision::f32 : ResidualPrecision::f64;
        Packet pkt;
        for (std::size_t i = 0; i < k; ++i) {
            pkt.y.push_back(static_cast<float>(standard_normal(rng)));
        }
        pkt.m = static_cast<float>(standard_normal(rng) * 100);
        for (std::size_t i = 0; i < n; ++i) {
            const bool set = uniform01(rng) < 0.3;
            pkt.eps.indicator.push_back(set);
            if (set) {
                const double v = standard_normal(rng);
                pkt.eps.values.push_back(precision == ResidualPrecision::f32 ? static_cast<float>(v) : v);
            }
        }
        const auto bytes = serialize_packet(pkt, n, k, precision);
        EXPECT_EQ(deserialize_packet(bytes, n, k, precision), pkt);
        const auto bits = packet_size_bits(pkt, n, k, precision);
        const std::size_t padding = 8 * ((n + 7) / 8) - n;
        EXPECT_EQ(bits.total(), 8 * bytes.size() - padding);
    }
}

TEST(Wire, Malformed)
{
    Packet pkt;
    pkt.y = {1.0f, 2.0f};
    pkt.eps.indicator = {true, false, false};
    pkt.eps.values = {0.5};
    auto bytes = serialize_packet(pkt, 3, 2);
    auto shorter = bytes;
    shorter.pop_back();
    EXPECT_THROW(deserialize_packet(shorter, 3, 2), FormatError);
    auto longer = bytes;
    longer.push_back(0);
    EXPECT_THROW(deserialize_packet(longer, 3, 2), FormatError);
    auto padded = bytes;
    padded[12] |= 0x80;  // padding bit beyond n
    EXPECT_THROW(deserialize_packet(padded, 3, 2), FormatError);
}

TEST(Bits, PaperSizedPacket)
{
    Packet pkt;
    pkt.y.assign(4, 0.0f);
    pkt.eps.indicator.assign(23, false);
    auto bits = packet_size_bits(pkt, 23, 4);
    EXPECT_EQ(bits.bits_y, 160u);
    EXPECT_EQ(bits.bits_eps, 23u);
    pkt.eps.indicator[5] = true;
    pkt.eps.values = {1.0};
    bits = packet_size_bits(pkt, 23, 4);
    EXPECT_EQ(bits.bits_eps, 55u);
    EXPECT_EQ(packet_size_bits(pkt, 23, 4, ResidualPrecision::f64).bits_eps, 87u);
}

namespace {

ModelFile sample_file()
{
    Rng rng(47);
    ModelFile f;
    f.model = random_model(rng, 7, 3, 0.731);
    f.default_bound = 0.125;
    f.precision = ResidualPrecision::f64;
    return f;
}

}  // namespace

TEST(ModelFile, RoundTrip)
{
    const auto f = sample_file();
    const auto bytes = encode_model(f);
    EXPECT_EQ(std::memcmp(bytes.data(), "AEB1", 4), 0);
    EXPECT_EQ(decode_model(bytes), f);

    const auto path = std::filesystem::temp_directory_path() / "aeb_codec_model.bin";
    save_model(f, path);
    EXPECT_EQ(load_model(path), f);
    std::filesystem::remove(path);
    EXPECT_THROW(load_model(path), InputError);
}

TEST(ModelFile, CorruptMagic)
{
    auto bytes = encode_model(sample_file());
    bytes[0] = 'X';
    EXPECT_THROW(decode_model(bytes), FormatError);
}

TEST(ModelFile, FutureVersion)
{
    auto bytes = encode_model(sample_file());
    bytes[4] = 2;
    try {
        decode_model(bytes);
        FAIL() << "expected UnsupportedVersionError";
    } catch (const UnsupportedVersionError& e) {
        EXPECT_EQ(e.version(), 2u);
    }
}

TEST(ModelFile, WrongLength)
{
    auto bytes = encode_model(sample_file());
    bytes.pop_back();
    EXPECT_THROW(decode_model(bytes), FormatError);
    bytes.push_back(0);
    bytes.push_back(0);
    EXPECT_THROW(decode_model(bytes), FormatError);
}

TEST(Frames, RoundTripAndTruncation)
{
    std::vector<std::uint8_t> stream;
    const std::vector<std::uint8_t> a = {1, 2, 3};
    const std::vector<std::uint8_t> b = {};
    const std::vector<std::uint8_t> c = {9};
    append_frame(stream, a);
    append_frame(stream, b);
    append_frame(stream, c);
    EXPECT_EQ(stream.size(), 3u * 4 + 4);
    const auto frames = split_frames(stream);
    ASSERT_EQ(frames.size(), 3u);
    EXPECT_EQ(frames[0], a);
    EXPECT_EQ(frames[1], b);
    EXPECT_EQ(frames[2], c);

    stream.pop_back();
    try {
        split_frames(stream);
        FAIL() << "expected FramingError";
    } catch (const FramingError& e) {
        EXPECT_EQ(e.index(), 2u);
    }
    EXPECT_TRUE(split_frames(std::vector<std::uint8_t>{}).empty());
}
