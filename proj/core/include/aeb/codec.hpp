#pragma once

#include "aeb/autoencoder.hpp"
#include "aeb/error.hpp"
#include "aeb/residual.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace aeb {

/// One compressed vector as it travels: code y, residual code, mean m.
/// y and m already carry wire (32-bit) precision.
struct Packet {
    std::vector<float> y;
    ResidualCode eps;
    float m = 0.0f;

    bool operator==(const Packet&) const = default;
};

/// Encoder side of the pipeline. The reconstruction used for the residuals is
/// computed from the 32-bit y and m, exactly as `decompress` will see them.
Packet compress(std::span<const double> p, const ModelParams& model, double bound,
                ResidualPrecision precision = ResidualPrecision::f32);

std::vector<double> decompress(const Packet& packet, const ModelParams& model);

/// Decoder-side reconstruction without residuals.
std::vector<double> reconstruct(const ModelParams& model, std::span<const float> y, float m);

/// Little-endian: k f32 (y), f32 (m), ceil(n/8) indicator bytes (LSB-first),
/// then one value per set bit at `precision`.
std::vector<std::uint8_t> serialize_packet(const Packet& packet, std::size_t n, std::size_t k,
                                           ResidualPrecision precision = ResidualPrecision::f32);
Packet deserialize_packet(std::span<const std::uint8_t> bytes, std::size_t n, std::size_t k,
                          ResidualPrecision precision = ResidualPrecision::f32);

struct PacketBits {
    std::size_t bits_y = 0;    ///< code plus mean
    std::size_t bits_eps = 0;  ///< indicator plus residual values
    std::size_t total() const noexcept { return bits_y + bits_eps; }
};

PacketBits packet_size_bits(const Packet& packet, std::size_t n, std::size_t k,
                            ResidualPrecision precision = ResidualPrecision::f32);

/// Everything both sides of a deployment share.
struct ModelFile {
    static constexpr std::uint32_t kVersion = 1;

    ModelParams model;
    double default_bound = 0.0;
    ResidualPrecision precision = ResidualPrecision::f32;

    bool operator==(const ModelFile&) const = default;
};

std::vector<std::uint8_t> encode_model(const ModelFile& file);
ModelFile decode_model(std::span<const std::uint8_t> bytes);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// Frames packets with a 32-bit little-endian byte count each.
void append_frame(std::vector<std::uint8_t>& stream, std::span<const std::uint8_t> payload);

/// Splits a framed stream. Throws FramingError naming the first bad frame.
std::vector<std::vector<std::uint8_t>> split_frames(std::span<const std::uint8_t> stream);

class FramingError : public FormatError {
public:
    FramingError(std::size_t index, const std::string& what);
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace aeb
