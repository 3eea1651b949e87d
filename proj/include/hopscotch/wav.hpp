// RIFF/WAVE PCM reading and writing.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace hopscotch::wav {

class WavError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mono 16-bit little-endian PCM file image.
std::vector<std::uint8_t> encode_pcm16(std::span<const std::int16_t> samples, int sample_rate);
void write_pcm16(const std::filesystem::path& path, std::span<const std::int16_t> samples, int sample_rate);

struct Audio {
    int sample_rate = 0;
    int channels = 0;
    /// Channels averaged, scaled to [-1, 1].
    std::vector<double> mono;
};

/// Accepts integer PCM (8/16/24/32-bit), 32-bit float, and the extensible
/// variants of both.
Audio decode(std::span<const std::uint8_t> bytes);
Audio read(const std::filesystem::path& path);

}  // namespace hopscotch::wav
