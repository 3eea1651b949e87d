#include "hopscotch/wav.hpp"

#include "hopscotch/fileio.hpp"

#include <bit>
#include <cstring>
#include <string>
#include <string_view>

namespace hopscotch::wav {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

void put_tag(std::vector<std::uint8_t>& out, std::string_view tag) { out.insert(out.end(), tag.begin(), tag.end()); }

void put_le(std::vector<std::uint8_t>& out, std::uint32_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint32_t get_le(std::span<const std::uint8_t> b, std::size_t at, int bytes) {
    std::uint32_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        v |= static_cast<std::uint32_t>(b[at + static_cast<std::size_t>(i)]) << (8 * i);
    }
    return v;
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, std::string_view tag) {
    return std::memcmp(b.data() + at, tag.data(), 4) == 0;
}

}  // namespace

std::vector<std::uint8_t> encode_pcm16(std::span<const std::int16_t> samples, int sample_rate) {
    if (sample_rate <= 0) {
        throw WavError("sample rate must be positive");
    }
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_le(out, 36 + data_bytes, 4);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_le(out, 16, 4);
    put_le(out, kFormatPcm, 2);
    put_le(out, 1, 2);  // channels
    put_le(out, static_cast<std::uint32_t>(sample_rate), 4);
    put_le(out, static_cast<std::uint32_t>(sample_rate) * 2, 4);  // byte rate
    put_le(out, 2, 2);                                            // block align
    put_le(out, 16, 2);
    put_tag(out, "data");
    put_le(out, data_bytes, 4);
    for (auto s : samples) {
        put_le(out, static_cast<std::uint16_t>(s), 2);
    }
    return out;
}

void write_pcm16(const std::filesystem::path& path, std::span<const std::int16_t> samples, int sample_rate) {
    write_file_atomic(path, encode_pcm16(samples, sample_rate));
}

Audio decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
        throw WavError("not a RIFF/WAVE file");
    }

    std::uint16_t format = 0;
    int channels = 0;
    int sample_rate = 0;
    int bits = 0;
    bool have_fmt = false;
    std::span<const std::uint8_t> data;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const auto size = get_le(bytes, pos + 4, 4);
        const std::size_t body = pos + 8;
        if (size > bytes.size() - body) {
            throw WavError("chunk runs past end of file");
        }
        if (tag_is(bytes, pos, "fmt ")) {
            if (size < 16) {
                throw WavError("fmt chunk too short");
            }
            format = static_cast<std::uint16_t>(get_le(bytes, body, 2));
            channels = static_cast<int>(get_le(bytes, body + 2, 2));
            sample_rate = static_cast<int>(get_le(bytes, body + 4, 4));
            bits = static_cast<int>(get_le(bytes, body + 14, 2));
            if (format == kFormatExtensible) {
                if (size < 26) {
                    throw WavError("extensible fmt chunk too short");
                }
                format = static_cast<std::uint16_t>(get_le(bytes, body + 24, 2));
            }
            have_fmt = true;
        } else if (tag_is(bytes, pos, "data")) {
            data = bytes.subspan(body, size);
            have_data = true;
        }
        pos = body + size + (size & 1U);
    }
    if (!have_fmt || !have_data) {
        throw WavError("missing fmt or data chunk");
    }
    if (channels < 1 || sample_rate <= 0) {
        throw WavError("invalid channel count or sample rate");
    }
    const bool is_float = format == kFormatFloat && bits == 32;
    const bool is_int = format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24 || bits == 32);
    if (!is_float && !is_int) {
        throw WavError("unsupported sample format " + std::to_string(format) + "/" + std::to_string(bits) +
                       "-bit");
    }

    const int width = bits / 8;
    const std::size_t frame_bytes = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
    const std::size_t frames = data.size() / frame_bytes;

    Audio audio;
    audio.sample_rate = sample_rate;
    audio.channels = channels;
    audio.mono.resize(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0;
        for (int c = 0; c < channels; ++c) {
            const std::size_t at = f * frame_bytes + static_cast<std::size_t>(c * width);
            const auto raw = get_le(data, at, width);
            double v = 0;
            if (is_float) {
                v = std::bit_cast<float>(raw);
            } else if (bits == 8) {
                v = (static_cast<int>(raw) - 128) / 128.0;
            } else {
                // sign-extend to 32 bits
                const int shift = 32 - bits;
                const auto s = static_cast<std::int32_t>(raw << shift) >> shift;
                v = s / static_cast<double>(std::uint32_t{1} << (bits - 1));
            }
            acc += v;
        }
        audio.mono[f] = acc / channels;
    }
    return audio;
}

Audio read(const std::filesystem::path& path) {
    const auto text = read_file(path);
    return decode(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace hopscotch::wav
