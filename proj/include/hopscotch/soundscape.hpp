// Offline multitrack rendering of a session's sound commands.
#pragma once

#include "hopscotch/mode.hpp"
#include "hopscotch/session.hpp"
#include "hopscotch/sieve.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hopscotch::soundscape {

inline constexpr int kDefaultSampleRate = 44100;
inline constexpr double kFallbackToneMs = 400.0;
inline constexpr double kTonePeak = 0.8;
inline constexpr int kPadCount = 12;

struct RenderConfig {
    int sample_rate = kDefaultSampleRate;
    bool stems = false;

    void validate() const;
};

struct ToneSpec {
    int pitch = 69;
    double duration_ms = kFallbackToneMs;

    friend bool operator==(const ToneSpec&, const ToneSpec&) = default;
};

struct SampleData {
    std::filesystem::path path;
    std::vector<double> samples;
};

using Source = std::variant<ToneSpec, SampleData>;

class BankError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One source for each of the 3 modes x 12 pads.
class SampleBank {
public:
    /// Every slot a decaying tone at the pad's generative pitch.
    static SampleBank fallback(const sieve::Sieve& sieve, int base_midi);

    const Source& at(SoundMode mode, int pad) const;
    void set(SoundMode mode, int pad, Source source);
    bool is_fallback(SoundMode mode, int pad) const;

    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    void warn(std::string message) { warnings_.push_back(std::move(message)); }

private:
    std::array<Source, 3 * kPadCount> slots_;
    std::array<bool, 3 * kPadCount> fallback_{};
    std::vector<std::string> warnings_;
};

/// Pitch of the fallback tone for a pad: its generative pitch, or a
/// chromatic step above the base when the sieve is empty.
int fallback_pitch(const sieve::Sieve& sieve, int pad, int base_midi);

/// Manifest: JSON object keyed "cartoon/N", "animal/N" or "gen/N". Values
/// are a WAV path (relative to the manifest), {"file": path}, or
/// {"tone": midi, "duration_ms": ms}. Unlisted slots, unreadable files, and
/// files at another sample rate fall back to tones with a warning.
SampleBank load_bank(const std::filesystem::path& manifest, const sieve::Sieve& sieve, int base_midi,
                     int sample_rate = kDefaultSampleRate);
SampleBank parse_bank(std::string_view manifest_json, const std::filesystem::path& base_dir,
                      const sieve::Sieve& sieve, int base_midi, int sample_rate = kDefaultSampleRate);

double midi_to_hz(int pitch) noexcept;

/// Sine at the pitch's frequency, peak 0.8, decaying exponentially to
/// -60 dB over the duration. Length round(duration_ms * rate / 1000).
std::vector<double> synth_tone(int pitch, double duration_ms, int sample_rate);

struct Rendered {
    int sample_rate = kDefaultSampleRate;
    /// Unclamped sum of voices.
    std::vector<double> mix;
    /// Per-pad sums, filled when RenderConfig::stems is set.
    std::array<std::vector<double>, kPadCount> stems;
};

/// Every command becomes one voice at its timestamp: the slot's source
/// (tone slots play at the command's pitch when it has one) scaled by the
/// command gain. Length is last start + longest voice.
Rendered render_commands(std::span<const engine::SoundCommand> commands, const SampleBank& bank,
                         const RenderConfig& cfg);
/// render_commands(replay(log), ...)
Rendered render(const engine::SessionLog& log, const SampleBank& bank, const RenderConfig& cfg);

/// Clamp to [-1, 1], scale by 32767, round.
std::vector<std::int16_t> quantize(std::span<const double> signal);

/// Rising crossings of |x| >= threshold preceded by at least 50 ms below it.
std::size_t onset_count(std::span<const double> signal, double threshold, int sample_rate);
std::size_t onset_count(std::span<const std::int16_t> signal, double threshold, int sample_rate);

/// Writes `out` (the mix) and, with stems, pad_1.wav .. pad_12.wav beside it.
void write_render(const Rendered& rendered, const std::filesystem::path& out, bool stems);

}  // namespace hopscotch::soundscape
