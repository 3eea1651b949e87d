#include "hopscotch/soundscape.hpp"

#include "hopscotch/engine.hpp"
#include "hopscotch/fileio.hpp"
#include "hopscotch/wav.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hopscotch::soundscape {

using nlohmann::json;

namespace {

constexpr double kOnsetGapMs = 50.0;
// -60 dB at the end of the tone.
const double kDecayLog = std::log(1000.0);

std::size_t slot_index(SoundMode mode, int pad) {
    if (pad < 1 || pad > kPadCount) {
        throw std::out_of_range("pad " + std::to_string(pad) + " out of range 1..12");
    }
    return static_cast<std::size_t>(mode) * kPadCount + static_cast<std::size_t>(pad - 1);
}

struct SlotKey {
    SoundMode mode;
    int pad;
};

std::optional<SlotKey> parse_slot(std::string_view key) {
    const auto slash = key.find('/');
    if (slash == std::string_view::npos) {
        return std::nullopt;
    }
    const auto prefix = key.substr(0, slash);
    std::optional<SoundMode> mode;
    if (prefix == "gen" || prefix == "generative") {
        mode = SoundMode::Generative;
    } else if (prefix == "cartoon" || prefix == "animal") {
        mode = parse_mode(prefix);
    }
    const auto digits = key.substr(slash + 1);
    if (!mode || digits.empty() || digits.size() > 2 || digits.front() == '0') {
        return std::nullopt;
    }
    int pad = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        pad = pad * 10 + (c - '0');
    }
    if (pad < 1 || pad > kPadCount) {
        return std::nullopt;
    }
    return SlotKey{*mode, pad};
}

}  // namespace

void RenderConfig::validate() const {
    if (sample_rate <= 0) {
        throw std::invalid_argument("sample_rate must be > 0");
    }
}

int fallback_pitch(const sieve::Sieve& sieve, int pad, int base_midi) {
    try {
        return sieve::to_pitch(sieve, pad - 1, base_midi);
    } catch (const sieve::DomainError&) {
        return std::clamp(base_midi + pad - 1, 0, 127);
    }
}

SampleBank SampleBank::fallback(const sieve::Sieve& sieve, int base_midi) {
    SampleBank bank;
    for (auto mode : {SoundMode::Cartoon, SoundMode::Animal, SoundMode::Generative}) {
        for (int pad = 1; pad <= kPadCount; ++pad) {
            const auto i = slot_index(mode, pad);
            bank.slots_[i] = ToneSpec{fallback_pitch(sieve, pad, base_midi), kFallbackToneMs};
            bank.fallback_[i] = true;
        }
    }
    return bank;
}

const Source& SampleBank::at(SoundMode mode, int pad) const { return slots_[slot_index(mode, pad)]; }

void SampleBank::set(SoundMode mode, int pad, Source source) {
    const auto i = slot_index(mode, pad);
    slots_[i] = std::move(source);
    fallback_[i] = false;
}

bool SampleBank::is_fallback(SoundMode mode, int pad) const { return fallback_[slot_index(mode, pad)]; }

SampleBank parse_bank(std::string_view manifest_json, const std::filesystem::path& base_dir,
                      const sieve::Sieve& sieve, int base_midi, int sample_rate) {
    json doc;
    try {
        doc = json::parse(manifest_json);
    } catch (const json::parse_error& e) {
        throw BankError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw BankError("manifest must be a JSON object");
    }

    SampleBank bank = SampleBank::fallback(sieve, base_midi);
    for (const auto& [key, value] : doc.items()) {
        const auto slot = parse_slot(key);
        if (!slot) {
            throw BankError("manifest key \"" + key + "\" is not <cartoon|animal|gen>/<1..12>");
        }

        std::optional<std::filesystem::path> file;
        if (value.is_string()) {
            file = value.get<std::string>();
        } else if (value.is_object() && value.contains("file") && value["file"].is_string()) {
            file = value["file"].get<std::string>();
        } else if (value.is_object() && value.contains("tone") && value["tone"].is_number_integer()) {
            const int pitch = value["tone"].get<int>();
            const double ms = value.value("duration_ms", kFallbackToneMs);
            if (pitch < 0 || pitch > 127 || !(ms > 0)) {
                throw BankError("manifest entry \"" + key + "\" has an invalid tone");
            }
            bank.set(slot->mode, slot->pad, ToneSpec{pitch, ms});
            continue;
        } else {
            throw BankError("manifest entry \"" + key + "\" must be a path, {\"file\"} or {\"tone\"}");
        }

        auto path = file->is_absolute() ? *file : base_dir / *file;
        try {
            auto audio = wav::read(path);
            if (audio.sample_rate != sample_rate) {
                bank.warn(key + ": " + path.string() + " is " + std::to_string(audio.sample_rate) +
                          " Hz, expected " + std::to_string(sample_rate) + " Hz; using fallback tone");
                continue;
            }
            bank.set(slot->mode, slot->pad, SampleData{path, std::move(audio.mono)});
        } catch (const std::exception& e) {
            bank.warn(key + ": cannot load " + path.string() + " (" + e.what() + "); using fallback tone");
        }
    }
    return bank;
}

SampleBank load_bank(const std::filesystem::path& manifest, const sieve::Sieve& sieve, int base_midi,
                     int sample_rate) {
    std::string text;
    try {
        text = read_file(manifest);
    } catch (const IoError& e) {
        throw BankError(std::string("unreadable manifest: ") + e.what());
    }
    return parse_bank(text, manifest.parent_path(), sieve, base_midi, sample_rate);
}

double midi_to_hz(int pitch) noexcept { return 440.0 * std::pow(2.0, (pitch - 69) / 12.0); }

std::vector<double> synth_tone(int pitch, double duration_ms, int sample_rate) {
    const auto n = static_cast<std::size_t>(std::max<long long>(0, std::llround(duration_ms * sample_rate / 1000.0)));
    std::vector<double> out(n);
    if (n == 0) {
        return out;
    }
    const double w = 2.0 * std::numbers::pi * midi_to_hz(pitch) / sample_rate;
    const double decay = kDecayLog / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = static_cast<double>(i);
        out[i] = kTonePeak * std::exp(-decay * k) * std::sin(w * k);
    }
    return out;
}

Rendered render_commands(std::span<const engine::SoundCommand> commands, const SampleBank& bank,
                         const RenderConfig& cfg) {
    cfg.validate();
    Rendered out;
    out.sample_rate = cfg.sample_rate;
    if (commands.empty()) {
        return out;
    }

    struct Voice {
        const std::vector<double>* buffer;
        std::size_t start;
        double gain;
        int pad;
    };

    // Tone buffers keyed by (pitch, duration); std::map keeps element addresses stable.
    std::map<std::pair<int, double>, std::vector<double>> tones;
    std::vector<Voice> voices;
    voices.reserve(commands.size());
    std::size_t last_start = 0;
    std::size_t longest = 0;

    for (const auto& cmd : commands) {
        const auto slash = cmd.sound_id.find('/');
        const auto prefix = cmd.sound_id.substr(0, slash);
        const auto mode = prefix == "gen" ? std::optional(SoundMode::Generative) : parse_mode(prefix);
        if (!mode) {
            throw std::invalid_argument("unrecognized sound id \"" + cmd.sound_id + "\"");
        }
        const Source& source = bank.at(*mode, cmd.pad);

        const std::vector<double>* buffer = nullptr;
        if (const auto* tone = std::get_if<ToneSpec>(&source)) {
            const int pitch = cmd.pitch.value_or(tone->pitch);
            auto [it, inserted] = tones.try_emplace({pitch, tone->duration_ms});
            if (inserted) {
                it->second = synth_tone(pitch, tone->duration_ms, cfg.sample_rate);
            }
            buffer = &it->second;
        } else {
            buffer = &std::get<SampleData>(source).samples;
        }

        const auto start = static_cast<std::size_t>(
            std::max<long long>(0, std::llround(static_cast<double>(cmd.t_ms) * cfg.sample_rate / 1000.0)));
        voices.push_back({buffer, start, cmd.gain, cmd.pad});
        last_start = std::max(last_start, start);
        longest = std::max(longest, buffer->size());
    }

    const std::size_t length = last_start + longest;
    out.mix.assign(length, 0.0);
    if (cfg.stems) {
        for (auto& stem : out.stems) {
            stem.assign(length, 0.0);
        }
    }
    // Fixed summation order (command order) keeps output bit-identical.
    for (const auto& v : voices) {
        const auto& buf = *v.buffer;
        for (std::size_t i = 0; i < buf.size(); ++i) {
            out.mix[v.start + i] += v.gain * buf[i];
        }
        if (cfg.stems) {
            auto& stem = out.stems[static_cast<std::size_t>(v.pad - 1)];
            for (std::size_t i = 0; i < buf.size(); ++i) {
                stem[v.start + i] += v.gain * buf[i];
            }
        }
    }
    return out;
}

Rendered render(const engine::SessionLog& log, const SampleBank& bank, const RenderConfig& cfg) {
    const auto commands = engine::replay(log);
    return render_commands(commands, bank, cfg);
}

std::vector<std::int16_t> quantize(std::span<const double> signal) {
    std::vector<std::int16_t> out(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const double x = std::isnan(signal[i]) ? 0.0 : std::clamp(signal[i], -1.0, 1.0);
        out[i] = static_cast<std::int16_t>(std::lround(x * 32767.0));
    }
    return out;
}

std::size_t onset_count(std::span<const double> signal, double threshold, int sample_rate) {
    const auto gap = static_cast<std::size_t>(std::llround(kOnsetGapMs * sample_rate / 1000.0));
    std::size_t count = 0;
    // Silence is assumed before the first sample.
    std::size_t quiet = gap;
    for (double x : signal) {
        if (std::abs(x) >= threshold) {
            if (quiet >= gap) {
                ++count;
            }
            quiet = 0;
        } else {
            ++quiet;
        }
    }
    return count;
}

std::size_t onset_count(std::span<const std::int16_t> signal, double threshold, int sample_rate) {
    std::vector<double> scaled(signal.size());
    std::transform(signal.begin(), signal.end(), scaled.begin(), [](std::int16_t s) { return s / 32767.0; });
    return onset_count(scaled, threshold, sample_rate);
}

void write_render(const Rendered& rendered, const std::filesystem::path& out, bool stems) {
    wav::write_pcm16(out, quantize(rendered.mix), rendered.sample_rate);
    if (!stems) {
        return;
    }
    const auto dir = out.parent_path();
    for (int pad = 1; pad <= kPadCount; ++pad) {
        const auto& stem = rendered.stems[static_cast<std::size_t>(pad - 1)];
        const auto data = stem.empty() ? std::vector<double>(rendered.mix.size(), 0.0) : stem;
        wav::write_pcm16(dir / ("pad_" + std::to_string(pad) + ".wav"), quantize(data), rendered.sample_rate);
    }
}

}  // namespace hopscotch::soundscape
