#include "hopscotch/engine.hpp"
#include "hopscotch/soundscape.hpp"
#include "hopscotch/wav.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace hopscotch;
using namespace hopscotch::soundscape;
using engine::SoundCommand;

namespace {

const sieve::Sieve kDefaultSieve = sieve::parse("3@0|4@1");

SampleBank default_bank() { return SampleBank::fallback(kDefaultSieve, 48); }

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("hopscotch_sound_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir / name;
}

// Zero crossings per second over the first 100 ms, halved.
double estimated_hz(const std::vector<double>& x, int rate) {
    const std::size_t n = static_cast<std::size_t>(rate / 10);
    int crossings = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if ((x[i - 1] < 0) != (x[i] < 0)) ++crossings;
    }
    return crossings / 2.0 * 10.0;
}

double peak(std::span<const double> x) {
    double p = 0;
    for (double v : x) p = std::max(p, std::abs(v));
    return p;
}

}  // namespace

TEST_CASE("fallback bank covers every slot") {
    const auto bank = default_bank();
    for (const auto mode : {SoundMode::Cartoon, SoundMode::Animal, SoundMode::Generative}) {
        for (int pad = 1; pad <= 12; ++pad) {
            CHECK(bank.is_fallback(mode, pad));
            const auto& tone = std::get<ToneSpec>(bank.at(mode, pad));
            CHECK(tone.pitch == sieve::to_pitch(kDefaultSieve, pad - 1, 48));
            CHECK(tone.duration_ms == 400.0);
        }
    }
    CHECK(bank.warnings().empty());
    CHECK_THROWS_AS((void)bank.at(SoundMode::Animal, 13), std::out_of_range);

    const auto empty_scale = SampleBank::fallback(sieve::parse("2@0&2@1"), 48);
    CHECK(std::get<ToneSpec>(empty_scale.at(SoundMode::Cartoon, 5)).pitch == 52);
}

TEST_CASE("manifest entries: file, missing file, tone") {
    const auto wav_path = scratch("animal3.wav");
    const std::vector<std::int16_t> samples = {0, 16384, -16384, 32767};
    wav::write_pcm16(wav_path, samples, 44100);
    const auto other_rate = scratch("slow.wav");
    wav::write_pcm16(other_rate, samples, 22050);

    const std::string manifest = R"({
        "animal/3": "animal3.wav",
        "cartoon/1": {"file": "nope.wav"},
        "cartoon/2": {"file": "slow.wav"},
        "gen/4": {"tone": 69, "duration_ms": 250}
    })";
    const auto bank = parse_bank(manifest, wav_path.parent_path(), kDefaultSieve, 48);
    CHECK_FALSE(bank.is_fallback(SoundMode::Animal, 3));
    const auto& data = std::get<SampleData>(bank.at(SoundMode::Animal, 3));
    REQUIRE(data.samples.size() == 4);
    CHECK(data.samples[1] == doctest::Approx(16384.0 / 32768.0));

    CHECK(bank.is_fallback(SoundMode::Cartoon, 1));
    CHECK(bank.is_fallback(SoundMode::Cartoon, 2));
    REQUIRE(bank.warnings().size() == 2);
    CHECK(bank.warnings()[0].find("cartoon/1") != std::string::npos);
    CHECK(bank.warnings()[1].find("cartoon/2") != std::string::npos);

    CHECK(std::get<ToneSpec>(bank.at(SoundMode::Generative, 4)) == ToneSpec{69, 250});
    CHECK(parse_bank("{}", ".", kDefaultSieve, 48).warnings().empty());

    CHECK_THROWS_AS(parse_bank("{", ".", kDefaultSieve, 48), BankError);
    CHECK_THROWS_AS(parse_bank(R"({"robot/1": "x.wav"})", ".", kDefaultSieve, 48), BankError);
    CHECK_THROWS_AS(parse_bank(R"({"animal/13": "x.wav"})", ".", kDefaultSieve, 48), BankError);
    CHECK_THROWS_AS(parse_bank(R"({"animal/1": {"tone": 200}})", ".", kDefaultSieve, 48), BankError);
    CHECK_THROWS_AS(load_bank(scratch("absent.json"), kDefaultSieve, 48), BankError);
    std::filesystem::remove_all(wav_path.parent_path());
}

TEST_CASE("synth_tone") {
    CHECK(midi_to_hz(69) == doctest::Approx(440.0));
    CHECK(midi_to_hz(57) == doctest::Approx(220.0));
    const auto a4 = synth_tone(69, 400, 44100);
    CHECK(a4.size() == 17640);
    CHECK(estimated_hz(a4, 44100) == doctest::Approx(440).epsilon(0.03));
    CHECK(estimated_hz(synth_tone(57, 400, 44100), 44100) == doctest::Approx(220).epsilon(0.03));
    CHECK(synth_tone(60, 10.01, 1000).size() == 10);
    CHECK(synth_tone(60, 0, 44100).empty());
    CHECK(peak(a4) <= 0.8);
    CHECK(peak(a4) > 0.79);
    // envelope decays: last 10 ms far quieter than the first
    CHECK(peak(std::span(a4).last(441)) < 0.01 * peak(std::span(a4).first(441)));
    // oracle: first samples follow 0.8 sin(2 pi f t)
    for (int i = 0; i < 5; ++i) {
        CHECK(a4[static_cast<std::size_t>(i)] ==
              doctest::Approx(0.8 * std::exp(-std::log(1000.0) * i / 17640.0) * std::sin(2 * std::numbers::pi * 440.0 * i / 44100.0)));
    }
}

TEST_CASE("render: empty, single voice, summed voices") {
    const auto bank = default_bank();
    const RenderConfig cfg;
    CHECK(render_commands({}, bank, cfg).mix.empty());
    CHECK(render(engine::SessionLog{}, bank, cfg).mix.empty());

    const std::vector<SoundCommand> one = {{100, 1, "cartoon/1", std::nullopt, 1.0}};
    const auto r1 = render_commands(one, bank, cfg);
    const auto tone = synth_tone(48, 400, 44100);
    const std::size_t offset = 4410;
    REQUIRE(r1.mix.size() == offset + tone.size());
    for (std::size_t i = 0; i < offset; ++i) REQUIRE(r1.mix[i] == 0.0);
    for (std::size_t i = 0; i < tone.size(); ++i) REQUIRE(r1.mix[offset + i] == tone[i]);

    const std::vector<SoundCommand> two = {{0, 1, "cartoon/1", std::nullopt, 0.4}, {0, 1, "cartoon/1", std::nullopt, 0.4}};
    const auto r2 = render_commands(two, bank, cfg);
    REQUIRE(r2.mix.size() == tone.size());
    for (std::size_t i = 0; i < tone.size(); ++i) REQUIRE(r2.mix[i] == doctest::Approx(0.8 * tone[i]));
    CHECK(peak(r2.mix) <= 1.0);

    // a generative command plays its own pitch on a tone slot
    const std::vector<SoundCommand> gen = {{0, 2, "gen/2", 69, 1.0}};
    CHECK(render_commands(gen, bank, cfg).mix == synth_tone(69, 400, 44100));
}

TEST_CASE("quantize clamps and rounds") {
    const std::vector<double> x = {0.0, 1.0, -1.0, 2.0, -3.0, 0.5, 1.0 / 65534.0};
    CHECK(quantize(x) == std::vector<std::int16_t>{0, 32767, -32767, 32767, -32767, 16384, 1});
}

TEST_CASE("onset counting") {
    const int rate = 44100;
    CHECK(onset_count(std::vector<double>(rate, 0.0), 0.05, rate) == 0);
    const auto bank = default_bank();
    const RenderConfig cfg;
    const std::vector<SoundCommand> one = {{0, 1, "cartoon/1", std::nullopt, 1.0}};
    CHECK(onset_count(render_commands(one, bank, cfg).mix, 0.05, rate) == 1);

    std::vector<SoundCommand> five;
    for (int i = 0; i < 5; ++i) five.push_back({1000 * i, i + 1, "animal/" + std::to_string(i + 1), std::nullopt, 0.5});
    const auto r = render_commands(five, bank, cfg);
    CHECK(onset_count(r.mix, 0.05, rate) == 5);
    CHECK(onset_count(quantize(r.mix), 0.05, rate) == 5);

    // a dip shorter than 50 ms does not start a new onset
    std::vector<double> dip(rate, 0.0);
    for (int i = 1000; i < 3000; ++i) dip[static_cast<std::size_t>(i)] = 0.5;
    for (int i = 3000 + rate / 50; i < 8000; ++i) dip[static_cast<std::size_t>(i)] = 0.5;
    CHECK(onset_count(dip, 0.1, rate) == 1);
}

TEST_CASE("linearity and stems") {
    const auto bank = default_bank();
    RenderConfig cfg;
    cfg.stems = true;
    const std::vector<SoundCommand> a = {{0, 1, "cartoon/1", std::nullopt, 0.3}, {250, 5, "cartoon/5", std::nullopt, 0.2}};
    const std::vector<SoundCommand> b = {{100, 7, "gen/7", 60, 0.25}, {300, 1, "cartoon/1", std::nullopt, 0.2}};
    std::vector<SoundCommand> ab = {a[0], b[0], a[1], b[1]};
    const auto ra = render_commands(a, bank, cfg);
    const auto rb = render_commands(b, bank, cfg);
    const auto rab = render_commands(ab, bank, cfg);
    REQUIRE(rab.mix.size() == std::max(ra.mix.size(), rb.mix.size()));
    for (std::size_t i = 0; i < rab.mix.size(); ++i) {
        const double sum = (i < ra.mix.size() ? ra.mix[i] : 0.0) + (i < rb.mix.size() ? rb.mix[i] : 0.0);
        REQUIRE(rab.mix[i] == doctest::Approx(sum).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < rab.mix.size(); ++i) {
        double s = 0;
        for (const auto& stem : rab.stems) {
            if (i < stem.size()) s += stem[i];
        }
        REQUIRE(std::abs(s - rab.mix[i]) <= 1.0 / 32767.0);
    }
    CHECK(peak(rab.stems[1]) == 0.0);
    CHECK(peak(rab.stems[0]) > 0.0);
    CHECK(render_commands(ab, bank, RenderConfig{}).stems[0].empty());
}

TEST_CASE("WAV files: write, decode, stems beside the mix") {
    const auto bank = default_bank();
    RenderConfig cfg;
    cfg.stems = true;
    const std::vector<SoundCommand> cmds = {{0, 2, "cartoon/2", std::nullopt, 0.9}, {50, 2, "cartoon/2", std::nullopt, 0.9}};
    const auto r = render_commands(cmds, bank, cfg);
    const auto out = scratch("mix.wav");
    write_render(r, out, true);
    const auto mix = wav::read(out);
    CHECK(mix.sample_rate == 44100);
    CHECK(mix.channels == 1);
    REQUIRE(mix.mono.size() == r.mix.size());
    const auto q = quantize(r.mix);
    for (std::size_t i = 0; i < q.size(); ++i) REQUIRE(std::lround(mix.mono[i] * 32768.0) == q[i]);
    for (int pad = 1; pad <= 12; ++pad) {
        CHECK(std::filesystem::exists(out.parent_path() / ("pad_" + std::to_string(pad) + ".wav")));
    }
    const auto bytes = wav::encode_pcm16(q, 44100);
    CHECK(bytes.size() == 44 + 2 * q.size());
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "RIFF");

    CHECK_THROWS_AS(wav::decode(std::vector<std::uint8_t>{'R', 'I', 'F', 'F'}), wav::WavError);
    std::filesystem::remove_all(out.parent_path());
}

TEST_CASE("render config validation") {
    CHECK_THROWS_AS((RenderConfig{0, false}.validate()), std::invalid_argument);
    CHECK_NOTHROW(RenderConfig{}.validate());
}
