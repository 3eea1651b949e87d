#include "generators.hpp"

#include "hopscotch/engine.hpp"
#include "hopscotch/session.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace hopscotch;
using namespace hopscotch::engine;

namespace {

SessionLog sample_log() {
    SessionLog log;
    log.header.created = "2026-01-01T00:00:00Z";
    log.header.initial_mode = SoundMode::Animal;
    log.records.emplace_back(ModeChange{0, SoundMode::Generative});
    log.records.emplace_back(SensorReading{50, "/Slider_data", 900});
    log.records.emplace_back(PadEvent{3, Edge::Press, 100});
    log.records.emplace_back(SoundCommand{100, 3, "gen/3", 51, 0.4398});
    log.records.emplace_back(PadEvent{3, Edge::Release, 100});
    return log;
}

std::size_t error_index(std::string_view text) {
    try {
        (void)parse_session(text);
    } catch (const SessionParseError& e) {
        return e.record_index();
    }
    FAIL("accepted: " << text);
    return 0;
}

}  // namespace

TEST_CASE("serialize writes one JSON object per line") {
    const auto text = serialize(sample_log());
    CHECK(text.starts_with(R"({"kind":"header","version":1,"sieve":"3@0|4@1","baseMidi":48,"initialMode":"animal","created":"2026-01-01T00:00:00Z"})"));
    CHECK(text.find(R"({"kind":"sound","tMs":100,"pad":3,"soundId":"gen/3","pitch":51,"gain":0.4398})") != std::string::npos);
    CHECK(text.find(R"({"kind":"mode","tMs":0,"mode":"generative"})") != std::string::npos);
    CHECK(text.back() == '\n');
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}

TEST_CASE("parse inverts serialize") {
    const auto log = sample_log();
    CHECK(parse_session(serialize(log)) == log);

    SessionLog empty;
    CHECK(parse_session(serialize(empty)) == empty);

    // gains survive exactly
    SessionLog odd;
    odd.records.emplace_back(SoundCommand{0, 1, "cartoon/1", std::nullopt, 1.0 / 3.0});
    CHECK(parse_session(serialize(odd)) == odd);
}

TEST_CASE("corrupt logs report the record index") {
    const std::string header = R"({"kind":"header","version":1,"sieve":"3@0|4@1","baseMidi":48,"initialMode":"cartoon","created":""})";
    CHECK(error_index("") == 0);
    CHECK(error_index("not json\n") == 0);
    CHECK(error_index(R"({"kind":"press","tMs":0,"pad":1})") == 0);
    CHECK(error_index(header + "\n" + R"({"kind":"press","tMs":0,"pad":1})" + "\n{broken\n") == 2);
    CHECK(error_index(header + "\n" + R"({"kind":"press","tMs":0,"pad":13})") == 1);
    CHECK(error_index(header + "\n" + R"({"kind":"jump","tMs":0})") == 1);
    CHECK(error_index(header + "\n" + R"({"kind":"press","tMs":50,"pad":1})" + "\n" +
                      R"({"kind":"release","tMs":10,"pad":1})") == 2);
    CHECK(error_index(header + "\n" + R"({"kind":"mode","tMs":0,"mode":"loud"})") == 1);
    CHECK(error_index(header + "\n" + R"({"kind":"sound","tMs":0,"pad":1,"soundId":"x","gain":2})") == 1);
    CHECK(error_index(R"({"kind":"header","version":2,"sieve":"3@0","baseMidi":48,"initialMode":"cartoon","created":""})") == 0);
    CHECK(error_index(R"({"kind":"header","version":1,"sieve":"0@0","baseMidi":48,"initialMode":"cartoon","created":""})") == 0);
    CHECK_THROWS_WITH(parse_session(header + "\n{broken\n"), doctest::Contains("record 1"));
}

TEST_CASE("save and load through a file") {
    const auto dir = std::filesystem::temp_directory_path() / "hopscotch_session_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "s.jsonl";
    save_session(path, sample_log());
    CHECK(load_session(path) == sample_log());
    CHECK_THROWS(load_session(dir / "missing.jsonl"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("property: random sessions round-trip and replay") {
    testing::Rng rng(23);
    for (int i = 0; i < 40; ++i) {
        const auto script = testing::random_script(rng, {});
        const auto log = simulate_session(script, {}, EngineConfig{});
        const auto back = parse_session(serialize(log));
        CHECK(back == log);
        CHECK(replay(back) == recorded_commands(log));
    }
}
