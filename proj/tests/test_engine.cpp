#include "generators.hpp"

#include "hopscotch/engine.hpp"

#include <doctest.h>

using namespace hopscotch;
using namespace hopscotch::engine;

namespace {

osc::Message msg(std::string address, std::int32_t value) { return {std::move(address), {value}}; }

std::vector<SoundCommand> commands_of(const std::vector<Broadcast>& seen) {
    std::vector<SoundCommand> out;
    for (const auto& b : seen) {
        if (const auto* c = std::get_if<SoundCommand>(&b)) out.push_back(*c);
    }
    return out;
}

}  // namespace

TEST_CASE("ingest classifies controller messages") {
    Engine e;
    const auto r = e.ingest(msg("/trigger3", 1), 100);
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0] == PadEvent{3, Edge::Press, 100});
    CHECK(r.events[1] == PadEvent{3, Edge::Release, 100});

    CHECK(e.ingest(msg("/trigger3", 0), 150).events.empty());

    CHECK_FALSE(e.ingest(msg("/Slider_data", 1023), 200).control_changed);
    CHECK(e.master_gain() == doctest::Approx(1.0));
    CHECK(e.ingest(msg("/Slider_data", 512), 200).control_changed);
    e.ingest(msg("/Slider_data", 0), 250);
    CHECK(e.master_gain() == 0.0);
    e.ingest(msg("/piezo_data", 1023), 250);
    CHECK(e.accent() == doctest::Approx(1.0));

    e.ingest(msg("/bend_data1", 40), 300);
    CHECK(e.master_gain() == 0.0);
    CHECK(e.accent() == doctest::Approx(1.0));

    e.ingest(msg("/nope", 1), 300);
    e.ingest(msg("/trigger13", 1), 300);
    e.ingest(osc::Message{"/fsr_data", {}}, 300);
    CHECK(e.unknown_addresses() == 3);
    CHECK(e.ingest(osc::Message{"/trigger2", {}}, 300).events.empty());
}

TEST_CASE("sensor values are logged when they change") {
    Engine e;
    for (int t = 50; t <= 200; t += 50) e.ingest(msg("/fsr_data", 7), t);
    e.ingest(msg("/fsr_data", 8), 250);
    int logged = 0;
    for (const auto& r : e.session().records) {
        if (std::holds_alternative<SensorReading>(r)) ++logged;
    }
    CHECK(logged == 2);
}

TEST_CASE("sound commands per mode") {
    Engine e;
    const auto cartoon = e.on_press({5, Edge::Press, 0});
    REQUIRE(cartoon);
    CHECK(cartoon->sound_id == "cartoon/5");
    CHECK(cartoon->gain == doctest::Approx(0.5));
    CHECK_FALSE(cartoon->pitch);
    e.on_release({5, Edge::Release, 0});

    e.set_mode(SoundMode::Animal, 10);
    const auto animal = e.on_press({5, Edge::Press, 20});
    REQUIRE(animal);
    CHECK(*animal == SoundCommand{20, 5, "animal/5", std::nullopt, 0.5});
    e.on_release({5, Edge::Release, 20});

    e.set_mode(SoundMode::Generative, 30);
    const auto g1 = e.on_press({1, Edge::Press, 40});
    const auto g7 = e.on_press({7, Edge::Press, 40});
    REQUIRE(g1);
    REQUIRE(g7);
    CHECK(g1->sound_id == "gen/1");
    CHECK(g1->pitch == 48);
    CHECK(g7->pitch == 60);
    CHECK(g7->t_ms == 40);
}

TEST_CASE("gain law") {
    CHECK(command_gain(1.0, 0.0) == 0.5);
    CHECK(command_gain(1.0, 1.0) == 1.0);
    CHECK(command_gain(0.5, 0.5) == doctest::Approx(0.375));
    Engine e;
    e.apply_sensor("/Slider_data", 512, 0);
    e.apply_sensor("/piezo_data", 256, 0);
    const auto c = e.on_press({2, Edge::Press, 0});
    REQUIRE(c);
    CHECK(c->gain == doctest::Approx(512.0 / 1023.0 * (0.5 + 0.5 * 256.0 / 1023.0)));
}

TEST_CASE("a held pad ignores a second press") {
    Engine e;
    CHECK(e.on_press({4, Edge::Press, 0}));
    CHECK(e.held(4));
    CHECK_FALSE(e.on_press({4, Edge::Press, 10}));
    e.on_release({4, Edge::Release, 20});
    CHECK_FALSE(e.held(4));
    CHECK(e.on_press({4, Edge::Press, 30}));
    CHECK_THROWS_AS((void)e.held(0), std::out_of_range);
}

TEST_CASE("set_mode to the current mode is logged and changes nothing else") {
    Engine e;
    std::vector<Broadcast> seen;
    e.set_observer([&](const Broadcast& b) { seen.push_back(b); });
    e.set_mode(SoundMode::Cartoon, 5);
    CHECK(e.mode() == SoundMode::Cartoon);
    REQUIRE(e.session().records.size() == 1);
    CHECK(std::get<ModeChange>(e.session().records[0]) == ModeChange{5, SoundMode::Cartoon});
    REQUIRE(seen.size() == 1);
    CHECK(std::get<StateUpdate>(seen[0]) == StateUpdate{SoundMode::Cartoon, 1.0});
}

TEST_CASE("mode change between two presses yields different sound ids") {
    Engine e;
    std::vector<Broadcast> seen;
    e.set_observer([&](const Broadcast& b) { seen.push_back(b); });
    e.handle(msg("/trigger2", 1), 50);
    e.set_mode(SoundMode::Animal, 60);
    e.handle(msg("/trigger2", 1), 100);
    const auto cmds = commands_of(seen);
    REQUIRE(cmds.size() == 2);
    CHECK(cmds[0].sound_id == "cartoon/2");
    CHECK(cmds[1].sound_id == "animal/2");
    CHECK(replay(e.session()) == cmds);
}

TEST_CASE("empty generative scale logs the press without sound") {
    EngineConfig cfg;
    cfg.sieve = sieve::parse("2@0&2@1");
    cfg.initial_mode = SoundMode::Generative;
    Engine e(cfg);
    CHECK_FALSE(e.on_press({1, Edge::Press, 0}));
    CHECK(e.errors().size() == 1);
    REQUIRE(e.session().records.size() == 1);
    CHECK(std::holds_alternative<PadEvent>(e.session().records[0]));
    CHECK(replay(e.session()).empty());
}

TEST_CASE("replay") {
    CHECK(replay(SessionLog{}).empty());

    Engine e;
    for (int i = 0; i < 10; ++i) {
        e.handle(msg(osc::trigger_address(i % 12 + 1), 1), 50 * (i + 1));
    }
    const auto log = e.session();
    CHECK(recorded_commands(log).size() == 10);
    CHECK(replay(log) == recorded_commands(log));
    CHECK(replay(parse_session(serialize(log))) == recorded_commands(log));
}

TEST_CASE("simulate_session: commands land on polls, one per debounced contact") {
    firmware::JumpScript script;
    script.actions.emplace_back(firmware::SensorSet{0, firmware::SensorChannel::Slider, 1023});
    script.actions.emplace_back(firmware::Contact{10, 3, 20});
    script.actions.emplace_back(firmware::ModeClick{60, SoundMode::Generative});
    script.actions.emplace_back(firmware::Contact{120, 7, 4});   // chatter
    script.actions.emplace_back(firmware::Contact{130, 7, 30});
    const auto log = simulate_session(script, {}, EngineConfig{});
    const auto cmds = recorded_commands(log);
    REQUIRE(cmds.size() == 2);
    CHECK(cmds[0] == SoundCommand{50, 3, "cartoon/3", std::nullopt, 0.5});
    CHECK(cmds[1] == SoundCommand{200, 7, "gen/7", 60, 0.5});
    CHECK(replay(log) == cmds);
}

TEST_CASE("property: random scripts replay to the recorded commands, one per press") {
    testing::Rng rng(17);
    for (int round = 0; round < 60; ++round) {
        testing::ScriptShape shape;
        shape.contacts = 40;
        const auto script = testing::random_script(rng, shape);
        EngineConfig cfg;
        cfg.sieve = testing::random_sieve(rng, 2, 12);
        const auto log = simulate_session(script, {}, cfg);
        const auto cmds = recorded_commands(log);

        std::size_t presses = 0;
        for (const auto& r : log.records) {
            if (const auto* ev = std::get_if<PadEvent>(&r); ev && ev->edge == Edge::Press) ++presses;
        }
        CHECK(cmds.size() <= presses);
        CHECK(replay(log) == cmds);
        CHECK(simulate_session(script, {}, cfg) == log);
        for (const auto& c : cmds) CHECK(c.t_ms % firmware::kPollPeriodMs == 0);
    }
}
