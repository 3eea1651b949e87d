#include "generators.hpp"

#include "hopscotch/firmware.hpp"

#include <doctest.h>

#include <cmath>

using namespace hopscotch;
using namespace hopscotch::firmware;

namespace {

// Literal trace of the controller's switch routine: one loop iteration per
// period while the line stays low, report if the count passed the threshold.
int traced_button(double contact_ms, int threshold, double period_ms) {
    long debounce = 0;
    // integer tenths-of-a-microsecond clock avoids accumulating float error
    const auto ticks_total = std::llround(contact_ms * 10000.0);
    const auto ticks_per_iter = std::llround(period_ms * 10000.0);
    for (long long t = ticks_per_iter; t <= ticks_total; t += ticks_per_iter) {
        debounce++;
    }
    return debounce > threshold ? 1 : 0;
}

int int_arg(const osc::Message& m) { return std::get<std::int32_t>(m.args.at(0)); }

}  // namespace

TEST_CASE("debounce counts iterations against the threshold") {
    const DebounceConfig cfg;
    CHECK(cfg.threshold_iterations == 100);
    CHECK(min_press_ms(cfg) == doctest::Approx(10.0));
    CHECK(button_pressed(5.0, cfg) == 0);
    CHECK(button_pressed(20.0, cfg) == 1);
    CHECK(button_pressed(std::nullopt, cfg) == 0);
    CHECK(button_pressed(0.0, cfg) == 0);
    CHECK(button_pressed(10.0, cfg) == 0);   // 100 iterations, not more than 100
    CHECK(button_pressed(10.1, cfg) == 1);   // 101 iterations
    CHECK(button_pressed(10.09, cfg) == 0);  // still 100
}

TEST_CASE("debounce matches a literal loop trace") {
    testing::Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        // durations on the 0.01 ms grid so the trace clock is exact
        const double d = std::round(testing::uniform_real(rng, 0, 30) * 100.0) / 100.0;
        CAPTURE(d);
        CHECK(button_pressed(d) == traced_button(d, 100, 0.1));
    }
    const DebounceConfig slow{5, 2.0};
    CHECK(button_pressed(10.0, slow) == 0);
    CHECK(button_pressed(12.0, slow) == 1);
    CHECK(button_pressed(12.0, slow) == traced_button(12.0, 5, 2.0));
}

TEST_CASE("debounce config validation") {
    CHECK_THROWS_AS((DebounceConfig{0, 0.1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DebounceConfig{100, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS(Simulator(DebounceConfig{100, -1.0}), std::invalid_argument);
}

TEST_CASE("idle poll sends every channel in listing order") {
    Simulator sim;
    const auto msgs = sim.poll_step(50);
    REQUIRE(msgs.size() == 18);
    const std::vector<std::string> sensors = {"/bend_data1", "/bend_data2", "/optic_data",
                                              "/piezo_data", "/fsr_data",   "/Slider_data"};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(msgs[i].address == sensors[i]);
        CHECK(int_arg(msgs[i]) == 0);
    }
    for (int pad = 1; pad <= 12; ++pad) {
        CHECK(msgs[static_cast<std::size_t>(5 + pad)].address == "/trigger" + std::to_string(pad));
        CHECK(int_arg(msgs[static_cast<std::size_t>(5 + pad)]) == 0);
    }
}

TEST_CASE("completed contact reports once, then idles") {
    Simulator sim;
    sim.add_contact(3, 10, 20);
    const auto first = sim.poll_step(50);
    const auto second = sim.poll_step(100);
    CHECK(int_arg(first[6 + 2]) == 1);
    CHECK(int_arg(second[6 + 2]) == 0);
    for (int pad = 1; pad <= 12; ++pad) {
        if (pad != 3) CHECK(int_arg(first[static_cast<std::size_t>(5 + pad)]) == 0);
    }
}

TEST_CASE("held contact is reported only after release") {
    Simulator sim;
    sim.add_contact(5, 10, 200);  // released at 210
    for (int t = 50; t <= 200; t += 50) {
        CHECK(int_arg(sim.poll_step(t)[6 + 4]) == 0);
    }
    CHECK(int_arg(sim.poll_step(250)[6 + 4]) == 1);
    CHECK(int_arg(sim.poll_step(300)[6 + 4]) == 0);
}

TEST_CASE("two debounced contacts ending in one pass are reported on consecutive passes") {
    Simulator sim;
    sim.add_contact(2, 0, 15);
    sim.add_contact(2, 20, 15);
    sim.add_contact(2, 36, 5);  // chatter
    CHECK(int_arg(sim.poll_step(50)[6 + 1]) == 1);
    CHECK(int_arg(sim.poll_step(100)[6 + 1]) == 1);
    CHECK(int_arg(sim.poll_step(150)[6 + 1]) == 0);
}

TEST_CASE("sensor values pass through") {
    JumpScript script;
    script.actions.emplace_back(SensorSet{0, SensorChannel::Slider, 512});
    script.duration_ms = 50;
    const auto stream = run_script(script);
    REQUIRE(stream.size() == 18);
    CHECK(stream[5].message.address == "/Slider_data");
    CHECK(int_arg(stream[5].message) == 512);
}

TEST_CASE("run_script: empty script over 100 ms is two full polls") {
    JumpScript script;
    script.duration_ms = 100;
    const auto stream = run_script(script);
    REQUIRE(stream.size() == 36);
    for (std::size_t i = 0; i < 18; ++i) CHECK(stream[i].t_ms == 50);
    for (std::size_t i = 18; i < 36; ++i) CHECK(stream[i].t_ms == 100);
    JumpScript nothing;
    CHECK(run_script(nothing).empty());
}

TEST_CASE("run_script: one 20 ms contact yields exactly one trigger with 1") {
    JumpScript script;
    script.actions.emplace_back(Contact{30, 1, 20});
    script.duration_ms = 500;
    const auto stream = run_script(script);
    int ones = 0;
    for (const auto& tm : stream) {
        CHECK(tm.t_ms % kPollPeriodMs == 0);
        if (tm.message.address == "/trigger1" && int_arg(tm.message) == 1) {
            ++ones;
            CHECK(tm.t_ms == 50);
        }
    }
    CHECK(ones == 1);
    CHECK(run_script(script) == stream);
}

TEST_CASE("default run length ends on the poll after the last action") {
    JumpScript script;
    script.actions.emplace_back(Contact{90, 4, 12});
    CHECK(run_length_ms(script) == 150);
    script.actions.emplace_back(Contact{100, 5, 50});
    CHECK(run_length_ms(script) == 150);
}

TEST_CASE("script validation names the offending entry") {
    JumpScript bad_pad;
    bad_pad.actions.emplace_back(Contact{0, 13, 20});
    CHECK_THROWS_WITH_AS(validate(bad_pad), doctest::Contains("actions[0]: pad 13"), ScriptError);

    JumpScript backwards;
    backwards.actions.emplace_back(Contact{100, 1, 20});
    backwards.actions.emplace_back(Contact{50, 2, 20});
    CHECK_THROWS_WITH_AS(validate(backwards), doctest::Contains("actions[1]"), ScriptError);

    JumpScript overlap;
    overlap.actions.emplace_back(Contact{0, 1, 100});
    overlap.actions.emplace_back(Contact{50, 1, 20});
    CHECK_THROWS_WITH_AS(validate(overlap), doctest::Contains("overlaps actions[0]"), ScriptError);

    JumpScript loud;
    loud.actions.emplace_back(SensorSet{0, SensorChannel::Fsr, 1024});
    CHECK_THROWS_WITH_AS(validate(loud), doctest::Contains("actions[0]"), ScriptError);
}

TEST_CASE("script JSON round trip and parse errors") {
    const auto script = parse_script(R"({"duration_ms": 400, "actions": [
        {"kind": "sensor", "t_ms": 0, "channel": "slider", "value": 900},
        {"kind": "contact", "t_ms": 100, "pad": 3, "duration_ms": 40},
        {"kind": "mode", "t_ms": 150, "mode": "animal"}]})");
    REQUIRE(script.actions.size() == 3);
    CHECK(std::get<Contact>(script.actions[1]).pad == 3);
    CHECK(std::get<ModeClick>(script.actions[2]).mode == SoundMode::Animal);
    const auto again = parse_script(to_json(script));
    CHECK(run_script(again) == run_script(script));

    CHECK_THROWS_WITH_AS(parse_script(R"({"actions": [{"kind": "jump", "t_ms": 0}]})"),
                         doctest::Contains("actions[0]: unknown action kind"), ScriptError);
    CHECK_THROWS_WITH_AS(parse_script(R"({"actions": [{"kind": "sensor", "t_ms": 0, "channel": "x", "value": 1}]})"),
                         doctest::Contains("unknown sensor channel"), ScriptError);
    CHECK_THROWS_WITH_AS(parse_script(R"({"actions": [{"kind": "contact", "t_ms": 0, "pad": 1}]})"),
                         doctest::Contains("duration_ms"), ScriptError);
    CHECK_THROWS_AS(parse_script("[1, 2]"), ScriptError);
    CHECK_THROWS_AS(parse_script("{"), ScriptError);
}

TEST_CASE("property: short contacts never trigger; long ones trigger exactly once") {
    testing::Rng rng(99);
    for (int round = 0; round < 50; ++round) {
        testing::ScriptShape shape;
        shape.contacts = 30;
        shape.max_duration_ms = 25;
        const auto script = testing::random_script(rng, shape);
        const auto stream = run_script(script);

        std::array<int, 12> expected{};
        for (const auto& a : script.actions) {
            if (const auto* c = std::get_if<Contact>(&a)) {
                expected[static_cast<std::size_t>(c->pad - 1)] += c->duration_ms >= 10.1 - 1e-9 ? 1 : 0;
            }
        }
        std::array<int, 12> got{};
        for (const auto& tm : stream) {
            const auto& m = tm.message;
            CHECK(tm.t_ms % kPollPeriodMs == 0);
            if (auto pad = osc::parse_trigger_address(m.address)) {
                got[static_cast<std::size_t>(*pad - 1)] += int_arg(m);
            } else {
                CHECK(int_arg(m) >= 0);
                CHECK(int_arg(m) <= 1023);
            }
        }
        CHECK(got == expected);
    }
}
