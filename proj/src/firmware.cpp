#include "hopscotch/firmware.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hopscotch::firmware {

using nlohmann::json;

namespace {

// Absorbs representation error in duration / period (10.1 / 0.1 is
// 100.99999999999999 in binary floating point).
constexpr double kIterationEpsilon = 1e-9;

std::string entry(std::size_t i) { return "actions[" + std::to_string(i) + "]"; }

double poll_ceil(double t_ms) {
    const double p = static_cast<double>(kPollPeriodMs);
    return std::ceil(t_ms / p - kIterationEpsilon) * p;
}

}  // namespace

std::string_view channel_name(SensorChannel ch) noexcept {
    switch (ch) {
    case SensorChannel::Bend1: return "bend1";
    case SensorChannel::Bend2: return "bend2";
    case SensorChannel::Optic: return "optic";
    case SensorChannel::Piezo: return "piezo";
    case SensorChannel::Fsr: return "fsr";
    case SensorChannel::Slider: return "slider";
    }
    return "slider";
}

std::optional<SensorChannel> parse_channel(std::string_view name) noexcept {
    for (auto ch : kChannels) {
        if (channel_name(ch) == name) {
            return ch;
        }
    }
    return std::nullopt;
}

std::string_view channel_address(SensorChannel ch) noexcept {
    return osc::kSensorAddresses[static_cast<std::size_t>(ch)];
}

std::uint16_t SensorFrame::get(SensorChannel ch) const noexcept {
    switch (ch) {
    case SensorChannel::Bend1: return bend_value1;
    case SensorChannel::Bend2: return bend_value2;
    case SensorChannel::Optic: return optic_value;
    case SensorChannel::Piezo: return piezo_value;
    case SensorChannel::Fsr: return fsr_value;
    case SensorChannel::Slider: return slider_value;
    }
    return 0;
}

void SensorFrame::set(SensorChannel ch, int value) {
    if (value < 0 || value > kAdcMax) {
        throw std::out_of_range("sensor value " + std::to_string(value) + " outside 0..1023");
    }
    const auto v = static_cast<std::uint16_t>(value);
    switch (ch) {
    case SensorChannel::Bend1: bend_value1 = v; break;
    case SensorChannel::Bend2: bend_value2 = v; break;
    case SensorChannel::Optic: optic_value = v; break;
    case SensorChannel::Piezo: piezo_value = v; break;
    case SensorChannel::Fsr: fsr_value = v; break;
    case SensorChannel::Slider: slider_value = v; break;
    }
}

void DebounceConfig::validate() const {
    if (threshold_iterations < 1) {
        throw std::invalid_argument("debounce threshold_iterations must be >= 1");
    }
    if (!(iteration_period_ms > 0) || !std::isfinite(iteration_period_ms)) {
        throw std::invalid_argument("debounce iteration_period_ms must be > 0");
    }
}

int button_pressed(std::optional<double> contact_duration_ms, const DebounceConfig& cfg) {
    if (!contact_duration_ms || *contact_duration_ms <= 0) {
        return 0;
    }
    const double iterations =
        std::floor(*contact_duration_ms / cfg.iteration_period_ms + kIterationEpsilon);
    return iterations > static_cast<double>(cfg.threshold_iterations) ? 1 : 0;
}

double min_press_ms(const DebounceConfig& cfg) {
    return cfg.threshold_iterations * cfg.iteration_period_ms;
}

double action_time(const Action& a) noexcept {
    return std::visit([](const auto& x) { return x.t_ms; }, a);
}

void validate(const JumpScript& script) {
    double last_t = 0;
    std::array<double, osc::kPadCount> pad_free_at{};
    pad_free_at.fill(-1.0);
    std::array<std::size_t, osc::kPadCount> pad_owner{};

    for (std::size_t i = 0; i < script.actions.size(); ++i) {
        const auto& a = script.actions[i];
        const double t = action_time(a);
        if (!std::isfinite(t) || t < 0) {
            throw ScriptError(entry(i) + ": t_ms must be a finite value >= 0");
        }
        if (t < last_t) {
            throw ScriptError(entry(i) + ": t_ms " + std::to_string(t) +
                              " is earlier than the previous action");
        }
        last_t = t;

        if (const auto* c = std::get_if<Contact>(&a)) {
            if (c->pad < 1 || c->pad > osc::kPadCount) {
                throw ScriptError(entry(i) + ": pad " + std::to_string(c->pad) +
                                  " out of range 1..12");
            }
            if (!std::isfinite(c->duration_ms) || c->duration_ms < 0) {
                throw ScriptError(entry(i) + ": duration_ms must be >= 0");
            }
            auto& free_at = pad_free_at[static_cast<std::size_t>(c->pad - 1)];
            if (c->t_ms < free_at) {
                throw ScriptError(entry(i) + ": contact on pad " + std::to_string(c->pad) +
                                  " overlaps " + entry(pad_owner[static_cast<std::size_t>(c->pad - 1)]));
            }
            free_at = c->end_ms();
            pad_owner[static_cast<std::size_t>(c->pad - 1)] = i;
        } else if (const auto* s = std::get_if<SensorSet>(&a)) {
            if (s->value < 0 || s->value > kAdcMax) {
                throw ScriptError(entry(i) + ": sensor value " + std::to_string(s->value) +
                                  " out of range 0..1023");
            }
        }
    }
    if (script.duration_ms && (!std::isfinite(*script.duration_ms) || *script.duration_ms < 0)) {
        throw ScriptError("duration_ms must be >= 0");
    }
}

JumpScript parse_script(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScriptError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("actions") || !doc["actions"].is_array()) {
        throw ScriptError("script must be an object with an \"actions\" array");
    }

    JumpScript script;
    if (doc.contains("duration_ms")) {
        if (!doc["duration_ms"].is_number()) {
            throw ScriptError("duration_ms must be a number");
        }
        script.duration_ms = doc["duration_ms"].get<double>();
    }

    const auto& actions = doc["actions"];
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const auto& a = actions[i];
        auto number = [&](const char* key) -> double {
            if (!a.contains(key) || !a[key].is_number()) {
                throw ScriptError(entry(i) + ": missing numeric field \"" + key + "\"");
            }
            return a[key].get<double>();
        };
        auto integer = [&](const char* key) -> int {
            if (!a.contains(key) || !a[key].is_number_integer()) {
                throw ScriptError(entry(i) + ": missing integer field \"" + key + "\"");
            }
            return a[key].get<int>();
        };
        auto text = [&](const char* key) -> std::string {
            if (!a.contains(key) || !a[key].is_string()) {
                throw ScriptError(entry(i) + ": missing string field \"" + key + "\"");
            }
            return a[key].get<std::string>();
        };

        if (!a.is_object()) {
            throw ScriptError(entry(i) + ": action must be an object");
        }
        const auto kind = text("kind");
        if (kind == "contact") {
            script.actions.emplace_back(Contact{number("t_ms"), integer("pad"), number("duration_ms")});
        } else if (kind == "sensor") {
            const auto name = text("channel");
            const auto ch = parse_channel(name);
            if (!ch) {
                throw ScriptError(entry(i) + ": unknown sensor channel \"" + name + "\"");
            }
            script.actions.emplace_back(SensorSet{number("t_ms"), *ch, integer("value")});
        } else if (kind == "mode") {
            const auto name = text("mode");
            const auto mode = parse_mode(name);
            if (!mode) {
                throw ScriptError(entry(i) + ": unknown mode \"" + name + "\"");
            }
            script.actions.emplace_back(ModeClick{number("t_ms"), *mode});
        } else {
            throw ScriptError(entry(i) + ": unknown action kind \"" + kind + "\"");
        }
    }
    validate(script);
    return script;
}

JumpScript load_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScriptError("cannot read script " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_script(ss.str());
}

std::string to_json(const JumpScript& script) {
    json doc = json::object();
    if (script.duration_ms) {
        doc["duration_ms"] = *script.duration_ms;
    }
    json actions = json::array();
    for (const auto& a : script.actions) {
        if (const auto* c = std::get_if<Contact>(&a)) {
            actions.push_back({{"kind", "contact"}, {"t_ms", c->t_ms}, {"pad", c->pad},
                               {"duration_ms", c->duration_ms}});
        } else if (const auto* s = std::get_if<SensorSet>(&a)) {
            actions.push_back({{"kind", "sensor"}, {"t_ms", s->t_ms},
                               {"channel", std::string(channel_name(s->channel))},
                               {"value", s->value}});
        } else if (const auto* m = std::get_if<ModeClick>(&a)) {
            actions.push_back({{"kind", "mode"}, {"t_ms", m->t_ms},
                               {"mode", std::string(to_string(m->mode))}});
        }
    }
    doc["actions"] = std::move(actions);
    return doc.dump(2);
}

std::int64_t run_length_ms(const JumpScript& script) {
    if (script.duration_ms) {
        return static_cast<std::int64_t>(std::floor(*script.duration_ms / kPollPeriodMs)) *
               kPollPeriodMs;
    }
    double last = 0;
    for (const auto& a : script.actions) {
        double t = action_time(a);
        if (const auto* c = std::get_if<Contact>(&a)) {
            t = c->end_ms();
        }
        last = std::max(last, t);
    }
    return static_cast<std::int64_t>(poll_ceil(last));
}

Simulator::Simulator(DebounceConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Simulator::add_contact(int pad, double start_ms, double duration_ms) {
    if (pad < 1 || pad > osc::kPadCount) {
        throw std::out_of_range("pad " + std::to_string(pad) + " out of range 1..12");
    }
    auto& queue = pending_[static_cast<std::size_t>(pad - 1)];
    queue.push_back(Contact{start_ms, pad, duration_ms});
    std::stable_sort(queue.begin(), queue.end(),
                     [](const Contact& a, const Contact& b) { return a.end_ms() < b.end_ms(); });
}

std::vector<osc::Message> Simulator::poll_step(double now_ms) {
    std::vector<osc::Message> out;
    out.reserve(kChannels.size() + osc::kPadCount);
    for (auto ch : kChannels) {
        out.push_back({std::string(channel_address(ch)), {std::int32_t{frame_.get(ch)}}});
    }

    for (int pad = 1; pad <= osc::kPadCount; ++pad) {
        auto& queue = pending_[static_cast<std::size_t>(pad - 1)];
        std::int32_t pressed = 0;
        // Chatter that ended before this pass is discarded; the first
        // debounced contact is reported.
        auto it = queue.begin();
        while (it != queue.end() && it->end_ms() <= now_ms) {
            if (button_pressed(it->duration_ms, cfg_) == 1) {
                pressed = 1;
                it = queue.erase(it);
                break;
            }
            it = queue.erase(it);
        }
        out.push_back({osc::trigger_address(pad), {pressed}});
    }
    return out;
}

std::vector<TimedMessage> run_script(const JumpScript& script, const DebounceConfig& cfg) {
    validate(script);
    Simulator sim(cfg);
    for (const auto& a : script.actions) {
        if (const auto* c = std::get_if<Contact>(&a)) {
            sim.add_contact(c->pad, c->t_ms, c->duration_ms);
        }
    }

    const auto length = run_length_ms(script);
    std::vector<TimedMessage> stream;
    std::size_t next_action = 0;
    for (std::int64_t now = kPollPeriodMs; now <= length; now += kPollPeriodMs) {
        for (; next_action < script.actions.size() &&
               action_time(script.actions[next_action]) <= static_cast<double>(now);
             ++next_action) {
            if (const auto* s = std::get_if<SensorSet>(&script.actions[next_action])) {
                sim.set_sensor(s->channel, s->value);
            }
        }
        for (auto& msg : sim.poll_step(static_cast<double>(now))) {
            stream.push_back({now, std::move(msg)});
        }
    }
    return stream;
}

}  // namespace hopscotch::firmware
