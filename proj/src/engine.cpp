#include "hopscotch/engine.hpp"

#include <algorithm>
#include <cmath>

namespace hopscotch::engine {

namespace {

constexpr double kAdcFullScale = 1023.0;

std::optional<std::size_t> sensor_index(std::string_view address) {
    const auto& all = osc::kSensorAddresses;
    const auto it = std::find(all.begin(), all.end(), address);
    if (it == all.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - all.begin());
}

std::optional<int> int_argument(const osc::Message& msg) {
    if (msg.args.size() != 1) {
        return std::nullopt;
    }
    if (const auto* i = std::get_if<std::int32_t>(&msg.args.front())) {
        return *i;
    }
    if (const auto* f = std::get_if<float>(&msg.args.front())) {
        if (std::isfinite(*f)) {
            return static_cast<int>(std::lround(*f));
        }
    }
    return std::nullopt;
}

}  // namespace

double command_gain(double master_gain, double accent) noexcept {
    return master_gain * (0.5 + 0.5 * accent);
}

Engine::Engine(EngineConfig cfg) : cfg_(std::move(cfg)), mode_(cfg_.initial_mode) {
    if (cfg_.base_midi < 0 || cfg_.base_midi > 127) {
        throw EngineError("base_midi must be in 0..127");
    }
    log_.header.sieve = cfg_.sieve.to_string();
    log_.header.base_midi = cfg_.base_midi;
    log_.header.initial_mode = cfg_.initial_mode;
    log_.header.created = cfg_.created;
}

bool Engine::held(int pad) const {
    if (pad < 1 || pad > osc::kPadCount) {
        throw std::out_of_range("pad out of range 1..12");
    }
    return held_[static_cast<std::size_t>(pad - 1)];
}

void Engine::notify(const Broadcast& b) const {
    if (observer_) {
        observer_(b);
    }
}

IngestResult Engine::ingest(const osc::Message& msg, std::int64_t t_ms) {
    IngestResult result;
    if (const auto pad = osc::parse_trigger_address(msg.address)) {
        if (int_argument(msg).value_or(0) == 1) {
            result.events.push_back({*pad, Edge::Press, t_ms});
            result.events.push_back({*pad, Edge::Release, t_ms});
        }
        return result;
    }
    if (osc::is_sensor_address(msg.address)) {
        const auto value = int_argument(msg);
        if (!value) {
            ++unknown_;
            return result;
        }
        const double before_gain = master_gain_;
        const double before_accent = accent_;
        apply_sensor(msg.address, *value, t_ms);
        result.control_changed = before_gain != master_gain_ || before_accent != accent_;
        return result;
    }
    ++unknown_;
    return result;
}

void Engine::apply_sensor(std::string_view address, int value, std::int64_t t_ms) {
    const auto index = sensor_index(address);
    if (!index) {
        ++unknown_;
        return;
    }
    value = std::clamp(value, 0, firmware::kAdcMax);
    auto& last = last_sensor_[*index];
    if (last == value) {
        return;
    }
    last = value;
    log_.records.emplace_back(SensorReading{t_ms, std::string(address), value});

    if (address == osc::kSlider) {
        master_gain_ = value / kAdcFullScale;
        notify(state());
    } else if (address == osc::kPiezo) {
        accent_ = value / kAdcFullScale;
    }
}

std::vector<SoundCommand> Engine::handle(const osc::Message& msg, std::int64_t t_ms) {
    std::vector<SoundCommand> out;
    for (const auto& ev : ingest(msg, t_ms).events) {
        if (ev.edge == Edge::Press) {
            if (auto cmd = on_press(ev)) {
                out.push_back(std::move(*cmd));
            }
        } else {
            on_release(ev);
        }
    }
    return out;
}

std::optional<SoundCommand> Engine::on_press(const PadEvent& event) {
    if (event.edge != Edge::Press) {
        throw std::invalid_argument("on_press requires a press event");
    }
    auto& is_held = held_.at(static_cast<std::size_t>(event.pad - 1));
    if (is_held) {
        return std::nullopt;
    }
    is_held = true;
    log_.records.emplace_back(event);

    SoundCommand cmd;
    cmd.t_ms = event.t_ms;
    cmd.pad = event.pad;
    cmd.sound_id = sound_id(mode_, event.pad);
    cmd.gain = std::clamp(command_gain(master_gain_, accent_), 0.0, 1.0);
    if (mode_ == SoundMode::Generative) {
        try {
            cmd.pitch = sieve::to_pitch(cfg_.sieve, event.pad - 1, cfg_.base_midi);
        } catch (const sieve::DomainError& e) {
            errors_.push_back("t=" + std::to_string(event.t_ms) + " pad " + std::to_string(event.pad) +
                              ": " + e.what());
            return std::nullopt;
        }
    }
    log_.records.emplace_back(cmd);
    notify(cmd);
    return cmd;
}

void Engine::on_release(const PadEvent& event) {
    if (event.edge != Edge::Release) {
        throw std::invalid_argument("on_release requires a release event");
    }
    auto& is_held = held_.at(static_cast<std::size_t>(event.pad - 1));
    if (!is_held) {
        return;
    }
    is_held = false;
    log_.records.emplace_back(event);
}

void Engine::set_mode(SoundMode mode, std::int64_t t_ms) {
    mode_ = mode;
    log_.records.emplace_back(ModeChange{t_ms, mode});
    notify(state());
}

EngineConfig config_from_header(const SessionHeader& header) {
    EngineConfig cfg;
    cfg.sieve = sieve::parse(header.sieve);
    cfg.base_midi = header.base_midi;
    cfg.initial_mode = header.initial_mode;
    cfg.created = header.created;
    return cfg;
}

std::vector<SoundCommand> replay(const SessionLog& log) {
    Engine engine(config_from_header(log.header));
    std::vector<SoundCommand> out;
    for (const auto& record : log.records) {
        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, PadEvent>) {
                    if (r.edge == Edge::Press) {
                        if (auto cmd = engine.on_press(r)) {
                            out.push_back(std::move(*cmd));
                        }
                    } else {
                        engine.on_release(r);
                    }
                } else if constexpr (std::is_same_v<T, ModeChange>) {
                    engine.set_mode(r.mode, r.t_ms);
                } else if constexpr (std::is_same_v<T, SensorReading>) {
                    engine.apply_sensor(r.address, r.value, r.t_ms);
                }
            },
            record);
    }
    return out;
}

SessionLog simulate_session(const firmware::JumpScript& script, const firmware::DebounceConfig& debounce,
                            EngineConfig cfg) {
    const auto stream = firmware::run_script(script, debounce);

    std::vector<firmware::ModeClick> clicks;
    for (const auto& a : script.actions) {
        if (const auto* m = std::get_if<firmware::ModeClick>(&a)) {
            clicks.push_back(*m);
        }
    }

    Engine engine(std::move(cfg));
    std::size_t next_click = 0;
    // A click at the same instant as a poll takes effect before that poll.
    auto flush_clicks = [&](double until) {
        for (; next_click < clicks.size() && clicks[next_click].t_ms <= until; ++next_click) {
            engine.set_mode(clicks[next_click].mode, std::llround(clicks[next_click].t_ms));
        }
    };
    for (const auto& tm : stream) {
        flush_clicks(static_cast<double>(tm.t_ms));
        engine.handle(tm.message, tm.t_ms);
    }
    flush_clicks(std::numeric_limits<double>::infinity());
    return engine.take_session();
}

}  // namespace hopscotch::engine
