// Virtual-time reproduction of the pad controller's main loop: sample the
// six analog channels, debounce the twelve switches, and emit one OSC
// message per channel every 50 ms.
#pragma once

#include "hopscotch/mode.hpp"
#include "hopscotch/osc.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hopscotch::firmware {

inline constexpr std::int64_t kPollPeriodMs = 50;
inline constexpr int kAdcMax = 1023;

/// Analog channels in the order the main loop transmits them.
enum class SensorChannel { Bend1, Bend2, Optic, Piezo, Fsr, Slider };

inline constexpr std::array<SensorChannel, 6> kChannels = {
    SensorChannel::Bend1, SensorChannel::Bend2, SensorChannel::Optic,
    SensorChannel::Piezo, SensorChannel::Fsr,   SensorChannel::Slider};

/// Script names: "bend1", "bend2", "optic", "piezo", "fsr", "slider".
std::string_view channel_name(SensorChannel ch) noexcept;
std::optional<SensorChannel> parse_channel(std::string_view name) noexcept;
std::string_view channel_address(SensorChannel ch) noexcept;

/// Latest 10-bit ADC reading per channel.
struct SensorFrame {
    std::uint16_t bend_value1 = 0;
    std::uint16_t bend_value2 = 0;
    std::uint16_t optic_value = 0;
    std::uint16_t piezo_value = 0;
    std::uint16_t fsr_value = 0;
    std::uint16_t slider_value = 0;

    std::uint16_t get(SensorChannel ch) const noexcept;
    /// Throws std::out_of_range outside 0..1023.
    void set(SensorChannel ch, int value);

    friend bool operator==(const SensorFrame&, const SensorFrame&) = default;
};

struct DebounceConfig {
    int threshold_iterations = 100;
    double iteration_period_ms = 0.1;

    /// Throws std::invalid_argument on threshold < 1 or period <= 0.
    void validate() const;
};

/// The switch routine busy-waits while the line is low, counting loop
/// iterations, and reports a press only if the count exceeds the threshold.
/// Here the count is floor(duration / iteration_period).
int button_pressed(std::optional<double> contact_duration_ms, const DebounceConfig& cfg = {});

/// Longest contact that still reads as chatter.
double min_press_ms(const DebounceConfig& cfg);

// Scripted physical input.

struct Contact {
    double t_ms = 0;
    int pad = 1;
    double duration_ms = 0;

    double end_ms() const noexcept { return t_ms + duration_ms; }
};

struct SensorSet {
    double t_ms = 0;
    SensorChannel channel = SensorChannel::Slider;
    int value = 0;
};

/// Mouse click on a sound mode; consumed by the engine, not the controller.
struct ModeClick {
    double t_ms = 0;
    SoundMode mode = SoundMode::Cartoon;
};

using Action = std::variant<Contact, SensorSet, ModeClick>;

double action_time(const Action& a) noexcept;

struct JumpScript {
    std::vector<Action> actions;
    /// When absent, the run ends on the first poll at or after the last action.
    std::optional<double> duration_ms;
};

class ScriptError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws ScriptError naming the offending entry, e.g. "actions[3]: pad 13 out of range 1..12".
void validate(const JumpScript& script);

/// Parses the JSON document form:
/// {"duration_ms": 3000, "actions": [
///    {"kind": "contact", "t_ms": 100, "pad": 3, "duration_ms": 40},
///    {"kind": "sensor",  "t_ms": 0,   "channel": "slider", "value": 900},
///    {"kind": "mode",    "t_ms": 500, "mode": "animal"}]}
JumpScript parse_script(std::string_view json_text);
JumpScript load_script(const std::filesystem::path& path);
std::string to_json(const JumpScript& script);

/// Effective run length in ms (a multiple of the poll period).
std::int64_t run_length_ms(const JumpScript& script);

/// Controller state between polls.
class Simulator {
public:
    explicit Simulator(DebounceConfig cfg = {});

    const SensorFrame& frame() const noexcept { return frame_; }
    void set_sensor(SensorChannel ch, int value) { frame_.set(ch, value); }

    /// Registers a contact; it is evaluated at the first poll at or after its end.
    void add_contact(int pad, double start_ms, double duration_ms);

    /// One pass of the main loop: six sensor messages in transmit order,
    /// then "/trigger1".."/trigger12". A trigger carries 1 for at most one
    /// completed, debounced contact per pad per pass; further completed
    /// contacts on that pad wait for the next pass.
    std::vector<osc::Message> poll_step(double now_ms);

private:
    DebounceConfig cfg_;
    SensorFrame frame_;
    std::array<std::vector<Contact>, osc::kPadCount> pending_;
};

struct TimedMessage {
    std::int64_t t_ms = 0;
    osc::Message message;

    friend bool operator==(const TimedMessage&, const TimedMessage&) = default;
};

/// Polls at 50, 100, ... up to run_length_ms(script).
std::vector<TimedMessage> run_script(const JumpScript& script, const DebounceConfig& cfg = {});

}  // namespace hopscotch::firmware
