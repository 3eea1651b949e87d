// The interactive core: turns pad presses, mode clicks and sensor readings
// into sound commands and records everything in a SessionLog.
#pragma once

#include "hopscotch/firmware.hpp"
#include "hopscotch/mode.hpp"
#include "hopscotch/osc.hpp"
#include "hopscotch/session.hpp"
#include "hopscotch/sieve.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hopscotch::engine {

inline constexpr const char* kDefaultSieve = "3@0|4@1";
inline constexpr int kDefaultBaseMidi = 48;

struct EngineConfig {
    sieve::Sieve sieve = sieve::parse(kDefaultSieve);
    int base_midi = kDefaultBaseMidi;
    SoundMode initial_mode = SoundMode::Cartoon;
    /// Header timestamp; virtual-time runs leave it fixed for reproducible logs.
    std::string created;
};

/// Sent to UI clients when the mode or master gain changes.
struct StateUpdate {
    SoundMode mode = SoundMode::Cartoon;
    double master_gain = 1.0;

    friend bool operator==(const StateUpdate&, const StateUpdate&) = default;
};

using Broadcast = std::variant<SoundCommand, StateUpdate>;

struct IngestResult {
    /// Press followed by its synthesized release for a "/triggerN" 1.
    std::vector<PadEvent> events;
    bool control_changed = false;
};

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Engine {
public:
    explicit Engine(EngineConfig cfg = {});

    /// Classifies one controller message. Updates master gain (Slider) and
    /// accent (piezo), logs sensor values that changed, counts unknown
    /// addresses. Pad events are returned, not yet applied.
    IngestResult ingest(const osc::Message& msg, std::int64_t t_ms);

    /// ingest() followed by on_press/on_release for each event.
    std::vector<SoundCommand> handle(const osc::Message& msg, std::int64_t t_ms);

    /// Logs the press and answers it with at most one command. A press on a
    /// pad that is already held is ignored. Generative mode with an empty
    /// scale logs the press, records an error and returns nothing.
    std::optional<SoundCommand> on_press(const PadEvent& event);
    void on_release(const PadEvent& event);

    void set_mode(SoundMode mode, std::int64_t t_ms);

    /// Sets a sensor value as if read from the controller.
    void apply_sensor(std::string_view address, int value, std::int64_t t_ms);

    SoundMode mode() const noexcept { return mode_; }
    double master_gain() const noexcept { return master_gain_; }
    double accent() const noexcept { return accent_; }
    bool held(int pad) const;
    std::size_t unknown_addresses() const noexcept { return unknown_; }
    const std::vector<std::string>& errors() const noexcept { return errors_; }
    const SessionLog& session() const noexcept { return log_; }
    SessionLog take_session() { return std::move(log_); }

    StateUpdate state() const noexcept { return {mode_, master_gain_}; }
    void set_observer(std::function<void(const Broadcast&)> observer) { observer_ = std::move(observer); }

private:
    void notify(const Broadcast& b) const;

    EngineConfig cfg_;
    SoundMode mode_;
    double master_gain_ = 1.0;
    double accent_ = 0.0;
    std::array<bool, osc::kPadCount> held_{};
    std::array<std::optional<int>, osc::kSensorAddresses.size()> last_sensor_{};
    std::size_t unknown_ = 0;
    std::vector<std::string> errors_;
    SessionLog log_;
    std::function<void(const Broadcast&)> observer_;
};

/// master × (0.5 + 0.5 × accent)
double command_gain(double master_gain, double accent) noexcept;

/// Builds the engine configuration stored in a session header.
EngineConfig config_from_header(const SessionHeader& header);

/// Recomputes every sound command from the log's inputs (presses,
/// releases, mode changes, sensor values). Equal to recorded_commands()
/// for any log the engine wrote.
std::vector<SoundCommand> replay(const SessionLog& log);

/// Runs the controller simulation and feeds its stream, plus the script's
/// mode clicks, through an engine in virtual time.
SessionLog simulate_session(const firmware::JumpScript& script, const firmware::DebounceConfig& debounce,
                            EngineConfig cfg);

}  // namespace hopscotch::engine
