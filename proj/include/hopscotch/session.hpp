// Session records and their JSON Lines file form.
//
//   {"kind":"header","version":1,"sieve":"3@0|4@1","baseMidi":48,"initialMode":"cartoon","created":"..."}
//   {"kind":"mode","tMs":0,"mode":"animal"}
//   {"kind":"sensor","tMs":50,"address":"/Slider_data","value":900}
//   {"kind":"press","tMs":100,"pad":3}
//   {"kind":"sound","tMs":100,"pad":3,"soundId":"animal/3","gain":0.4398}
//   {"kind":"release","tMs":100,"pad":3}
//
// Generative sound records also carry "pitch".
#pragma once

#include "hopscotch/mode.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hopscotch::engine {

inline constexpr int kSessionVersion = 1;

enum class Edge { Press, Release };

struct PadEvent {
    int pad = 1;
    Edge edge = Edge::Press;
    std::int64_t t_ms = 0;

    friend bool operator==(const PadEvent&, const PadEvent&) = default;
};

struct SoundCommand {
    std::int64_t t_ms = 0;
    int pad = 1;
    std::string sound_id;
    /// Generative mode only.
    std::optional<int> pitch;
    double gain = 0;

    friend bool operator==(const SoundCommand&, const SoundCommand&) = default;
};

struct ModeChange {
    std::int64_t t_ms = 0;
    SoundMode mode = SoundMode::Cartoon;

    friend bool operator==(const ModeChange&, const ModeChange&) = default;
};

struct SensorReading {
    std::int64_t t_ms = 0;
    std::string address;
    int value = 0;

    friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

using Record = std::variant<PadEvent, ModeChange, SensorReading, SoundCommand>;

std::int64_t record_time(const Record& r) noexcept;

struct SessionHeader {
    int version = kSessionVersion;
    std::string sieve = "3@0|4@1";
    int base_midi = 48;
    SoundMode initial_mode = SoundMode::Cartoon;
    std::string created;

    friend bool operator==(const SessionHeader&, const SessionHeader&) = default;
};

struct SessionLog {
    SessionHeader header;
    std::vector<Record> records;

    friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

/// Thrown for malformed session text; record_index is the 0-based line
/// number (the header is line 0).
class SessionParseError : public std::runtime_error {
public:
    SessionParseError(std::size_t record_index, const std::string& what);
    std::size_t record_index() const noexcept { return record_index_; }

private:
    std::size_t record_index_;
};

std::string serialize(const SessionLog& log);
SessionLog parse_session(std::string_view text);

SessionLog load_session(const std::filesystem::path& path);
void save_session(const std::filesystem::path& path, const SessionLog& log);

std::vector<SoundCommand> recorded_commands(const SessionLog& log);

}  // namespace hopscotch::engine
