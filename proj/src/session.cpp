#include "hopscotch/session.hpp"

#include "hopscotch/fileio.hpp"
#include "hopscotch/sieve.hpp"

#include <json.hpp>

#include <limits>

namespace hopscotch::engine {

using json = nlohmann::ordered_json;

namespace {

json to_json(const SessionHeader& h) {
    return json{{"kind", "header"},
                {"version", h.version},
                {"sieve", h.sieve},
                {"baseMidi", h.base_midi},
                {"initialMode", std::string(to_string(h.initial_mode))},
                {"created", h.created}};
}

json to_json(const Record& r) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, PadEvent>) {
                return json{{"kind", x.edge == Edge::Press ? "press" : "release"},
                            {"tMs", x.t_ms},
                            {"pad", x.pad}};
            } else if constexpr (std::is_same_v<T, ModeChange>) {
                return json{{"kind", "mode"}, {"tMs", x.t_ms}, {"mode", std::string(to_string(x.mode))}};
            } else if constexpr (std::is_same_v<T, SensorReading>) {
                return json{{"kind", "sensor"}, {"tMs", x.t_ms}, {"address", x.address}, {"value", x.value}};
            } else {
                json j{{"kind", "sound"}, {"tMs", x.t_ms}, {"pad", x.pad}, {"soundId", x.sound_id}};
                if (x.pitch) {
                    j["pitch"] = *x.pitch;
                }
                j["gain"] = x.gain;
                return j;
            }
        },
        r);
}

class LineReader {
public:
    LineReader(const json& j, std::size_t index) : j_(j), index_(index) {}

    [[noreturn]] void fail(const std::string& what) const { throw SessionParseError(index_, what); }

    std::int64_t integer(const char* key) const {
        if (!j_.contains(key) || !j_[key].is_number_integer()) {
            fail(std::string("missing integer field \"") + key + "\"");
        }
        return j_[key].get<std::int64_t>();
    }

    double number(const char* key) const {
        if (!j_.contains(key) || !j_[key].is_number()) {
            fail(std::string("missing numeric field \"") + key + "\"");
        }
        return j_[key].get<double>();
    }

    std::string text(const char* key) const {
        if (!j_.contains(key) || !j_[key].is_string()) {
            fail(std::string("missing string field \"") + key + "\"");
        }
        return j_[key].get<std::string>();
    }

    int pad() const {
        const auto p = integer("pad");
        if (p < 1 || p > 12) {
            fail("pad " + std::to_string(p) + " out of range 1..12");
        }
        return static_cast<int>(p);
    }

    SoundMode mode(const char* key) const {
        const auto name = text(key);
        const auto m = parse_mode(name);
        if (!m) {
            fail("unknown mode \"" + name + "\"");
        }
        return *m;
    }

private:
    const json& j_;
    std::size_t index_;
};

}  // namespace

SessionParseError::SessionParseError(std::size_t record_index, const std::string& what)
    : std::runtime_error("session record " + std::to_string(record_index) + ": " + what),
      record_index_(record_index) {}

std::int64_t record_time(const Record& r) noexcept {
    return std::visit([](const auto& x) { return x.t_ms; }, r);
}

std::string serialize(const SessionLog& log) {
    std::string out = to_json(log.header).dump();
    out += '\n';
    for (const auto& r : log.records) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

SessionLog parse_session(std::string_view text) {
    SessionLog log;
    bool have_header = false;
    std::int64_t last_t = std::numeric_limits<std::int64_t>::min();
    std::size_t index = 0;

    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }

        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SessionParseError(index, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) {
            throw SessionParseError(index, "record is not an object");
        }
        const LineReader in(j, index);
        const auto kind = in.text("kind");

        if (!have_header) {
            if (kind != "header") {
                in.fail("first record must be the header");
            }
            log.header.version = static_cast<int>(in.integer("version"));
            if (log.header.version != kSessionVersion) {
                in.fail("unsupported session version " + std::to_string(log.header.version));
            }
            log.header.sieve = in.text("sieve");
            try {
                (void)sieve::parse(log.header.sieve);
            } catch (const std::exception& e) {
                in.fail(std::string("bad sieve: ") + e.what());
            }
            log.header.base_midi = static_cast<int>(in.integer("baseMidi"));
            if (log.header.base_midi < 0 || log.header.base_midi > 127) {
                in.fail("baseMidi out of range 0..127");
            }
            log.header.initial_mode = in.mode("initialMode");
            log.header.created = j.contains("created") ? in.text("created") : std::string();
            have_header = true;
            ++index;
            continue;
        }

        const auto t = in.integer("tMs");
        if (t < last_t) {
            in.fail("tMs " + std::to_string(t) + " is earlier than the previous record");
        }
        last_t = t;

        if (kind == "press" || kind == "release") {
            log.records.emplace_back(PadEvent{in.pad(), kind == "press" ? Edge::Press : Edge::Release, t});
        } else if (kind == "mode") {
            log.records.emplace_back(ModeChange{t, in.mode("mode")});
        } else if (kind == "sensor") {
            log.records.emplace_back(SensorReading{t, in.text("address"), static_cast<int>(in.integer("value"))});
        } else if (kind == "sound") {
            SoundCommand cmd{t, in.pad(), in.text("soundId"), std::nullopt, in.number("gain")};
            if (j.contains("pitch")) {
                const auto p = in.integer("pitch");
                if (p < 0 || p > 127) {
                    in.fail("pitch out of range 0..127");
                }
                cmd.pitch = static_cast<int>(p);
            }
            if (!(cmd.gain >= 0.0 && cmd.gain <= 1.0)) {
                in.fail("gain out of range 0..1");
            }
            log.records.emplace_back(std::move(cmd));
        } else if (kind == "header") {
            in.fail("duplicate header");
        } else {
            in.fail("unknown record kind \"" + kind + "\"");
        }
        ++index;
    }
    if (!have_header) {
        throw SessionParseError(0, "missing header");
    }
    return log;
}

SessionLog load_session(const std::filesystem::path& path) { return parse_session(read_file(path)); }

void save_session(const std::filesystem::path& path, const SessionLog& log) {
    write_file_atomic(path, serialize(log));
}

std::vector<SoundCommand> recorded_commands(const SessionLog& log) {
    std::vector<SoundCommand> out;
    for (const auto& r : log.records) {
        if (const auto* c = std::get_if<SoundCommand>(&r)) {
            out.push_back(*c);
        }
    }
    return out;
}

}  // namespace hopscotch::engine
