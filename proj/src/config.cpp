#include "hopscotch/config.hpp"

#include "hopscotch/fileio.hpp"
#include "hopscotch/sieve.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdlib>

namespace hopscotch {

using nlohmann::json;

void Config::validate() const {
    for (const auto& [name, port] : {std::pair{"udp_port", udp_port}, std::pair{"ws_port", ws_port}}) {
        if (port < 1 || port > 65535) {
            throw ConfigError(std::string(name) + " " + std::to_string(port) + " outside 1..65535");
        }
    }
    if (udp_port == ws_port) {
        throw ConfigError("udp_port and ws_port must differ");
    }
    if (base_midi < 0 || base_midi > 127) {
        throw ConfigError("base_midi " + std::to_string(base_midi) + " outside 0..127");
    }
    try {
        sieve::parse(sieve);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("sieve: ") + e.what());
    }
    try {
        debounce.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

Config parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }

    Config cfg;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "udp_port") {
                cfg.udp_port = value.get<int>();
            } else if (key == "ws_port") {
                cfg.ws_port = value.get<int>();
            } else if (key == "host") {
                cfg.host = value.get<std::string>();
            } else if (key == "sieve") {
                cfg.sieve = value.get<std::string>();
            } else if (key == "base_midi") {
                cfg.base_midi = value.get<int>();
            } else if (key == "bank") {
                const std::filesystem::path p = value.get<std::string>();
                cfg.bank_manifest = p.is_absolute() ? p : base_dir / p;
            } else if (key == "serial") {
                cfg.serial_path = value.get<std::string>();
            } else if (key == "debounce") {
                cfg.debounce.threshold_iterations = value.value("threshold_iterations", cfg.debounce.threshold_iterations);
                cfg.debounce.iteration_period_ms = value.value("iteration_period_ms", cfg.debounce.iteration_period_ms);
            } else {
                throw ConfigError("unknown config key \"" + key + "\"");
            }
        }
    } catch (const json::type_error& e) {
        throw ConfigError(std::string("wrong value type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    try {
        return parse_config(read_file(path), path.parent_path());
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
}

void apply_env(Config& cfg, const std::function<std::optional<std::string>(const char*)>& getenv) {
    for (const auto& [name, target] : {std::pair{"HOPSCOTCH_UDP_PORT", &cfg.udp_port},
                                       std::pair{"HOPSCOTCH_WS_PORT", &cfg.ws_port}}) {
        const auto value = getenv(name);
        if (!value) {
            continue;
        }
        int port = 0;
        const auto* end = value->data() + value->size();
        const auto [ptr, ec] = std::from_chars(value->data(), end, port);
        if (ec != std::errc() || ptr != end) {
            throw ConfigError(std::string(name) + "=\"" + *value + "\" is not a port number");
        }
        *target = port;
    }
}

void apply_env(Config& cfg) {
    apply_env(cfg, [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        return v ? std::optional<std::string>(v) : std::nullopt;
    });
}

}  // namespace hopscotch
