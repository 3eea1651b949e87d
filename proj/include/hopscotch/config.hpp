#pragma once

#include "hopscotch/firmware.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hopscotch {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Settings shared by the CLI subcommands. File form (all keys optional):
/// {"udp_port": 9000, "ws_port": 8080, "host": "0.0.0.0", "sieve": "3@0|4@1",
///  "base_midi": 48, "bank": "bank.json", "serial": "/dev/ttyUSB0",
///  "debounce": {"threshold_iterations": 100, "iteration_period_ms": 0.1}}
struct Config {
    int udp_port = 9000;
    int ws_port = 8080;
    std::string host = "0.0.0.0";
    std::string sieve = "3@0|4@1";
    int base_midi = 48;
    std::optional<std::filesystem::path> bank_manifest;
    std::optional<std::filesystem::path> serial_path;
    firmware::DebounceConfig debounce;

    /// Ports in 1..65535 and distinct, sieve parses, base_midi in 0..127.
    void validate() const;
};

/// Relative paths in the file resolve against base_dir.
Config parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

/// HOPSCOTCH_UDP_PORT and HOPSCOTCH_WS_PORT override the ports.
void apply_env(Config& cfg, const std::function<std::optional<std::string>(const char*)>& getenv);
void apply_env(Config& cfg);

}  // namespace hopscotch
