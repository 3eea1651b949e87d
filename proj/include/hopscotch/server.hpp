// Live service: OSC datagrams from the pad controller, an optional SLIP
// serial stream, and UI socket clients, all feeding one engine loop.
//
// UI clients connect to the UI port either as plain TCP (one JSON object
// per line) or as WebSocket (one JSON object per text message):
//   in:  {"type":"press","pad":N} {"type":"release","pad":N}
//        {"type":"mode","mode":"cartoon"|"animal"|"generative"}
//   out: {"type":"sound","pad":N,"soundId":S,"pitch":P,"gain":G,"tMs":T}
//        {"type":"state","mode":M,"masterGain":G}
#pragma once

#include "hopscotch/engine.hpp"
#include "hopscotch/udp.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>

namespace hopscotch::server {

inline constexpr std::uint16_t kDefaultUdpPort = 9000;
inline constexpr std::uint16_t kDefaultUiPort = 8080;

struct PressRequest {
    int pad = 1;
    friend bool operator==(const PressRequest&, const PressRequest&) = default;
};
struct ReleaseRequest {
    int pad = 1;
    friend bool operator==(const ReleaseRequest&, const ReleaseRequest&) = default;
};
struct ModeRequest {
    SoundMode mode = SoundMode::Cartoon;
    friend bool operator==(const ModeRequest&, const ModeRequest&) = default;
};

using ClientMessage = std::variant<PressRequest, ReleaseRequest, ModeRequest>;

class ClientProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ClientMessage parse_client_message(std::string_view json_line);
std::string to_json(const ClientMessage& msg);
/// Single line, no trailing newline.
std::string to_json(const engine::Broadcast& b);

struct ServerConfig {
    std::string host = "0.0.0.0";
    /// 0 binds an ephemeral port.
    std::uint16_t udp_port = kDefaultUdpPort;
    std::uint16_t ui_port = kDefaultUiPort;
    /// Device or FIFO carrying SLIP-framed OSC.
    std::optional<std::filesystem::path> serial_path;
    /// Written on stop; empty disables.
    std::filesystem::path session_path;
    engine::EngineConfig engine;
};

struct ServerStats {
    std::size_t datagrams = 0;
    std::size_t bad_datagrams = 0;
    std::size_t serial_frames = 0;
    std::size_t bad_client_messages = 0;
    std::size_t clients_connected = 0;
};

class Server {
public:
    /// Binds every socket; throws net::SocketError on failure.
    explicit Server(ServerConfig cfg);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t udp_port() const;
    std::uint16_t ui_port() const;

    /// Runs the loop on a background thread.
    void start();
    /// Runs the loop on the calling thread until stop().
    void run();
    /// Thread-safe. Ends the loop, joins the background thread, writes the session log.
    void stop();
    /// Async-signal-safe: only wakes the loop, which exits and writes the log.
    void request_stop() noexcept;

    /// Consistent copy, callable from any thread.
    engine::SessionLog session() const;
    ServerStats stats() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hopscotch::server
