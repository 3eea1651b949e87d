// Just enough RFC 6455 for browser UI clients: the opening handshake and
// unfragmented-or-continued text frames.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hopscotch::ws {

enum class Opcode : std::uint8_t {
    Continuation = 0x0,
    Text = 0x1,
    Binary = 0x2,
    Close = 0x8,
    Ping = 0x9,
    Pong = 0xA,
};

struct Frame {
    bool fin = true;
    Opcode opcode = Opcode::Text;
    std::vector<std::uint8_t> payload;
};

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// base64(SHA-1(key + RFC 6455 GUID))
std::string accept_key(std::string_view client_key);

std::vector<std::uint8_t> encode_frame(Opcode opcode, std::span<const std::uint8_t> payload,
                                       std::optional<std::array<std::uint8_t, 4>> mask = std::nullopt);
std::vector<std::uint8_t> encode_text(std::string_view text);

struct Decoded {
    Frame frame;
    std::size_t consumed = 0;
};

/// nullopt while the buffer holds less than one frame. Throws
/// ProtocolError on frames larger than 1 MiB or reserved bits set.
std::optional<Decoded> decode_frame(std::span<const std::uint8_t> buffer);

struct HttpRequest {
    std::string method;
    std::string target;
    /// Lower-cased names.
    std::map<std::string, std::string> headers;
};

/// Parses a request head terminated by a blank line; nullopt if incomplete.
/// `consumed` receives the head length.
std::optional<HttpRequest> parse_http_request(std::string_view buffer, std::size_t& consumed);

bool is_upgrade_request(const HttpRequest& req);

/// "HTTP/1.1 101 Switching Protocols" response for an upgrade request.
std::string handshake_response(const HttpRequest& req);

}  // namespace hopscotch::ws
