#include "hopscotch/websocket.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <cctype>

namespace hopscotch::ws {

namespace {

constexpr std::string_view kGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
constexpr std::uint64_t kMaxPayload = 1U << 20;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool has_token(std::string_view list, std::string_view token) {
    const auto l = lower(list);
    std::size_t pos = 0;
    while (pos <= l.size()) {
        auto comma = l.find(',', pos);
        if (comma == std::string::npos) {
            comma = l.size();
        }
        if (trim(std::string_view(l).substr(pos, comma - pos)) == token) {
            return true;
        }
        pos = comma + 1;
    }
    return false;
}

}  // namespace

std::string accept_key(std::string_view client_key) {
    std::string input(client_key);
    input += kGuid;
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(input.data()), input.size(), digest);
    // 20 bytes -> 28 base64 chars + NUL
    unsigned char encoded[4 * ((SHA_DIGEST_LENGTH + 2) / 3) + 1];
    const int n = EVP_EncodeBlock(encoded, digest, SHA_DIGEST_LENGTH);
    return std::string(reinterpret_cast<const char*>(encoded), static_cast<std::size_t>(n));
}

std::vector<std::uint8_t> encode_frame(Opcode opcode, std::span<const std::uint8_t> payload,
                                       std::optional<std::array<std::uint8_t, 4>> mask) {
    std::vector<std::uint8_t> out;
    out.reserve(payload.size() + 14);
    out.push_back(static_cast<std::uint8_t>(0x80U | static_cast<std::uint8_t>(opcode)));
    const std::uint8_t mask_bit = mask ? 0x80 : 0x00;
    const auto len = static_cast<std::uint64_t>(payload.size());
    if (len < 126) {
        out.push_back(static_cast<std::uint8_t>(mask_bit | len));
    } else if (len <= 0xFFFF) {
        out.push_back(mask_bit | 126);
        out.push_back(static_cast<std::uint8_t>(len >> 8));
        out.push_back(static_cast<std::uint8_t>(len));
    } else {
        out.push_back(mask_bit | 127);
        for (int i = 7; i >= 0; --i) {
            out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
        }
    }
    if (mask) {
        out.insert(out.end(), mask->begin(), mask->end());
        for (std::size_t i = 0; i < payload.size(); ++i) {
            out.push_back(payload[i] ^ (*mask)[i % 4]);
        }
    } else {
        out.insert(out.end(), payload.begin(), payload.end());
    }
    return out;
}

std::vector<std::uint8_t> encode_text(std::string_view text) {
    return encode_frame(Opcode::Text, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::optional<Decoded> decode_frame(std::span<const std::uint8_t> buffer) {
    if (buffer.size() < 2) {
        return std::nullopt;
    }
    const auto b0 = buffer[0];
    const auto b1 = buffer[1];
    if ((b0 & 0x70U) != 0) {
        throw ProtocolError("reserved bits set");
    }
    std::size_t pos = 2;
    std::uint64_t len = b1 & 0x7FU;
    if (len == 126) {
        if (buffer.size() < 4) {
            return std::nullopt;
        }
        len = (std::uint64_t{buffer[2]} << 8) | buffer[3];
        pos = 4;
    } else if (len == 127) {
        if (buffer.size() < 10) {
            return std::nullopt;
        }
        len = 0;
        for (std::size_t i = 2; i < 10; ++i) {
            len = (len << 8) | buffer[i];
        }
        pos = 10;
    }
    if (len > kMaxPayload) {
        throw ProtocolError("frame payload exceeds 1 MiB");
    }
    const bool masked = (b1 & 0x80U) != 0;
    std::array<std::uint8_t, 4> mask{};
    if (masked) {
        if (buffer.size() < pos + 4) {
            return std::nullopt;
        }
        std::copy_n(buffer.begin() + static_cast<std::ptrdiff_t>(pos), 4, mask.begin());
        pos += 4;
    }
    if (buffer.size() < pos + len) {
        return std::nullopt;
    }

    Decoded d;
    d.frame.fin = (b0 & 0x80U) != 0;
    d.frame.opcode = static_cast<Opcode>(b0 & 0x0FU);
    d.frame.payload.assign(buffer.begin() + static_cast<std::ptrdiff_t>(pos),
                           buffer.begin() + static_cast<std::ptrdiff_t>(pos + len));
    if (masked) {
        for (std::size_t i = 0; i < d.frame.payload.size(); ++i) {
            d.frame.payload[i] ^= mask[i % 4];
        }
    }
    d.consumed = pos + static_cast<std::size_t>(len);
    return d;
}

std::optional<HttpRequest> parse_http_request(std::string_view buffer, std::size_t& consumed) {
    const auto end = buffer.find("\r\n\r\n");
    if (end == std::string_view::npos) {
        return std::nullopt;
    }
    consumed = end + 4;
    const auto head = buffer.substr(0, end);

    HttpRequest req;
    auto line_end = head.find("\r\n");
    const auto request_line = head.substr(0, line_end);
    const auto sp1 = request_line.find(' ');
    const auto sp2 = request_line.find(' ', sp1 == std::string_view::npos ? sp1 : sp1 + 1);
    if (sp1 == std::string_view::npos || sp2 == std::string_view::npos) {
        throw ProtocolError("malformed HTTP request line");
    }
    req.method = std::string(request_line.substr(0, sp1));
    req.target = std::string(request_line.substr(sp1 + 1, sp2 - sp1 - 1));

    while (line_end != std::string_view::npos) {
        const auto start = line_end + 2;
        line_end = head.find("\r\n", start);
        const auto line = head.substr(start, line_end == std::string_view::npos ? head.size() - start : line_end - start);
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            continue;
        }
        req.headers[lower(trim(line.substr(0, colon)))] = std::string(trim(line.substr(colon + 1)));
    }
    return req;
}

bool is_upgrade_request(const HttpRequest& req) {
    const auto find = [&](const char* name) -> std::string_view {
        const auto it = req.headers.find(name);
        return it == req.headers.end() ? std::string_view() : std::string_view(it->second);
    };
    return req.method == "GET" && has_token(find("upgrade"), "websocket") &&
           has_token(find("connection"), "upgrade") && !find("sec-websocket-key").empty();
}

std::string handshake_response(const HttpRequest& req) {
    return "HTTP/1.1 101 Switching Protocols\r\n"
           "Upgrade: websocket\r\n"
           "Connection: Upgrade\r\n"
           "Sec-WebSocket-Accept: " +
           accept_key(req.headers.at("sec-websocket-key")) + "\r\n\r\n";
}

}  // namespace hopscotch::ws
