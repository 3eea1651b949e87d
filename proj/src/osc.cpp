#include "hopscotch/osc.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <sstream>

namespace hopscotch::osc {

namespace {

std::string describe_byte(std::uint8_t b) {
    std::ostringstream os;
    os << "0x" << std::hex;
    os.width(2);
    os.fill('0');
    os << static_cast<int>(b);
    if (b >= 0x20 && b < 0x7f) {
        os << " ('" << static_cast<char>(b) << "')";
    }
    return os.str();
}

void put_padded_string(Bytes& out, std::string_view s) {
    out.insert(out.end(), s.begin(), s.end());
    // at least one NUL, then pad to 4
    out.push_back(0);
    while (out.size() % 4 != 0) {
        out.push_back(0);
    }
}

void put_u32(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const { return pos_; }
    bool at_end() const { return pos_ == bytes_.size(); }

    std::string padded_string(const char* what) {
        const auto begin = bytes_.begin() + static_cast<std::ptrdiff_t>(pos_);
        const auto nul = std::find(begin, bytes_.end(), std::uint8_t{0});
        if (nul == bytes_.end()) {
            throw DecodeError(DecodeError::Kind::UnterminatedString,
                              std::string(what) + " at offset " + std::to_string(pos_));
        }
        std::string s(begin, nul);
        std::size_t next = pos_ + s.size() + 1;
        next = (next + 3) & ~std::size_t{3};
        if (next > bytes_.size()) {
            throw DecodeError(DecodeError::Kind::UnterminatedString,
                              std::string(what) + " padding runs past end");
        }
        pos_ = next;
        return s;
    }

    std::uint32_t u32(char tag) {
        if (bytes_.size() - pos_ < 4) {
            throw DecodeError(DecodeError::Kind::TruncatedArgument,
                              std::string("'") + tag + "' argument at offset " + std::to_string(pos_));
        }
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v = (v << 8) | bytes_[pos_++];
        }
        return v;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

DecodeError::DecodeError(Kind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + (detail.empty() ? "" : ": " + detail)),
      kind_(kind) {}

std::string_view to_string(DecodeError::Kind kind) noexcept {
    switch (kind) {
    case DecodeError::Kind::LengthNotMultipleOf4: return "length not multiple of 4";
    case DecodeError::Kind::TooShort: return "message shorter than 8 bytes";
    case DecodeError::Kind::MissingAddressSlash: return "missing leading '/'";
    case DecodeError::Kind::UnterminatedString: return "unterminated string";
    case DecodeError::Kind::MissingTypeTag: return "missing ',' type tag";
    case DecodeError::Kind::UnknownTypeTag: return "unknown type tag";
    case DecodeError::Kind::TruncatedArgument: return "truncated argument";
    case DecodeError::Kind::TrailingBytes: return "trailing bytes after arguments";
    }
    return "decode error";
}

void validate(const Message& msg) {
    if (msg.address.empty()) {
        throw EncodeError("address is empty");
    }
    if (msg.address.front() != '/') {
        throw EncodeError("address must start with '/', found byte " +
                          describe_byte(static_cast<std::uint8_t>(msg.address.front())));
    }
    for (std::size_t i = 0; i < msg.address.size(); ++i) {
        const auto b = static_cast<std::uint8_t>(msg.address[i]);
        if (b == ' ' || b == '#' || b == 0) {
            throw EncodeError("invalid byte " + describe_byte(b) + " in address at index " +
                              std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < msg.args.size(); ++i) {
        if (const auto* s = std::get_if<std::string>(&msg.args[i])) {
            if (s->find('\0') != std::string::npos) {
                throw EncodeError("string argument " + std::to_string(i) + " contains byte 0x00");
            }
        }
    }
}

Bytes encode(const Message& msg) {
    validate(msg);

    Bytes out;
    out.reserve(msg.address.size() + 8 + msg.args.size() * 8);
    put_padded_string(out, msg.address);

    std::string tags = ",";
    for (const auto& arg : msg.args) {
        tags += std::visit(
            [](const auto& v) -> char {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::int32_t>) {
                    return 'i';
                } else if constexpr (std::is_same_v<T, float>) {
                    return 'f';
                } else {
                    return 's';
                }
            },
            arg);
    }
    put_padded_string(out, tags);

    for (const auto& arg : msg.args) {
        std::visit(
            [&out](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::int32_t>) {
                    put_u32(out, static_cast<std::uint32_t>(v));
                } else if constexpr (std::is_same_v<T, float>) {
                    put_u32(out, std::bit_cast<std::uint32_t>(v));
                } else {
                    put_padded_string(out, v);
                }
            },
            arg);
    }
    return out;
}

Message decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 4 != 0) {
        throw DecodeError(DecodeError::Kind::LengthNotMultipleOf4,
                          "got " + std::to_string(bytes.size()) + " bytes");
    }
    if (bytes.size() < 8) {
        throw DecodeError(DecodeError::Kind::TooShort, "got " + std::to_string(bytes.size()) + " bytes");
    }
    if (bytes[0] != '/') {
        throw DecodeError(DecodeError::Kind::MissingAddressSlash,
                          "first byte is " + describe_byte(bytes[0]));
    }

    Reader in(bytes);
    Message msg;
    msg.address = in.padded_string("address");
    if (in.at_end() || bytes[in.pos()] != ',') {
        throw DecodeError(DecodeError::Kind::MissingTypeTag,
                          "at offset " + std::to_string(in.pos()));
    }
    const std::string tags = in.padded_string("type tag string");

    for (std::size_t i = 1; i < tags.size(); ++i) {
        switch (tags[i]) {
        case 'i':
            msg.args.emplace_back(static_cast<std::int32_t>(in.u32('i')));
            break;
        case 'f':
            msg.args.emplace_back(std::bit_cast<float>(in.u32('f')));
            break;
        case 's':
            if (in.at_end()) {
                throw DecodeError(DecodeError::Kind::TruncatedArgument, "'s' argument missing");
            }
            msg.args.emplace_back(in.padded_string("string argument"));
            break;
        default:
            throw DecodeError(DecodeError::Kind::UnknownTypeTag,
                              std::string("'") + tags[i] + "' at position " + std::to_string(i));
        }
    }
    if (!in.at_end()) {
        throw DecodeError(DecodeError::Kind::TrailingBytes,
                          std::to_string(bytes.size() - in.pos()) + " bytes left");
    }
    return msg;
}

bool is_sensor_address(std::string_view address) noexcept {
    return std::find(kSensorAddresses.begin(), kSensorAddresses.end(), address) !=
           kSensorAddresses.end();
}

std::optional<int> parse_trigger_address(std::string_view address) noexcept {
    if (!address.starts_with(kTriggerPrefix)) {
        return std::nullopt;
    }
    const auto digits = address.substr(kTriggerPrefix.size());
    if (digits.empty() || digits.size() > 2 || digits.front() == '0') {
        return std::nullopt;
    }
    int n = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        n = n * 10 + (c - '0');
    }
    if (n < 1 || n > kPadCount) {
        return std::nullopt;
    }
    return n;
}

std::string trigger_address(int pad) {
    return std::string(kTriggerPrefix) + std::to_string(pad);
}

}  // namespace hopscotch::osc
