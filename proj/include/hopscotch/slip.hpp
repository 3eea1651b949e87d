// SLIP (RFC 1055) framing for OSC over a serial byte stream.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hopscotch::slip {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kEnd = 0xC0;
inline constexpr std::uint8_t kEsc = 0xDB;
inline constexpr std::uint8_t kEscEnd = 0xDC;
inline constexpr std::uint8_t kEscEsc = 0xDD;

class FramingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Escapes END/ESC in the payload and terminates with END.
Bytes frame(std::span<const std::uint8_t> payload);

/// Inverse of frame(): the input must be exactly one END-terminated frame.
Bytes unframe(std::span<const std::uint8_t> frame);

/// Incremental decoder for a byte stream carrying back-to-back frames.
/// Empty frames (e.g. a leading END used to flush line noise) are skipped.
class StreamDecoder {
public:
    /// Feeds bytes and returns every frame completed by them. A bad escape
    /// sequence drops the frame in progress and bumps errors().
    std::vector<Bytes> feed(std::span<const std::uint8_t> bytes);

    bool idle() const noexcept { return current_.empty() && !escaped_ && !dropping_; }
    std::size_t errors() const noexcept { return errors_; }

private:
    Bytes current_;
    bool escaped_ = false;
    bool dropping_ = false;
    std::size_t errors_ = 0;
};

}  // namespace hopscotch::slip
