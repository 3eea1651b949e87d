// OSC 1.0 message codec and the pad address schema.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hopscotch::osc {

using Bytes = std::vector<std::uint8_t>;
using Argument = std::variant<std::int32_t, float, std::string>;

struct Message {
    std::string address;
    std::vector<Argument> args;

    friend bool operator==(const Message&, const Message&) = default;
};

class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error {
public:
    enum class Kind {
        LengthNotMultipleOf4,
        TooShort,
        MissingAddressSlash,
        UnterminatedString,
        MissingTypeTag,
        UnknownTypeTag,
        TruncatedArgument,
        TrailingBytes,
    };

    DecodeError(Kind kind, const std::string& detail);

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

std::string_view to_string(DecodeError::Kind kind) noexcept;

/// Throws EncodeError if the address is empty, lacks a leading '/', or
/// contains a space, '#', or NUL; or if a string argument contains NUL.
void validate(const Message& msg);

/// Address, type tags and arguments, each NUL-terminated/padded to 4 bytes.
/// Numeric arguments are big-endian.
Bytes encode(const Message& msg);

Message decode(std::span<const std::uint8_t> bytes);

// Address schema emitted by the pad firmware.

inline constexpr int kPadCount = 12;
inline constexpr std::string_view kTriggerPrefix = "/trigger";

inline constexpr std::string_view kBend1 = "/bend_data1";
inline constexpr std::string_view kBend2 = "/bend_data2";
inline constexpr std::string_view kOptic = "/optic_data";
inline constexpr std::string_view kPiezo = "/piezo_data";
inline constexpr std::string_view kFsr = "/fsr_data";
inline constexpr std::string_view kSlider = "/Slider_data";

/// In the order the firmware main loop sends them.
inline constexpr std::array<std::string_view, 6> kSensorAddresses = {
    kBend1, kBend2, kOptic, kPiezo, kFsr, kSlider};

bool is_sensor_address(std::string_view address) noexcept;

/// "/triggerN" with N in 1..12 (no sign, no leading zero) yields N.
std::optional<int> parse_trigger_address(std::string_view address) noexcept;

std::string trigger_address(int pad);

}  // namespace hopscotch::osc
