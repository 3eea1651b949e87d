#include "hopscotch/slip.hpp"

#include <string>

namespace hopscotch::slip {

Bytes frame(std::span<const std::uint8_t> payload) {
    Bytes out;
    out.reserve(payload.size() + 2);
    for (auto b : payload) {
        if (b == kEnd) {
            out.push_back(kEsc);
            out.push_back(kEscEnd);
        } else if (b == kEsc) {
            out.push_back(kEsc);
            out.push_back(kEscEsc);
        } else {
            out.push_back(b);
        }
    }
    out.push_back(kEnd);
    return out;
}

Bytes unframe(std::span<const std::uint8_t> frame) {
    if (frame.empty() || frame.back() != kEnd) {
        throw FramingError("frame is not terminated by END (0xC0)");
    }
    Bytes out;
    out.reserve(frame.size());
    const auto body = frame.first(frame.size() - 1);
    for (std::size_t i = 0; i < body.size(); ++i) {
        const auto b = body[i];
        if (b == kEnd) {
            throw FramingError("END byte inside frame at offset " + std::to_string(i));
        }
        if (b != kEsc) {
            out.push_back(b);
            continue;
        }
        if (i + 1 == body.size()) {
            throw FramingError("dangling escape byte at offset " + std::to_string(i));
        }
        const auto next = body[++i];
        if (next == kEscEnd) {
            out.push_back(kEnd);
        } else if (next == kEscEsc) {
            out.push_back(kEsc);
        } else {
            throw FramingError("invalid escape sequence at offset " + std::to_string(i - 1));
        }
    }
    return out;
}

std::vector<Bytes> StreamDecoder::feed(std::span<const std::uint8_t> bytes) {
    std::vector<Bytes> frames;
    for (auto b : bytes) {
        if (dropping_) {
            dropping_ = b != kEnd;
            continue;
        }
        if (escaped_) {
            escaped_ = false;
            if (b == kEscEnd) {
                current_.push_back(kEnd);
            } else if (b == kEscEsc) {
                current_.push_back(kEsc);
            } else {
                current_.clear();
                ++errors_;
                dropping_ = b != kEnd;
            }
        } else if (b == kEsc) {
            escaped_ = true;
        } else if (b == kEnd) {
            if (!current_.empty()) {
                frames.push_back(std::move(current_));
                current_.clear();
            }
        } else {
            current_.push_back(b);
        }
    }
    return frames;
}

}  // namespace hopscotch::slip
