#include "generators.hpp"

#include "hopscotch/osc.hpp"
#include "hopscotch/slip.hpp"

#include <doctest.h>

#include <algorithm>

using namespace hopscotch;
using slip::Bytes;

TEST_CASE("frame escapes END and ESC and terminates with END") {
    CHECK(slip::frame(Bytes{0x01, 0x02}) == Bytes{0x01, 0x02, 0xC0});
    CHECK(slip::frame(Bytes{0xC0}) == Bytes{0xDB, 0xDC, 0xC0});
    CHECK(slip::frame(Bytes{0xDB}) == Bytes{0xDB, 0xDD, 0xC0});
    CHECK(slip::frame(Bytes{}) == Bytes{0xC0});
    CHECK(slip::unframe(Bytes{0xC0}).empty());
}

TEST_CASE("unframe rejects malformed frames") {
    CHECK_THROWS_WITH_AS(slip::unframe(Bytes{0x01, 0xDB, 0xC0}), doctest::Contains("dangling escape"),
                         slip::FramingError);
    CHECK_THROWS_AS(slip::unframe(Bytes{0xDB, 0x01, 0xC0}), slip::FramingError);
    CHECK_THROWS_AS(slip::unframe(Bytes{0x01, 0x02}), slip::FramingError);
    CHECK_THROWS_AS(slip::unframe(Bytes{0x01, 0xC0, 0x02, 0xC0}), slip::FramingError);
    CHECK_THROWS_AS(slip::unframe(Bytes{}), slip::FramingError);
}

TEST_CASE("arbitrary payloads round-trip, including embedded END/ESC") {
    testing::Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        Bytes payload(static_cast<std::size_t>(testing::uniform_int(rng, 0, 64)));
        for (auto& b : payload) {
            // bias toward the special bytes
            const int pick = testing::uniform_int(rng, 0, 3);
            b = pick == 0 ? slip::kEnd : pick == 1 ? slip::kEsc : static_cast<std::uint8_t>(rng());
        }
        const auto framed = slip::frame(payload);
        REQUIRE(std::count(framed.begin(), framed.end(), slip::kEnd) == 1);
        REQUIRE(slip::unframe(framed) == payload);
    }
}

TEST_CASE("stream decoder splits back-to-back frames across arbitrary chunking") {
    testing::Rng rng(11);
    std::vector<Bytes> messages;
    Bytes stream = {slip::kEnd};  // leading END flushes line noise
    for (int i = 0; i < 50; ++i) {
        const auto bytes = osc::encode(testing::random_message(rng));
        messages.push_back(bytes);
        const auto framed = slip::frame(bytes);
        stream.insert(stream.end(), framed.begin(), framed.end());
    }

    slip::StreamDecoder decoder;
    std::vector<Bytes> got;
    std::size_t pos = 0;
    while (pos < stream.size()) {
        const auto n = std::min<std::size_t>(stream.size() - pos, static_cast<std::size_t>(testing::uniform_int(rng, 1, 17)));
        for (auto& f : decoder.feed(std::span(stream).subspan(pos, n))) {
            got.push_back(std::move(f));
        }
        pos += n;
    }
    CHECK(got == messages);
    CHECK(decoder.idle());
    CHECK(decoder.errors() == 0);
}

TEST_CASE("stream decoder drops a frame with a bad escape and resynchronizes") {
    slip::StreamDecoder decoder;
    const auto frames = decoder.feed(Bytes{0x01, 0xDB, 0x05, 0x02, 0xC0, 0x03, 0xC0});
    REQUIRE(frames.size() == 1);
    CHECK(frames[0] == Bytes{0x03});
    CHECK(decoder.errors() == 1);
}
