// Seeded random inputs shared by the property tests and the acceptance suite.
#pragma once

#include "hopscotch/firmware.hpp"
#include "hopscotch/osc.hpp"
#include "hopscotch/sieve.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace hopscotch::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::string random_text(Rng& rng, int max_len, bool address_safe) {
    std::string s;
    const int len = uniform_int(rng, 0, max_len);
    for (int i = 0; i < len; ++i) {
        char c = 0;
        do {
            c = static_cast<char>(uniform_int(rng, 1, 126));
        } while (address_safe && (c == ' ' || c == '#'));
        s += c;
    }
    return s;
}

inline osc::Message random_message(Rng& rng) {
    osc::Message m;
    m.address = "/" + random_text(rng, 24, true);
    const int nargs = uniform_int(rng, 0, 6);
    for (int i = 0; i < nargs; ++i) {
        switch (uniform_int(rng, 0, 2)) {
        case 0:
            m.args.emplace_back(static_cast<std::int32_t>(std::uniform_int_distribution<std::int64_t>(
                std::numeric_limits<std::int32_t>::min(), std::numeric_limits<std::int32_t>::max())(rng)));
            break;
        case 1: {
            float f = 0;
            do {
                f = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
            } while (!std::isfinite(f));
            m.args.emplace_back(f);
            break;
        }
        default:
            m.args.emplace_back(random_text(rng, 20, false));
        }
    }
    return m;
}

/// Random sieve tree of the given maximum depth, moduli 1..max_modulus.
inline sieve::Sieve random_sieve(Rng& rng, int depth, int max_modulus) {
    if (depth <= 0 || uniform_int(rng, 0, 3) == 0) {
        return sieve::Sieve(uniform_int(rng, 1, max_modulus), uniform_int(rng, -40, 40));
    }
    switch (uniform_int(rng, 0, 2)) {
    case 0: return random_sieve(rng, depth - 1, max_modulus) | random_sieve(rng, depth - 1, max_modulus);
    case 1: return random_sieve(rng, depth - 1, max_modulus) & random_sieve(rng, depth - 1, max_modulus);
    default: return !random_sieve(rng, depth - 1, max_modulus);
    }
}

struct ScriptShape {
    int contacts = 20;
    double min_duration_ms = 0.0;
    double max_duration_ms = 40.0;
    /// Minimum idle time between contacts on the same pad.
    double min_gap_ms = 60.0;
    bool mode_clicks = true;
};

/// Contacts on random pads at non-decreasing times, slider preset so
/// commands are audible.
inline firmware::JumpScript random_script(Rng& rng, const ScriptShape& shape) {
    firmware::JumpScript script;
    script.actions.emplace_back(firmware::SensorSet{0.0, firmware::SensorChannel::Slider, uniform_int(rng, 600, 1023)});
    std::array<double, 12> pad_free{};
    double t = uniform_real(rng, 0, 30);
    for (int i = 0; i < shape.contacts; ++i) {
        const int pad = uniform_int(rng, 1, 12);
        t = std::max(t, pad_free[static_cast<std::size_t>(pad - 1)]);
        const double duration = uniform_real(rng, shape.min_duration_ms, shape.max_duration_ms);
        script.actions.emplace_back(firmware::Contact{t, pad, duration});
        pad_free[static_cast<std::size_t>(pad - 1)] = t + duration + shape.min_gap_ms;
        if (shape.mode_clicks && uniform_int(rng, 0, 5) == 0) {
            script.actions.emplace_back(
                firmware::ModeClick{t, static_cast<SoundMode>(uniform_int(rng, 0, 2))});
        }
        if (uniform_int(rng, 0, 4) == 0) {
            script.actions.emplace_back(firmware::SensorSet{t, firmware::SensorChannel::Piezo, uniform_int(rng, 0, 1023)});
        }
        t += uniform_real(rng, 0, 80);
    }
    return script;
}

}  // namespace hopscotch::testing
