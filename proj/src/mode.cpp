#include "hopscotch/mode.hpp"

namespace hopscotch {

std::string_view to_string(SoundMode mode) noexcept {
    switch (mode) {
    case SoundMode::Cartoon: return "cartoon";
    case SoundMode::Animal: return "animal";
    case SoundMode::Generative: return "generative";
    }
    return "cartoon";
}

std::optional<SoundMode> parse_mode(std::string_view name) noexcept {
    if (name == "cartoon") return SoundMode::Cartoon;
    if (name == "animal") return SoundMode::Animal;
    if (name == "generative") return SoundMode::Generative;
    return std::nullopt;
}

std::string_view sound_id_prefix(SoundMode mode) noexcept {
    return mode == SoundMode::Generative ? "gen" : to_string(mode);
}

std::string sound_id(SoundMode mode, int pad) {
    return std::string(sound_id_prefix(mode)) + "/" + std::to_string(pad);
}

}  // namespace hopscotch
