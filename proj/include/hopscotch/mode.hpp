#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace hopscotch {

/// The three mouse-selectable sound sets.
enum class SoundMode { Cartoon, Animal, Generative };

/// "cartoon", "animal", "generative"
std::string_view to_string(SoundMode mode) noexcept;
std::optional<SoundMode> parse_mode(std::string_view name) noexcept;

/// Prefix used in sound ids: "cartoon", "animal", "gen".
std::string_view sound_id_prefix(SoundMode mode) noexcept;

/// "<prefix>/<pad>"
std::string sound_id(SoundMode mode, int pad);

}  // namespace hopscotch
