// Objective proxies for six music parameters of a session, graded on the
// A..E bands (A >= 90%, B 80-90%, C 70-80%, D 60-70%, E below 60%).
#pragma once

#include "hopscotch/session.hpp"

#include <array>
#include <string>
#include <string_view>

namespace hopscotch::metrics {

/// Bumped whenever a proxy definition changes.
inline constexpr int kProxyVersion = 1;

enum class Grade { A, B, C, D, E };

char to_char(Grade g) noexcept;

/// Half-open bands [0.9, 1], [0.8, 0.9), [0.7, 0.8), [0.6, 0.7), [0, 0.6).
/// Throws std::domain_error outside [0, 1].
Grade grade(double score);

enum class Parameter {
    RhythmVariety,
    PitchSensation,
    TextureChange,
    SoundResponse,
    DynamicVariance,
    TimbreChange,
};

inline constexpr std::array<Parameter, 6> kParameters = {
    Parameter::RhythmVariety,   Parameter::PitchSensation, Parameter::TextureChange,
    Parameter::SoundResponse,   Parameter::DynamicVariance, Parameter::TimbreChange};

/// snake_case key, e.g. "rhythm_variety".
std::string_view key(Parameter p) noexcept;
/// Column title, e.g. "Rhythm Variety".
std::string_view title(Parameter p) noexcept;

struct Score {
    double value = 0;
    Grade grade = Grade::E;
};

struct MetricReport {
    std::array<Score, 6> scores{};

    const Score& operator[](Parameter p) const noexcept { return scores[static_cast<std::size_t>(p)]; }
    Score& operator[](Parameter p) noexcept { return scores[static_cast<std::size_t>(p)]; }
};

// Individual proxies. Voices are assumed to last 400 ms for polyphony.
inline constexpr double kRhythmBinMs = 50.0;
inline constexpr double kPolyphonyStepMs = 100.0;
inline constexpr double kNominalVoiceMs = 400.0;
inline constexpr double kResponseWindowMs = 50.0;

/// Commands come from replaying the log, so a report depends only on the
/// log's inputs.
MetricReport compute(const engine::SessionLog& log);

std::string to_json(const MetricReport& report);
/// Grades as rows, parameters as columns, one mark per column.
std::string to_table(const MetricReport& report);

}  // namespace hopscotch::metrics
