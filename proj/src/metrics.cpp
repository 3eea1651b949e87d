#include "hopscotch/metrics.hpp"

#include "hopscotch/engine.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hopscotch::metrics {

namespace {

using engine::SoundCommand;

double clamp01(double x) { return std::isfinite(x) ? std::clamp(x, 0.0, 1.0) : 0.0; }

double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) {
        s += x;
    }
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
    if (xs.empty()) {
        return 0.0;
    }
    const double m = mean(xs);
    double ss = 0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

// Entropy of 50 ms-binned inter-onset intervals over log(number of
// intervals), the most bins the session could occupy.
double rhythm_variety(const std::vector<SoundCommand>& cmds) {
    if (cmds.size() < 3) {
        return 0.0;
    }
    std::map<long long, std::size_t> bins;
    for (std::size_t i = 1; i < cmds.size(); ++i) {
        const double ioi = static_cast<double>(cmds[i].t_ms - cmds[i - 1].t_ms);
        ++bins[std::llround(ioi / kRhythmBinMs)];
    }
    const double n = static_cast<double>(cmds.size() - 1);
    double h = 0;
    for (const auto& [bin, count] : bins) {
        const double p = static_cast<double>(count) / n;
        h -= p * std::log(p);
    }
    return clamp01(h / std::log(n));
}

double pitch_sensation(const std::vector<SoundCommand>& cmds) {
    std::set<int> pitch_classes;
    std::set<std::string> sample_ids;
    for (const auto& c : cmds) {
        if (c.pitch) {
            pitch_classes.insert(*c.pitch % 12);
        } else {
            sample_ids.insert(c.sound_id);
        }
    }
    return clamp01(static_cast<double>(pitch_classes.size() + sample_ids.size()) / 12.0);
}

// Coefficient of variation of the number of sounding voices.
double texture_change(const std::vector<SoundCommand>& cmds) {
    if (cmds.empty()) {
        return 0.0;
    }
    const double begin = static_cast<double>(cmds.front().t_ms);
    const double end = static_cast<double>(cmds.back().t_ms) + kNominalVoiceMs;
    std::vector<double> polyphony;
    for (double t = begin; t < end; t += kPolyphonyStepMs) {
        double voices = 0;
        for (const auto& c : cmds) {
            const double start = static_cast<double>(c.t_ms);
            if (start <= t && t < start + kNominalVoiceMs) {
                voices += 1;
            }
        }
        polyphony.push_back(voices);
    }
    const double m = mean(polyphony);
    return m > 0 ? clamp01(stddev(polyphony) / m) : 0.0;
}

double sound_response(const engine::SessionLog& log, const std::vector<SoundCommand>& cmds) {
    std::size_t presses = 0;
    std::size_t answered = 0;
    std::vector<bool> used(cmds.size(), false);
    for (const auto& r : log.records) {
        const auto* ev = std::get_if<engine::PadEvent>(&r);
        if (ev == nullptr || ev->edge != engine::Edge::Press) {
            continue;
        }
        ++presses;
        for (std::size_t i = 0; i < cmds.size(); ++i) {
            const auto dt = cmds[i].t_ms - ev->t_ms;
            if (!used[i] && cmds[i].pad == ev->pad && dt >= 0 && static_cast<double>(dt) <= kResponseWindowMs) {
                used[i] = true;
                ++answered;
                break;
            }
        }
    }
    return presses == 0 ? 0.0 : static_cast<double>(answered) / static_cast<double>(presses);
}

double dynamic_variance(const std::vector<SoundCommand>& cmds) {
    std::vector<double> gains;
    for (const auto& c : cmds) {
        gains.push_back(c.gain);
    }
    return clamp01(stddev(gains) / 0.5);
}

double timbre_change(const engine::SessionLog& log, const std::vector<SoundCommand>& cmds) {
    if (cmds.size() < 2) {
        return 0.0;
    }
    std::size_t changes = 0;
    SoundMode mode = log.header.initial_mode;
    for (const auto& r : log.records) {
        if (const auto* m = std::get_if<engine::ModeChange>(&r)) {
            changes += m->mode != mode ? 1 : 0;
            mode = m->mode;
        }
    }
    for (std::size_t i = 1; i < cmds.size(); ++i) {
        changes += cmds[i].sound_id != cmds[i - 1].sound_id ? 1 : 0;
    }
    return clamp01(static_cast<double>(changes) / static_cast<double>(cmds.size() - 1));
}

}  // namespace

char to_char(Grade g) noexcept { return static_cast<char>('A' + static_cast<int>(g)); }

Grade grade(double score) {
    if (!(score >= 0.0 && score <= 1.0)) {
        throw std::domain_error("score must be in [0, 1]");
    }
    if (score >= 0.90) return Grade::A;
    if (score >= 0.80) return Grade::B;
    if (score >= 0.70) return Grade::C;
    if (score >= 0.60) return Grade::D;
    return Grade::E;
}

std::string_view key(Parameter p) noexcept {
    switch (p) {
    case Parameter::RhythmVariety: return "rhythm_variety";
    case Parameter::PitchSensation: return "pitch_sensation";
    case Parameter::TextureChange: return "texture_change";
    case Parameter::SoundResponse: return "sound_response";
    case Parameter::DynamicVariance: return "dynamic_variance";
    case Parameter::TimbreChange: return "timbre_change";
    }
    return "";
}

std::string_view title(Parameter p) noexcept {
    switch (p) {
    case Parameter::RhythmVariety: return "Rhythm Variety";
    case Parameter::PitchSensation: return "Pitch Sensation";
    case Parameter::TextureChange: return "Texture Change";
    case Parameter::SoundResponse: return "Sound Response";
    case Parameter::DynamicVariance: return "Dynamic Variance";
    case Parameter::TimbreChange: return "Timbre Change";
    }
    return "";
}

MetricReport compute(const engine::SessionLog& log) {
    const auto cmds = engine::replay(log);
    MetricReport report;
    report[Parameter::RhythmVariety].value = rhythm_variety(cmds);
    report[Parameter::PitchSensation].value = pitch_sensation(cmds);
    report[Parameter::TextureChange].value = texture_change(cmds);
    report[Parameter::SoundResponse].value = sound_response(log, cmds);
    report[Parameter::DynamicVariance].value = dynamic_variance(cmds);
    report[Parameter::TimbreChange].value = timbre_change(log, cmds);
    for (auto& s : report.scores) {
        s.grade = grade(s.value);
    }
    return report;
}

std::string to_json(const MetricReport& report) {
    nlohmann::ordered_json doc;
    doc["proxyVersion"] = kProxyVersion;
    for (auto p : kParameters) {
        const auto& s = report[p];
        doc["scores"][std::string(key(p))] = {{"score", s.value}, {"grade", std::string(1, to_char(s.grade))}};
    }
    return doc.dump(2);
}

std::string to_table(const MetricReport& report) {
    std::ostringstream os;
    std::vector<std::size_t> widths;
    os << "     ";
    for (auto p : kParameters) {
        widths.push_back(title(p).size());
        os << " | " << title(p);
    }
    os << '\n';
    for (auto g : {Grade::A, Grade::B, Grade::C, Grade::D, Grade::E}) {
        os << "  " << to_char(g) << "  ";
        for (std::size_t i = 0; i < kParameters.size(); ++i) {
            const bool marked = report[kParameters[i]].grade == g;
            const std::size_t w = widths[i];
            const std::size_t left = (w - 1) / 2;
            os << " | " << std::string(left, ' ') << (marked ? "●" : " ") << std::string(w - 1 - left, ' ');
        }
        os << '\n';
    }
    os << "score";
    for (std::size_t i = 0; i < kParameters.size(); ++i) {
        std::ostringstream v;
        v << std::fixed << std::setprecision(3) << report[kParameters[i]].value;
        const std::size_t w = widths[i];
        const auto text = v.str();
        os << " | " << std::string(w > text.size() ? w - text.size() : 0, ' ') << text;
    }
    os << '\n';
    return os.str();
}

}  // namespace hopscotch::metrics
