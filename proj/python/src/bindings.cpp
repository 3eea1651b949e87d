#include "hopscotch/engine.hpp"
#include "hopscotch/firmware.hpp"
#include "hopscotch/metrics.hpp"
#include "hopscotch/osc.hpp"
#include "hopscotch/session.hpp"
#include "hopscotch/sieve.hpp"
#include "hopscotch/slip.hpp"
#include "hopscotch/soundscape.hpp"
#include "hopscotch/wav.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hopscotch;

namespace {

std::span<const std::uint8_t> as_span(const py::bytes& b) {
    const std::string_view v(b);
    return {reinterpret_cast<const std::uint8_t*>(v.data()), v.size()};
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
    return {reinterpret_cast<const char*>(v.data()), v.size()};
}

osc::Argument to_argument(const py::handle& h) {
    if (py::isinstance<py::bool_>(h)) {
        throw py::type_error("OSC arguments must be int, float or str");
    }
    if (py::isinstance<py::int_>(h)) {
        return h.cast<std::int32_t>();
    }
    if (py::isinstance<py::float_>(h)) {
        return h.cast<float>();
    }
    if (py::isinstance<py::str>(h)) {
        return h.cast<std::string>();
    }
    throw py::type_error("OSC arguments must be int, float or str");
}

py::object from_argument(const osc::Argument& a) {
    return std::visit([](const auto& v) -> py::object { return py::cast(v); }, a);
}

py::dict command_dict(const engine::SoundCommand& c) {
    py::dict d;
    d["t_ms"] = c.t_ms;
    d["pad"] = c.pad;
    d["sound_id"] = c.sound_id;
    d["pitch"] = c.pitch ? py::object(py::int_(*c.pitch)) : py::object(py::none());
    d["gain"] = c.gain;
    return d;
}

engine::EngineConfig engine_config(const std::string& sieve_expr, int base_midi) {
    engine::EngineConfig cfg;
    cfg.sieve = sieve::parse(sieve_expr);
    cfg.base_midi = base_midi;
    cfg.created = "virtual";
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_hopscotch, m) {
    m.doc() = "Hopscotch music engine core";

    py::register_exception<osc::DecodeError>(m, "OscDecodeError", PyExc_ValueError);
    py::register_exception<osc::EncodeError>(m, "OscEncodeError", PyExc_ValueError);
    py::register_exception<slip::FramingError>(m, "SlipError", PyExc_ValueError);
    py::register_exception<sieve::ParseError>(m, "SieveParseError", PyExc_ValueError);
    py::register_exception<firmware::ScriptError>(m, "ScriptError", PyExc_ValueError);
    py::register_exception<engine::SessionParseError>(m, "SessionParseError", PyExc_ValueError);

    m.def(
        "osc_encode",
        [](const std::string& address, const py::list& args) {
            osc::Message msg{address, {}};
            for (const auto& a : args) msg.args.push_back(to_argument(a));
            return to_bytes(osc::encode(msg));
        },
        py::arg("address"), py::arg("args") = py::list(), "Encode an OSC message; ints are int32, floats float32.");
    m.def(
        "osc_decode",
        [](const py::bytes& data) {
            const auto msg = osc::decode(as_span(data));
            py::list args;
            for (const auto& a : msg.args) args.append(from_argument(a));
            return py::make_tuple(msg.address, args);
        },
        py::arg("data"), "Decode an OSC message into (address, args).");

    m.def("slip_frame", [](const py::bytes& data) { return to_bytes(slip::frame(as_span(data))); }, py::arg("payload"));
    m.def("slip_unframe", [](const py::bytes& data) { return to_bytes(slip::unframe(as_span(data))); }, py::arg("frame"));

    py::class_<sieve::Sieve>(m, "Sieve")
        .def(py::init([](const std::string& expr) { return sieve::parse(expr); }), py::arg("expr"))
        .def("contains", &sieve::Sieve::contains, py::arg("n"))
        .def("__contains__", &sieve::Sieve::contains)
        .def("period", &sieve::Sieve::period)
        .def(
            "generate", [](const sieve::Sieve& s, std::int64_t lo, std::int64_t hi) { return sieve::generate(s, lo, hi).points; },
            py::arg("lo"), py::arg("hi"))
        .def(
            "to_pitch", [](const sieve::Sieve& s, std::int64_t degree, int base) { return sieve::to_pitch(s, degree, base); },
            py::arg("degree"), py::arg("base_midi") = engine::kDefaultBaseMidi)
        .def("__or__", [](const sieve::Sieve& a, const sieve::Sieve& b) { return a | b; })
        .def("__and__", [](const sieve::Sieve& a, const sieve::Sieve& b) { return a & b; })
        .def("__invert__", [](const sieve::Sieve& a) { return !a; })
        .def("__eq__", [](const sieve::Sieve& a, const sieve::Sieve& b) { return a == b; })
        .def("__str__", &sieve::Sieve::to_string)
        .def("__repr__", [](const sieve::Sieve& s) { return "Sieve('" + s.to_string() + "')"; });
    m.def(
        "intervals", [](const std::vector<std::int64_t>& points) { return sieve::intervals(sieve::PointSet{points, 1}); },
        py::arg("points"));

    m.def(
        "button_pressed",
        [](std::optional<double> duration_ms, int threshold, double period_ms) {
            return firmware::button_pressed(duration_ms, firmware::DebounceConfig{threshold, period_ms});
        },
        py::arg("duration_ms"), py::arg("threshold_iterations") = 100, py::arg("iteration_period_ms") = 0.1);
    m.def(
        "run_script",
        [](const std::string& script_json) {
            py::list out;
            for (const auto& tm : firmware::run_script(firmware::parse_script(script_json))) {
                out.append(py::make_tuple(tm.t_ms, tm.message.address, from_argument(tm.message.args.at(0))));
            }
            return out;
        },
        py::arg("script_json"), "Controller output for a jump script as (t_ms, address, value) tuples.");

    m.def(
        "simulate",
        [](const std::string& script_json, const std::string& sieve_expr, int base_midi) {
            const auto script = firmware::parse_script(script_json);
            return engine::serialize(engine::simulate_session(script, {}, engine_config(sieve_expr, base_midi)));
        },
        py::arg("script_json"), py::arg("sieve") = engine::kDefaultSieve, py::arg("base_midi") = engine::kDefaultBaseMidi,
        "Run a jump script through the controller and engine; returns the session log (JSON Lines).");
    m.def(
        "replay",
        [](const std::string& session_text) {
            py::list out;
            for (const auto& c : engine::replay(engine::parse_session(session_text))) out.append(command_dict(c));
            return out;
        },
        py::arg("session_text"));
    m.def(
        "recorded_commands",
        [](const std::string& session_text) {
            py::list out;
            for (const auto& c : engine::recorded_commands(engine::parse_session(session_text))) out.append(command_dict(c));
            return out;
        },
        py::arg("session_text"));

    m.def(
        "render_wav",
        [](const std::string& session_text, std::optional<std::string> manifest, int sample_rate) {
            const auto log = engine::parse_session(session_text);
            const auto s = sieve::parse(log.header.sieve);
            const auto bank = manifest ? soundscape::load_bank(*manifest, s, log.header.base_midi, sample_rate)
                                       : soundscape::SampleBank::fallback(s, log.header.base_midi);
            soundscape::RenderConfig rc;
            rc.sample_rate = sample_rate;
            const auto rendered = soundscape::render(log, bank, rc);
            return to_bytes(wav::encode_pcm16(soundscape::quantize(rendered.mix), sample_rate));
        },
        py::arg("session_text"), py::arg("manifest") = py::none(), py::arg("sample_rate") = soundscape::kDefaultSampleRate,
        "Render a session log's mix to a 16-bit mono WAV image.");
    m.def(
        "wav_onsets",
        [](const py::bytes& wav_bytes, double threshold) {
            const auto audio = wav::decode(as_span(wav_bytes));
            return soundscape::onset_count(audio.mono, threshold, audio.sample_rate);
        },
        py::arg("wav_bytes"), py::arg("threshold") = 0.05);

    m.def("grade", [](double score) { return std::string(1, metrics::to_char(metrics::grade(score))); }, py::arg("score"));
    m.def(
        "metrics",
        [](const std::string& session_text) {
            const auto report = metrics::compute(engine::parse_session(session_text));
            py::dict out;
            for (auto p : metrics::kParameters) {
                out[py::str(std::string(metrics::key(p)))] =
                    py::make_tuple(report[p].value, std::string(1, metrics::to_char(report[p].grade)));
            }
            return out;
        },
        py::arg("session_text"), "Six (score, grade) pairs keyed by parameter name.");
}
