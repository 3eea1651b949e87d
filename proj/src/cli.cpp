#include "hopscotch/cli.hpp"

#include "hopscotch/config.hpp"
#include "hopscotch/engine.hpp"
#include "hopscotch/fileio.hpp"
#include "hopscotch/metrics.hpp"
#include "hopscotch/server.hpp"
#include "hopscotch/sieve.hpp"
#include "hopscotch/soundscape.hpp"
#include "hopscotch/wav.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <csignal>
#include <ostream>

namespace hopscotch::cli {

namespace {

// Header timestamp for virtual-time sessions; keeps repeated runs byte-identical.
constexpr const char* kVirtualCreated = "virtual";

std::atomic<server::Server*> g_live_server{nullptr};

extern "C" void on_stop_signal(int /*sig*/) {
    if (auto* s = g_live_server.load()) {
        s->request_stop();
    }
}

std::int64_t parse_int(std::string_view s, const std::string& what) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw CLI::ValidationError(what, "\"" + std::string(s) + "\" is not an integer");
    }
    return v;
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        throw CLI::ValidationError("--range", "expected LO..HI, got \"" + text + "\"");
    }
    const auto lo = parse_int(std::string_view(text).substr(0, dots), "--range");
    const auto hi = parse_int(std::string_view(text).substr(dots + 2), "--range");
    if (lo > hi) {
        throw CLI::ValidationError("--range", "LO must not exceed HI");
    }
    return {lo, hi};
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? " " : "") + std::to_string(xs[i]);
    }
    return out;
}

engine::EngineConfig engine_config(const Config& cfg) {
    engine::EngineConfig ec;
    ec.sieve = sieve::parse(cfg.sieve);
    ec.base_midi = cfg.base_midi;
    return ec;
}

int run_sieve(const std::string& expr, const std::string& range, std::ostream& out) {
    const auto [lo, hi] = parse_range(range);
    const auto s = sieve::parse(expr);
    const auto points = sieve::generate(s, lo, hi);
    out << "points: " << join(points.points) << '\n';
    out << "intervals: " << (points.points.size() >= 2 ? join(sieve::intervals(points)) : std::string()) << '\n';
    out << "period: " << points.period << '\n';
    return kExitOk;
}

int run_sim(const Config& cfg, const std::string& script_path, const std::string& out_path, std::ostream& out) {
    const auto script = firmware::load_script(script_path);
    auto ec = engine_config(cfg);
    ec.created = kVirtualCreated;
    const auto log = engine::simulate_session(script, cfg.debounce, std::move(ec));
    engine::save_session(out_path, log);
    out << "wrote " << out_path << ": " << engine::recorded_commands(log).size() << " sound commands over "
        << firmware::run_length_ms(script) << " ms\n";
    return kExitOk;
}

int run_render(const Config& cfg, const std::string& session_path, const std::string& out_path, bool stems,
               int sample_rate, std::ostream& out, std::ostream& err) {
    const auto log = engine::load_session(session_path);
    const auto s = sieve::parse(log.header.sieve);
    const auto bank = cfg.bank_manifest
                          ? soundscape::load_bank(*cfg.bank_manifest, s, log.header.base_midi, sample_rate)
                          : soundscape::SampleBank::fallback(s, log.header.base_midi);
    for (const auto& w : bank.warnings()) {
        err << "soundscape: warning: " << w << '\n';
    }
    soundscape::RenderConfig rc;
    rc.sample_rate = sample_rate;
    rc.stems = stems;
    const auto rendered = soundscape::render(log, bank, rc);
    soundscape::write_render(rendered, out_path, stems);
    out << "wrote " << out_path << ": " << rendered.mix.size() << " samples at " << sample_rate << " Hz";
    if (stems) {
        out << " plus 12 pad stems";
    }
    out << '\n';
    return kExitOk;
}

int run_metrics(const std::string& session_path, const std::string& format, std::ostream& out) {
    const auto report = metrics::compute(engine::load_session(session_path));
    if (format == "table" || format == "both") {
        out << metrics::to_table(report);
    }
    if (format == "both") {
        out << '\n';
    }
    if (format == "json" || format == "both") {
        out << metrics::to_json(report) << '\n';
    }
    return kExitOk;
}

int run_serve(const Config& cfg, const std::string& session_out, std::ostream& out) {
    server::ServerConfig sc;
    sc.host = cfg.host;
    sc.udp_port = static_cast<std::uint16_t>(cfg.udp_port);
    sc.ui_port = static_cast<std::uint16_t>(cfg.ws_port);
    sc.serial_path = cfg.serial_path;
    sc.session_path = session_out;
    sc.engine = engine_config(cfg);

    server::Server srv(std::move(sc));
    out << "listening: osc udp " << cfg.host << ":" << srv.udp_port() << ", ui " << cfg.host << ":"
        << srv.ui_port() << "; session log -> " << session_out << std::endl;

    g_live_server.store(&srv);
    auto old_int = std::signal(SIGINT, on_stop_signal);
    auto old_term = std::signal(SIGTERM, on_stop_signal);
    srv.run();
    std::signal(SIGINT, old_int);
    std::signal(SIGTERM, old_term);
    g_live_server.store(nullptr);
    out << "stopped; session written to " << session_out << std::endl;
    return kExitOk;
}

template <typename F>
int guarded(F&& body, std::ostream& err) {
    try {
        return body();
    } catch (const sieve::ParseError& e) {
        err << "sieve: " << e.what() << '\n';
    } catch (const sieve::DomainError& e) {
        err << "sieve: " << e.what() << '\n';
    } catch (const firmware::ScriptError& e) {
        err << "sim: " << e.what() << '\n';
    } catch (const engine::SessionParseError& e) {
        err << "session: " << e.what() << '\n';
    } catch (const soundscape::BankError& e) {
        err << "soundscape: " << e.what() << '\n';
    } catch (const wav::WavError& e) {
        err << "soundscape: " << e.what() << '\n';
    } catch (const ConfigError& e) {
        err << "config: " << e.what() << '\n';
    } catch (const net::SocketError& e) {
        err << "serve: " << e.what() << '\n';
    } catch (const IoError& e) {
        err << "io: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitFailure;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interactive hopscotch music engine", "hopscotch"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

    std::optional<std::string> sieve_opt;
    std::optional<int> base_midi_opt;
    auto add_engine_flags = [&](CLI::App* sub) {
        sub->add_option("--sieve", sieve_opt, "generative sieve expression (default 3@0|4@1)");
        sub->add_option("--base-midi", base_midi_opt, "MIDI note of scale degree 0 (default 48)");
    };

    auto* serve = app.add_subcommand("serve", "run the live engine (OSC/UDP in, UI socket in/out)");
    std::optional<int> udp_port_opt;
    std::optional<int> ws_port_opt;
    std::optional<std::string> host_opt;
    std::optional<std::string> serial_opt;
    std::string session_out = "session.jsonl";
    serve->add_option("--udp-port", udp_port_opt, "OSC UDP port (default 9000)");
    serve->add_option("--ws-port", ws_port_opt, "UI socket port (default 8080)");
    serve->add_option("--host", host_opt, "bind address (default 0.0.0.0)");
    serve->add_option("--serial", serial_opt, "device or FIFO carrying SLIP-framed OSC");
    serve->add_option("--session-out", session_out, "session log written on stop")->capture_default_str();
    add_engine_flags(serve);

    auto* sim = app.add_subcommand("sim", "simulate the pad controller on a jump script in virtual time");
    std::string script_path;
    std::string sim_out;
    sim->add_option("--script", script_path, "jump script (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", sim_out, "session log to write (JSON Lines)")->required();
    add_engine_flags(sim);

    auto* render = app.add_subcommand("render", "render a session log to WAV");
    std::string render_session;
    std::string render_out;
    bool stems = false;
    std::optional<std::string> bank_opt;
    int sample_rate = soundscape::kDefaultSampleRate;
    render->add_option("--session", render_session, "session log")->required()->check(CLI::ExistingFile);
    render->add_option("--out", render_out, "mix WAV path")->required();
    render->add_flag("--stems", stems, "also write pad_<N>.wav beside the mix");
    render->add_option("--bank", bank_opt, "sample bank manifest (JSON)");
    render->add_option("--sample-rate", sample_rate, "output rate in Hz")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    auto* metrics_cmd = app.add_subcommand("metrics", "score a session on the six music parameters");
    std::string metrics_session;
    std::string format = "both";
    metrics_cmd->add_option("--session", metrics_session, "session log")->required()->check(CLI::ExistingFile);
    metrics_cmd->add_option("--format", format, "table, json or both")
        ->capture_default_str()
        ->check(CLI::IsMember({"table", "json", "both"}));

    auto* sieve_cmd = app.add_subcommand("sieve", "print a sieve's points, intervals and period");
    std::string expr;
    std::string range = "0..24";
    sieve_cmd->add_option("--expr", expr, "sieve expression, e.g. \"3@0|4@1\"")->required();
    sieve_cmd->add_option("--range", range, "LO..HI (inclusive)")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "hopscotch: " << e.what() << "\n\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kExitUsage;
    }

    return guarded(
        [&]() -> int {
            if (sieve_cmd->parsed()) {
                return run_sieve(expr, range, out);
            }

            Config cfg = config_path.empty() ? Config{} : load_config(config_path);
            apply_env(cfg);
            if (sieve_opt) cfg.sieve = *sieve_opt;
            if (base_midi_opt) cfg.base_midi = *base_midi_opt;
            if (udp_port_opt) cfg.udp_port = *udp_port_opt;
            if (ws_port_opt) cfg.ws_port = *ws_port_opt;
            if (host_opt) cfg.host = *host_opt;
            if (serial_opt) cfg.serial_path = *serial_opt;
            if (bank_opt) cfg.bank_manifest = *bank_opt;
            cfg.validate();

            if (sim->parsed()) {
                return run_sim(cfg, script_path, sim_out, out);
            }
            if (render->parsed()) {
                return run_render(cfg, render_session, render_out, stems, sample_rate, out, err);
            }
            if (metrics_cmd->parsed()) {
                return run_metrics(metrics_session, format, out);
            }
            return run_serve(cfg, session_out, out);
        },
        err);
}

}  // namespace hopscotch::cli
