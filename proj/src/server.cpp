#include "hopscotch/server.hpp"

#include "hopscotch/slip.hpp"
#include "hopscotch/websocket.hpp"

#include <json.hpp>

#include <fcntl.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <iostream>

namespace hopscotch::server {

using nlohmann::json;

namespace {

constexpr auto kSniffGrace = std::chrono::milliseconds(200);

void set_nonblocking(int fd) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    ::gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int pad_field(const json& j) {
    if (!j.contains("pad") || !j["pad"].is_number_integer()) {
        throw ClientProtocolError("\"pad\" must be an integer");
    }
    const auto pad = j["pad"].get<long long>();
    if (pad < 1 || pad > osc::kPadCount) {
        throw ClientProtocolError("pad " + std::to_string(pad) + " out of range 1..12");
    }
    return static_cast<int>(pad);
}

}  // namespace

ClientMessage parse_client_message(std::string_view json_line) {
    json j;
    try {
        j = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw ClientProtocolError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw ClientProtocolError("message must be an object with a string \"type\"");
    }
    const auto type = j["type"].get<std::string>();
    if (type == "press") {
        return PressRequest{pad_field(j)};
    }
    if (type == "release") {
        return ReleaseRequest{pad_field(j)};
    }
    if (type == "mode") {
        if (!j.contains("mode") || !j["mode"].is_string()) {
            throw ClientProtocolError("\"mode\" must be a string");
        }
        const auto name = j["mode"].get<std::string>();
        const auto mode = parse_mode(name);
        if (!mode) {
            throw ClientProtocolError("unknown mode \"" + name + "\"");
        }
        return ModeRequest{*mode};
    }
    throw ClientProtocolError("unknown message type \"" + type + "\"");
}

std::string to_json(const ClientMessage& msg) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            nlohmann::ordered_json j;
            if constexpr (std::is_same_v<T, PressRequest>) {
                j["type"] = "press";
                j["pad"] = m.pad;
            } else if constexpr (std::is_same_v<T, ReleaseRequest>) {
                j["type"] = "release";
                j["pad"] = m.pad;
            } else {
                j["type"] = "mode";
                j["mode"] = std::string(to_string(m.mode));
            }
            return j.dump();
        },
        msg);
}

std::string to_json(const engine::Broadcast& b) {
    nlohmann::ordered_json j;
    if (const auto* c = std::get_if<engine::SoundCommand>(&b)) {
        j["type"] = "sound";
        j["pad"] = c->pad;
        j["soundId"] = c->sound_id;
        if (c->pitch) {
            j["pitch"] = *c->pitch;
        }
        j["gain"] = c->gain;
        j["tMs"] = c->t_ms;
    } else {
        const auto& s = std::get<engine::StateUpdate>(b);
        j["type"] = "state";
        j["mode"] = std::string(to_string(s.mode));
        j["masterGain"] = s.master_gain;
    }
    return j.dump();
}

struct Server::Impl {
    enum class Protocol { Unknown, Line, WebSocket };

    struct Client {
        net::UniqueFd fd;
        Protocol protocol = Protocol::Unknown;
        std::chrono::steady_clock::time_point connected;
        std::string in;
        std::string out;
        std::vector<std::string> held;  // broadcasts queued until the protocol is known
        std::string fragment;
        bool closing = false;
        bool dead = false;
    };

    static ServerConfig stamped(ServerConfig c) {
        if (c.engine.created.empty()) {
            c.engine.created = iso_now();
        }
        return c;
    }

    explicit Impl(ServerConfig c)
        : cfg(stamped(std::move(c))),
          engine(cfg.engine),
          udp(net::UdpSocket::bind(cfg.udp_port, cfg.host)),
          listener(net::tcp_listen(cfg.ui_port, cfg.host)) {
        set_nonblocking(udp.fd());
        set_nonblocking(listener.get());
        int fds[2];
        if (::pipe(fds) != 0) {
            throw net::SocketError(std::string("pipe: ") + std::strerror(errno));
        }
        wake_read.reset(fds[0]);
        wake_write.reset(fds[1]);
        set_nonblocking(wake_read.get());
        set_nonblocking(wake_write.get());
        if (cfg.serial_path) {
            serial.reset(::open(cfg.serial_path->c_str(), O_RDONLY | O_NONBLOCK | O_NOCTTY));
            if (!serial) {
                throw net::SocketError("open " + cfg.serial_path->string() + ": " + std::strerror(errno));
            }
        }
        engine.set_observer([this](const engine::Broadcast& b) { broadcast(to_json(b)); });
        t0 = std::chrono::steady_clock::now();
    }

    std::int64_t now_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    }

    // Loop thread only.
    void broadcast(const std::string& text) {
        for (auto& c : clients) {
            if (c->dead || c->closing) {
                continue;
            }
            if (c->protocol == Protocol::Unknown) {
                c->held.push_back(text);
            } else {
                send_text(*c, text);
            }
        }
    }

    void send_text(Client& c, const std::string& text) {
        if (c.protocol == Protocol::WebSocket) {
            const auto frame = ws::encode_text(text);
            c.out.append(frame.begin(), frame.end());
        } else {
            c.out += text;
            c.out += '\n';
        }
    }

    void settle(Client& c, Protocol p) {
        c.protocol = p;
        send_text(c, to_json(engine::Broadcast{engine.state()}));
        for (const auto& text : c.held) {
            send_text(c, text);
        }
        c.held.clear();
    }

    void handle_client_message(std::string_view line) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) {
            return;
        }
        try {
            const auto msg = parse_client_message(line);
            const auto t = now_ms();
            std::visit(
                [&](const auto& m) {
                    using T = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<T, PressRequest>) {
                        engine.on_press({m.pad, engine::Edge::Press, t});
                    } else if constexpr (std::is_same_v<T, ReleaseRequest>) {
                        engine.on_release({m.pad, engine::Edge::Release, t});
                    } else {
                        engine.set_mode(m.mode, t);
                    }
                },
                msg);
        } catch (const ClientProtocolError&) {
            ++stats.bad_client_messages;
        }
    }

    void process_lines(Client& c) {
        std::size_t pos;
        while ((pos = c.in.find('\n')) != std::string::npos) {
            const std::string line = c.in.substr(0, pos);
            c.in.erase(0, pos + 1);
            handle_client_message(line);
        }
    }

    void process_websocket(Client& c) {
        for (;;) {
            std::optional<ws::Decoded> d;
            try {
                d = ws::decode_frame(std::span(reinterpret_cast<const std::uint8_t*>(c.in.data()), c.in.size()));
            } catch (const ws::ProtocolError&) {
                c.dead = true;
                return;
            }
            if (!d) {
                return;
            }
            c.in.erase(0, d->consumed);
            const auto& f = d->frame;
            const std::string payload(f.payload.begin(), f.payload.end());
            switch (f.opcode) {
            case ws::Opcode::Text:
            case ws::Opcode::Continuation:
                c.fragment += payload;
                if (f.fin) {
                    std::string text = std::move(c.fragment);
                    c.fragment.clear();
                    std::size_t start = 0;
                    while (start <= text.size()) {
                        auto nl = text.find('\n', start);
                        if (nl == std::string::npos) {
                            nl = text.size();
                        }
                        handle_client_message(std::string_view(text).substr(start, nl - start));
                        start = nl + 1;
                    }
                }
                break;
            case ws::Opcode::Ping: {
                const auto pong = ws::encode_frame(ws::Opcode::Pong, f.payload);
                c.out.append(pong.begin(), pong.end());
                break;
            }
            case ws::Opcode::Close: {
                const auto close = ws::encode_frame(ws::Opcode::Close, {});
                c.out.append(close.begin(), close.end());
                c.closing = true;
                return;
            }
            default:
                break;
            }
        }
    }

    void process_client_input(Client& c) {
        if (c.protocol == Protocol::Unknown) {
            if (c.in.size() < 4 && std::string_view("GET ").starts_with(c.in)) {
                return;  // not enough bytes to tell
            }
            if (!c.in.starts_with("GET ")) {
                settle(c, Protocol::Line);
            } else {
                std::size_t consumed = 0;
                std::optional<ws::HttpRequest> req;
                try {
                    req = ws::parse_http_request(c.in, consumed);
                } catch (const ws::ProtocolError&) {
                    c.dead = true;
                    return;
                }
                if (!req) {
                    return;
                }
                c.in.erase(0, consumed);
                if (!ws::is_upgrade_request(*req)) {
                    c.out = "HTTP/1.1 426 Upgrade Required\r\nUpgrade: websocket\r\n"
                            "Content-Length: 0\r\nConnection: close\r\n\r\n";
                    c.closing = true;
                    return;
                }
                c.out = ws::handshake_response(*req);
                settle(c, Protocol::WebSocket);
            }
        }
        if (c.protocol == Protocol::Line) {
            process_lines(c);
        } else if (c.protocol == Protocol::WebSocket) {
            process_websocket(c);
        }
    }

    void read_client(Client& c) {
        char buf[4096];
        for (;;) {
            const auto n = ::recv(c.fd.get(), buf, sizeof buf, 0);
            if (n > 0) {
                c.in.append(buf, static_cast<std::size_t>(n));
                continue;
            }
            if (n == 0) {
                c.dead = true;
            } else if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
                c.dead = true;
            }
            break;
        }
        if (!c.in.empty()) {
            std::lock_guard lock(mu);
            process_client_input(c);
        }
    }

    void flush_client(Client& c) {
        while (!c.out.empty()) {
            const auto n = ::send(c.fd.get(), c.out.data(), c.out.size(), MSG_NOSIGNAL);
            if (n > 0) {
                c.out.erase(0, static_cast<std::size_t>(n));
            } else {
                if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
                    return;
                }
                c.dead = true;
                return;
            }
        }
        if (c.closing) {
            c.dead = true;
        }
    }

    void accept_clients() {
        for (;;) {
            const int fd = ::accept(listener.get(), nullptr, nullptr);
            if (fd < 0) {
                return;
            }
            set_nonblocking(fd);
            auto c = std::make_unique<Client>();
            c->fd.reset(fd);
            c->connected = std::chrono::steady_clock::now();
            clients.push_back(std::move(c));
            std::lock_guard lock(mu);
            ++stats.clients_connected;
        }
    }

    void handle_osc(std::span<const std::uint8_t> bytes, bool from_serial) {
        std::lock_guard lock(mu);
        try {
            const auto msg = osc::decode(bytes);
            from_serial ? ++stats.serial_frames : ++stats.datagrams;
            engine.handle(msg, now_ms());
        } catch (const osc::DecodeError&) {
            ++stats.bad_datagrams;
        }
    }

    void read_udp() {
        for (;;) {
            std::uint8_t buf[65536];
            const auto n = ::recv(udp.fd(), buf, sizeof buf, 0);
            if (n < 0) {
                return;
            }
            handle_osc(std::span(buf, static_cast<std::size_t>(n)), false);
        }
    }

    void read_serial() {
        std::uint8_t buf[4096];
        const auto n = ::read(serial.get(), buf, sizeof buf);
        if (n == 0) {
            serial.reset();
            return;
        }
        if (n < 0) {
            if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
                serial.reset();
            }
            return;
        }
        for (const auto& frame : slip.feed(std::span(buf, static_cast<std::size_t>(n)))) {
            handle_osc(frame, true);
        }
    }

    void settle_quiet_clients() {
        const auto now = std::chrono::steady_clock::now();
        for (auto& c : clients) {
            if (c->protocol == Protocol::Unknown && c->in.empty() && now - c->connected >= kSniffGrace) {
                std::lock_guard lock(mu);
                settle(*c, Protocol::Line);
            }
        }
    }

    int poll_timeout_ms() const {
        int timeout = -1;
        const auto now = std::chrono::steady_clock::now();
        for (const auto& c : clients) {
            if (c->protocol == Protocol::Unknown) {
                const auto left =
                    std::chrono::duration_cast<std::chrono::milliseconds>(c->connected + kSniffGrace - now).count();
                const int t = static_cast<int>(std::max<long long>(left, 0)) + 1;
                timeout = timeout < 0 ? t : std::min(timeout, t);
            }
        }
        return timeout;
    }

    void loop() {
        std::vector<pollfd> fds;
        while (!stopping.load()) {
            fds.clear();
            fds.push_back({wake_read.get(), POLLIN, 0});
            fds.push_back({udp.fd(), POLLIN, 0});
            fds.push_back({listener.get(), POLLIN, 0});
            fds.push_back({serial ? serial.get() : -1, POLLIN, 0});
            for (const auto& c : clients) {
                const short events = static_cast<short>(POLLIN | (c->out.empty() ? 0 : POLLOUT));
                fds.push_back({c->fd.get(), events, 0});
            }

            const int ready = ::poll(fds.data(), fds.size(), poll_timeout_ms());
            if (ready < 0 && errno != EINTR) {
                break;
            }
            if (stopping.load()) {
                break;
            }
            if (fds[1].revents & POLLIN) {
                read_udp();
            }
            if (fds[2].revents & POLLIN) {
                accept_clients();
            }
            if (serial && (fds[3].revents & (POLLIN | POLLHUP))) {
                read_serial();
            }
            for (std::size_t i = 0; i < clients.size() && i + 4 < fds.size(); ++i) {
                const auto re = fds[i + 4].revents;
                if (re & (POLLIN | POLLHUP | POLLERR)) {
                    read_client(*clients[i]);
                }
            }
            settle_quiet_clients();
            for (auto& c : clients) {
                if (!c->dead) {
                    flush_client(*c);
                }
            }
            std::erase_if(clients, [](const auto& c) { return c->dead; });
        }
        for (auto& c : clients) {
            flush_client(*c);
        }
        clients.clear();
    }

    void write_session() {
        std::lock_guard lock(mu);
        if (session_written || cfg.session_path.empty()) {
            return;
        }
        engine::save_session(cfg.session_path, engine.session());
        session_written = true;
    }

    ServerConfig cfg;
    engine::Engine engine;
    net::UdpSocket udp;
    net::UniqueFd listener;
    net::UniqueFd serial;
    net::UniqueFd wake_read;
    net::UniqueFd wake_write;
    slip::StreamDecoder slip;
    std::vector<std::unique_ptr<Client>> clients;
    std::chrono::steady_clock::time_point t0;

    mutable std::mutex mu;
    ServerStats stats;
    bool session_written = false;
    std::atomic<bool> stopping{false};
    std::atomic<bool> running{false};
    std::thread thread;
};

Server::Server(ServerConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

Server::~Server() {
    try {
        stop();
    } catch (const std::exception& e) {
        std::cerr << "hopscotch: failed to write session log: " << e.what() << '\n';
    }
}

std::uint16_t Server::udp_port() const { return impl_->udp.local_port(); }

std::uint16_t Server::ui_port() const { return net::local_port(impl_->listener.get()); }

void Server::start() {
    if (impl_->running.exchange(true)) {
        throw std::logic_error("server already running");
    }
    impl_->thread = std::thread([this] {
        impl_->loop();
        impl_->write_session();
    });
}

void Server::run() {
    if (impl_->running.exchange(true)) {
        throw std::logic_error("server already running");
    }
    impl_->loop();
    impl_->write_session();
}

void Server::request_stop() noexcept {
    impl_->stopping.store(true);
    const char b = 1;
    [[maybe_unused]] const auto n = ::write(impl_->wake_write.get(), &b, 1);
}

void Server::stop() {
    request_stop();
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
    impl_->write_session();
}

engine::SessionLog Server::session() const {
    std::lock_guard lock(impl_->mu);
    return impl_->engine.session();
}

ServerStats Server::stats() const {
    std::lock_guard lock(impl_->mu);
    return impl_->stats;
}

}  // namespace hopscotch::server
