// Minimal POSIX socket wrappers for the OSC/UDP transport.
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopscotch::net {

class SocketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Owns a file descriptor.
class UniqueFd {
public:
    UniqueFd() = default;
    explicit UniqueFd(int fd) noexcept : fd_(fd) {}
    UniqueFd(UniqueFd&& other) noexcept : fd_(other.release()) {}
    UniqueFd& operator=(UniqueFd&& other) noexcept;
    UniqueFd(const UniqueFd&) = delete;
    UniqueFd& operator=(const UniqueFd&) = delete;
    ~UniqueFd() { reset(); }

    int get() const noexcept { return fd_; }
    explicit operator bool() const noexcept { return fd_ >= 0; }
    int release() noexcept;
    void reset(int fd = -1) noexcept;

private:
    int fd_ = -1;
};

/// IPv4 UDP socket. One OSC message per datagram.
class UdpSocket {
public:
    /// Binds to host:port; port 0 picks an ephemeral port.
    static UdpSocket bind(std::uint16_t port, const std::string& host = "0.0.0.0");
    /// Unbound socket for sending.
    static UdpSocket open();

    std::uint16_t local_port() const;
    int fd() const noexcept { return fd_.get(); }

    void send_to(std::span<const std::uint8_t> datagram, const std::string& host,
                 std::uint16_t port) const;

    /// Waits up to `timeout` for one datagram.
    std::optional<std::vector<std::uint8_t>> receive(std::chrono::milliseconds timeout) const;

private:
    explicit UdpSocket(UniqueFd fd) : fd_(std::move(fd)) {}
    UniqueFd fd_;
};

/// TCP listener on host:port (port 0 picks an ephemeral port).
UniqueFd tcp_listen(std::uint16_t port, const std::string& host = "0.0.0.0");
std::uint16_t local_port(int fd);
/// Blocking connect, used by tests and tools.
UniqueFd tcp_connect(const std::string& host, std::uint16_t port);

}  // namespace hopscotch::net
