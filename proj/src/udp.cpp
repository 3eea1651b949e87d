#include "hopscotch/udp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace hopscotch::net {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw SocketError(what + ": " + std::strerror(errno));
}

sockaddr_in make_address(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    const std::string h = host == "localhost" ? "127.0.0.1" : host;
    if (inet_pton(AF_INET, h.c_str(), &addr.sin_addr) != 1) {
        throw SocketError("invalid IPv4 address '" + host + "'");
    }
    return addr;
}

}  // namespace

UniqueFd& UniqueFd::operator=(UniqueFd&& other) noexcept {
    if (this != &other) {
        reset(other.release());
    }
    return *this;
}

int UniqueFd::release() noexcept {
    const int fd = fd_;
    fd_ = -1;
    return fd;
}

void UniqueFd::reset(int fd) noexcept {
    if (fd_ >= 0) {
        ::close(fd_);
    }
    fd_ = fd;
}

UdpSocket UdpSocket::bind(std::uint16_t port, const std::string& host) {
    UniqueFd fd(::socket(AF_INET, SOCK_DGRAM, 0));
    if (!fd) {
        fail("socket");
    }
    const auto addr = make_address(host, port);
    if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        fail("bind udp " + host + ":" + std::to_string(port));
    }
    return UdpSocket(std::move(fd));
}

UdpSocket UdpSocket::open() {
    UniqueFd fd(::socket(AF_INET, SOCK_DGRAM, 0));
    if (!fd) {
        fail("socket");
    }
    return UdpSocket(std::move(fd));
}

std::uint16_t UdpSocket::local_port() const { return net::local_port(fd_.get()); }

void UdpSocket::send_to(std::span<const std::uint8_t> datagram, const std::string& host,
                        std::uint16_t port) const {
    const auto addr = make_address(host, port);
    const auto n = ::sendto(fd_.get(), datagram.data(), datagram.size(), 0,
                            reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
    if (n < 0 || static_cast<std::size_t>(n) != datagram.size()) {
        fail("sendto");
    }
}

std::optional<std::vector<std::uint8_t>> UdpSocket::receive(std::chrono::milliseconds timeout) const {
    pollfd pfd{fd_.get(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (ready < 0) {
        fail("poll");
    }
    if (ready == 0) {
        return std::nullopt;
    }
    std::vector<std::uint8_t> buf(65536);
    const auto n = ::recv(fd_.get(), buf.data(), buf.size(), 0);
    if (n < 0) {
        fail("recv");
    }
    buf.resize(static_cast<std::size_t>(n));
    return buf;
}

UniqueFd tcp_listen(std::uint16_t port, const std::string& host) {
    UniqueFd fd(::socket(AF_INET, SOCK_STREAM, 0));
    if (!fd) {
        fail("socket");
    }
    int one = 1;
    ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    const auto addr = make_address(host, port);
    if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        fail("bind tcp " + host + ":" + std::to_string(port));
    }
    if (::listen(fd.get(), 16) != 0) {
        fail("listen");
    }
    return fd;
}

std::uint16_t local_port(int fd) {
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
        fail("getsockname");
    }
    return ntohs(addr.sin_port);
}

UniqueFd tcp_connect(const std::string& host, std::uint16_t port) {
    UniqueFd fd(::socket(AF_INET, SOCK_STREAM, 0));
    if (!fd) {
        fail("socket");
    }
    const auto addr = make_address(host, port);
    if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        fail("connect " + host + ":" + std::to_string(port));
    }
    return fd;
}

}  // namespace hopscotch::net
