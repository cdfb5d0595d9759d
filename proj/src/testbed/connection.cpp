#include "irrlab/testbed/connection.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace irrlab::testbed {

namespace {

std::string errno_text(const char* what)
{
    return std::string(what) + ": " + std::strerror(errno);
}

bool write_all(int fd, const std::uint8_t* buf, std::size_t n)
{
    while (n > 0) {
        const ssize_t rv = ::send(fd, buf, n, MSG_NOSIGNAL);
        if (rv < 0 && errno == EINTR) {
            continue;
        }
        if (rv <= 0) {
            return false;
        }
        n -= static_cast<std::size_t>(rv);
        buf += rv;
    }
    return true;
}

// 1 on success, 0 on EOF before the first byte, -1 on error or EOF mid-read.
int read_full(int fd, std::uint8_t* buf, std::size_t n)
{
    std::size_t got = 0;
    while (got < n) {
        const ssize_t rv = ::recv(fd, buf + got, n - got, 0);
        if (rv < 0 && errno == EINTR) {
            continue;
        }
        if (rv == 0) {
            return got == 0 ? 0 : -1;
        }
        if (rv < 0) {
            return -1;
        }
        got += static_cast<std::size_t>(rv);
    }
    return 1;
}

void set_nodelay(int fd)
{
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

} // namespace

UniqueFd& UniqueFd::operator=(UniqueFd&& o) noexcept
{
    if (this != &o) {
        reset(std::exchange(o.fd_, -1));
    }
    return *this;
}

void UniqueFd::reset(int fd)
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
    fd_ = fd;
}

Connection::Connection(UniqueFd fd) : fd_(std::move(fd)) {}

Connection Connection::connect(const std::string& host, std::uint16_t port)
{
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const auto service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
        throw SessionError("resolve " + host + ": " + ::gai_strerror(rc));
    }
    UniqueFd fd(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
    if (!fd.valid()) {
        ::freeaddrinfo(res);
        throw SessionError(errno_text("socket"));
    }
    const int rc = ::connect(fd.get(), res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc != 0) {
        throw SessionError(errno_text(("connect " + host + ":" + service).c_str()));
    }
    set_nodelay(fd.get());
    return Connection(std::move(fd));
}

std::pair<Connection, Connection> Connection::pair()
{
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
        throw SessionError(errno_text("socketpair"));
    }
    return {Connection(UniqueFd(fds[0])), Connection(UniqueFd(fds[1]))};
}

void Connection::send(const NetworkMessage& m)
{
    const auto payload = encode_message(m);
    std::vector<std::uint8_t> wire;
    wire.reserve(4 + payload.size());
    put_u32_be(wire, static_cast<std::uint32_t>(payload.size()));
    wire.insert(wire.end(), payload.begin(), payload.end());

    std::lock_guard lk(send_mutex_);
    if (!fd_.valid() || !write_all(fd_.get(), wire.data(), wire.size())) {
        throw SessionError(errno_text("send"));
    }
}

std::optional<NetworkMessage> Connection::receive()
{
    std::uint8_t len_buf[4];
    const int rc = read_full(fd_.get(), len_buf, 4);
    if (rc == 0) {
        return std::nullopt;
    }
    if (rc < 0) {
        throw SessionError("connection lost while reading length prefix");
    }
    const std::uint32_t len = get_u32_be(len_buf);
    if (len > kMaxPayloadBytes) {
        throw ProtocolError("payload length " + std::to_string(len) + " exceeds limit");
    }
    std::vector<std::uint8_t> payload(len);
    if (read_full(fd_.get(), payload.data(), len) != 1) {
        throw SessionError("connection lost mid-message");
    }
    return decode_message(payload);
}

void Connection::shutdown()
{
    if (fd_.valid()) {
        ::shutdown(fd_.get(), SHUT_RDWR);
    }
}

Listener::Listener(const std::string& host, std::uint16_t port)
{
    fd_.reset(::socket(AF_INET, SOCK_STREAM, 0));
    if (!fd_.valid()) {
        throw SessionError(errno_text("socket"));
    }
    int one = 1;
    ::setsockopt(fd_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw SessionError("listen address must be a dotted IPv4 address: " + host);
    }
    if (::bind(fd_.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw SessionError(errno_text(("bind " + host + ":" + std::to_string(port)).c_str()));
    }
    if (::listen(fd_.get(), 1) != 0) {
        throw SessionError(errno_text("listen"));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_.get(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Connection Listener::accept()
{
    for (;;) {
        const int fd = ::accept(fd_.get(), nullptr, nullptr);
        if (fd >= 0) {
            set_nodelay(fd);
            return Connection(UniqueFd(fd));
        }
        if (errno != EINTR) {
            throw SessionError(errno_text("accept"));
        }
    }
}

void Listener::close()
{
    if (fd_.valid()) {
        ::shutdown(fd_.get(), SHUT_RDWR);
    }
}

} // namespace irrlab::testbed
