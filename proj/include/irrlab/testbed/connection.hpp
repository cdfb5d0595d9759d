#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "irrlab/testbed/message.hpp"

namespace irrlab::testbed {

class SessionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Owns one socket file descriptor.
class UniqueFd {
public:
    UniqueFd() = default;
    explicit UniqueFd(int fd) : fd_(fd) {}
    UniqueFd(UniqueFd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    UniqueFd& operator=(UniqueFd&& o) noexcept;
    UniqueFd(const UniqueFd&) = delete;
    UniqueFd& operator=(const UniqueFd&) = delete;
    ~UniqueFd() { reset(); }

    int get() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void reset(int fd = -1);

private:
    int fd_ = -1;
};

/// A stream socket carrying length-prefixed NetworkMessage payloads.
/// send() may be called from several threads; receive() from one.
class Connection {
public:
    Connection() = default;
    explicit Connection(UniqueFd fd);
    Connection(Connection&& o) noexcept : fd_(std::move(o.fd_)) {}
    Connection& operator=(Connection&& o) noexcept
    {
        fd_ = std::move(o.fd_);
        return *this;
    }

    static Connection connect(const std::string& host, std::uint16_t port);
    /// Both ends of a local stream socket pair.
    static std::pair<Connection, Connection> pair();

    bool valid() const { return fd_.valid(); }

    /// Throws SessionError on a write failure.
    void send(const NetworkMessage& m);

    /// nullopt on orderly close by the peer. Throws SessionError on I/O
    /// failure or ProtocolError on an undecodable payload.
    std::optional<NetworkMessage> receive();

    /// Wakes a blocked receive() and stops both directions.
    void shutdown();
    void close() { fd_.reset(); }

private:
    UniqueFd fd_;
    std::mutex send_mutex_;
};

/// Listening TCP socket. Port 0 binds an ephemeral port.
class Listener {
public:
    Listener(const std::string& host, std::uint16_t port);

    std::uint16_t port() const { return port_; }

    /// Blocks for one client. Throws SessionError if the listener was closed.
    Connection accept();

    /// Unblocks a pending accept().
    void close();

private:
    UniqueFd fd_;
    std::uint16_t port_ = 0;
};

} // namespace irrlab::testbed
