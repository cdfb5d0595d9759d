#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "irrlab/testbed/client.hpp"
#include "irrlab/testbed/server.hpp"

namespace irrlab::testbed {

struct SessionConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = kDefaultPort;
    double rate_hz = 10.0;
    /// FixedUpdate period.
    double tick_ms = 1.0;
    /// Abort after this long without a submission or a completed result.
    double timeout_s = 30.0;
    /// How long to wait for the server's shutdown echo.
    double shutdown_wait_s = 5.0;
};

struct SessionHooks {
    /// Called right after each interaction is sent, with its stopwatch start
    /// time on the global clock.
    std::function<void(std::size_t index, char interaction, Micros submit_us)> on_submit;
    /// Surface the client presents frames on; a private one is used if null.
    std::shared_ptr<DisplaySurface> display;
};

struct SessionResult {
    /// In submission order.
    std::vector<Measurement> measurements;
    std::size_t submitted = 0;
    std::uint64_t protocol_errors = 0;
    std::uint64_t frame_bytes = 0;
    bool timed_out = false;
    bool connection_lost = false;
    bool shutdown_acknowledged = false;

    bool complete() const { return !timed_out && !connection_lost && measurements.size() == submitted; }
};

/// Drives one client session: submits `interactions` at `rate_hz`, ticks
/// the client every `tick_ms` until every interaction has a result, then
/// sends the shutdown message. Throws SessionError if the server cannot be
/// reached; a stalled session returns with timed_out set and partial
/// measurements.
SessionResult run_session(const SessionConfig& cfg, const std::vector<char>& interactions,
                          const SessionHooks& hooks = {});

/// Runs a RenderServer on an ephemeral loopback port in a background thread
/// for the lifetime of this object.
class LocalServer {
public:
    explicit LocalServer(ServerConfig cfg);
    ~LocalServer();
    LocalServer(const LocalServer&) = delete;
    LocalServer& operator=(const LocalServer&) = delete;

    std::uint16_t port() const { return port_; }

    /// Waits for the server to finish its one session.
    ServerStats join();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::uint16_t port_ = 0;
};

} // namespace irrlab::testbed
