#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "irrlab/latency_simulator.hpp"
#include "irrlab/testbed/connection.hpp"
#include "irrlab/testbed/scene.hpp"

namespace irrlab::testbed {

inline constexpr std::uint16_t kDefaultPort = 7667;

/// Where the injected network delay sits relative to the server's scene
/// update.
enum class DelayPath {
    response,
    request,
};

DelayPath parse_delay_path(std::string_view s);
std::string_view to_string(DelayPath p);

struct ServerConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = kDefaultPort;
    double delay_ms = 0.0;
    sim::Mode mode = sim::Mode::asynchronous;
    DelayPath delay_path = DelayPath::response;
    ServerSceneState scene{};
    FrameCodec codec = FrameCodec::deflate;
};

struct ServerStats {
    std::uint64_t handled = 0;
    std::uint64_t errors = 0;
    std::uint64_t frame_bytes = 0;
    /// Scene update + render + encode, per scene interaction.
    double mean_render_ms = 0.0;
    bool clean_shutdown = false;
};

/// Single-connection render server. Requests are handled one at a time in
/// arrival order; the latency simulator sits on the configured path.
class RenderServer {
public:
    explicit RenderServer(ServerConfig cfg);

    std::uint16_t port() const { return listener_.port(); }
    const ServerSceneState& scene() const { return scene_; }

    /// Accepts one client and serves it until a shutdown message or EOF.
    ServerStats serve_one();

    /// Unblocks a serve_one() that is still waiting in accept.
    void stop() { listener_.close(); }

private:
    ServerConfig cfg_;
    ServerSceneState scene_;
    Listener listener_;
};

} // namespace irrlab::testbed
