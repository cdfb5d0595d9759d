#include "irrlab/testbed/session.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <thread>

namespace irrlab::testbed {

namespace {

struct ReceiverState {
    std::atomic<bool> shutdown_seen{false};
    std::atomic<bool> closed{false};
    std::atomic<bool> failed{false};
};

void receive_loop(Connection& conn, FrameQueue& cfb, ReceiverState& state)
{
    try {
        while (auto m = conn.receive()) {
            if (m->type == MessageType::shutdown) {
                state.shutdown_seen = true;
                break;
            }
            cfb.push(std::move(*m));
        }
    } catch (const std::exception&) {
        state.failed = true;
    }
    state.closed = true;
}

} // namespace

SessionResult run_session(const SessionConfig& cfg, const std::vector<char>& interactions,
                          const SessionHooks& hooks)
{
    if (!(cfg.rate_hz > 0.0) || !(cfg.tick_ms > 0.0)) {
        throw std::invalid_argument("rate_hz and tick_ms must be positive");
    }
    for (char c : interactions) {
        if (!is_scene_interaction(c)) {
            throw std::invalid_argument(std::string("session interactions must be 'a' or 'd', got '") + c + "'");
        }
    }

    Connection conn = Connection::connect(cfg.host, cfg.port);
    ClientState client;
    if (hooks.display) {
        client.display = hooks.display;
    }

    ReceiverState rx;
    std::thread receiver([&] { receive_loop(conn, client.cfb, rx); });

    SessionResult result;
    const auto send = [&conn](const NetworkMessage& m) { conn.send(m); };
    const auto submit_period = ms_to_duration(1000.0 / cfg.rate_hz);
    const auto tick_period = ms_to_duration(cfg.tick_ms);
    const auto timeout = ms_to_duration(cfg.timeout_s * 1000.0);

    const auto start = SteadyClock::now();
    auto next_submit = start;
    auto next_tick = start;
    auto last_progress = start;
    std::size_t next_index = 0;

    try {
        for (;;) {
            auto now = SteadyClock::now();
            if (next_index < interactions.size() && now >= next_submit) {
                const char key = interactions[next_index];
                const Guid id = client_submit_interaction(client, key, send);
                if (hooks.on_submit) {
                    hooks.on_submit(next_index, key, client.cib.at(id).timer.start_us());
                }
                ++next_index;
                next_submit += submit_period;
                last_progress = now;
            }
            if (now >= next_tick) {
                if (client_fixed_update(client)) {
                    last_progress = SteadyClock::now();
                }
                // Overrun ticks are dropped, not replayed.
                next_tick += tick_period;
                if (next_tick <= now) {
                    next_tick = now + tick_period;
                }
            }

            if (next_index == interactions.size() && client.cib.empty()) {
                break;
            }
            if (rx.closed && client.cfb.size() == 0) {
                result.connection_lost = true;
                break;
            }
            if (now - last_progress > timeout) {
                result.timed_out = true;
                break;
            }

            auto wake = next_tick;
            if (next_index < interactions.size()) {
                wake = std::min(wake, next_submit);
            }
            std::this_thread::sleep_until(wake);
        }

        if (!result.connection_lost) {
            NetworkMessage quit;
            quit.type = MessageType::shutdown;
            quit.interaction = keys::quit;
            quit.id = Guid::random();
            conn.send(quit);
            const auto deadline = SteadyClock::now() + ms_to_duration(cfg.shutdown_wait_s * 1000.0);
            while (!rx.closed && SteadyClock::now() < deadline) {
                std::this_thread::sleep_for(std::chrono::milliseconds(1));
            }
        }
    } catch (const SessionError&) {
        result.connection_lost = true;
    }

    conn.shutdown();
    receiver.join();
    result.shutdown_acknowledged = rx.shutdown_seen;

    result.measurements = std::move(client.results);
    std::sort(result.measurements.begin(), result.measurements.end(),
              [](const Measurement& a, const Measurement& b) { return a.index < b.index; });
    result.submitted = client.submitted;
    result.protocol_errors = client.protocol_errors;
    result.frame_bytes = client.frame_bytes;
    return result;
}

struct LocalServer::Impl {
    explicit Impl(ServerConfig cfg) : server(std::move(cfg)) {}

    RenderServer server;
    std::future<ServerStats> done;
    std::thread worker;
    bool joined = false;
};

LocalServer::LocalServer(ServerConfig cfg)
{
    cfg.host = "127.0.0.1";
    cfg.port = 0;
    impl_ = std::make_unique<Impl>(std::move(cfg));
    port_ = impl_->server.port();
    std::packaged_task<ServerStats()> task([this] { return impl_->server.serve_one(); });
    impl_->done = task.get_future();
    impl_->worker = std::thread(std::move(task));
}

LocalServer::~LocalServer()
{
    if (!impl_->joined) {
        impl_->server.stop();
        impl_->worker.join();
    }
}

ServerStats LocalServer::join()
{
    if (!impl_->joined) {
        impl_->worker.join();
        impl_->joined = true;
    }
    return impl_->done.get();
}

} // namespace irrlab::testbed
