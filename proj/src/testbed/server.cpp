#include "irrlab/testbed/server.hpp"

namespace irrlab::testbed {

DelayPath parse_delay_path(std::string_view s)
{
    if (s == "response") return DelayPath::response;
    if (s == "request") return DelayPath::request;
    throw std::invalid_argument("unknown delay path '" + std::string(s) + "'");
}

std::string_view to_string(DelayPath p)
{
    return p == DelayPath::response ? "response" : "request";
}

RenderServer::RenderServer(ServerConfig cfg)
    : cfg_(std::move(cfg)), scene_(cfg_.scene), listener_(cfg_.host, cfg_.port)
{
}

ServerStats RenderServer::serve_one()
{
    Connection conn = listener_.accept();

    ServerStats stats;
    double render_total_ms = 0.0;
    std::uint64_t renders = 0;
    const ServerOptions opts{cfg_.codec};

    auto handle = [&](const NetworkMessage& req) {
        const auto sw = Stopwatch::started();
        NetworkMessage resp = server_handle_message(scene_, req, opts);
        ++stats.handled;
        if (resp.type == MessageType::frame_result) {
            render_total_ms += sw.elapsed_ms();
            ++renders;
            stats.frame_bytes += resp.frame.size();
        } else if (resp.type == MessageType::error) {
            ++stats.errors;
        }
        return resp;
    };
    auto send = [&](const NetworkMessage& m) {
        try {
            conn.send(m);
        } catch (const SessionError&) {
            ++stats.errors;
        }
    };

    {
        sim::LatencySimulator<NetworkMessage> simulator(cfg_.delay_ms, cfg_.mode);
        if (cfg_.delay_path == DelayPath::response) {
            simulator.on_message_ready([&](const auto& r) { send(r.message); });
        } else {
            simulator.on_message_ready([&](const auto& r) { send(handle(r.message)); });
        }

        for (;;) {
            std::optional<NetworkMessage> req;
            try {
                req = conn.receive();
            } catch (const std::runtime_error&) {
                // Framing is lost once a payload fails to decode.
                ++stats.errors;
                break;
            }
            if (!req) {
                break;
            }
            const bool quit = req->type == MessageType::shutdown || req->interaction == keys::quit;
            if (cfg_.delay_path == DelayPath::response) {
                simulator.delay(handle(*req));
            } else {
                simulator.delay(std::move(*req));
            }
            if (quit) {
                stats.clean_shutdown = true;
                break;
            }
        }
        simulator.shutdown();
    }

    if (renders > 0) {
        stats.mean_render_ms = render_total_ms / static_cast<double>(renders);
    }
    conn.close();
    return stats;
}

} // namespace irrlab::testbed
