#include "irrlab/harness/experiment.hpp"

#include <algorithm>

#include "irrlab/harness/template.hpp"
#include "irrlab/lmt/frame_source.hpp"

namespace irrlab::harness {

namespace {

testbed::ServerConfig server_config(const ExperimentConfig& cfg, double delay_ms)
{
    testbed::ServerConfig s;
    s.delay_ms = delay_ms;
    s.mode = cfg.mode;
    s.delay_path = cfg.delay_path;
    s.codec = cfg.codec;
    s.scene.resolution = cfg.resolution;
    return s;
}

testbed::SessionConfig session_config(const ExperimentConfig& cfg, std::uint16_t port, double rate_hz)
{
    testbed::SessionConfig s;
    s.port = port;
    s.rate_hz = rate_hz;
    s.tick_ms = cfg.tick_ms;
    s.timeout_s = cfg.timeout_s;
    return s;
}

void require_complete(const testbed::SessionResult& r, const std::string& name)
{
    if (r.complete()) {
        return;
    }
    std::string why = r.timed_out ? "timed out" : r.connection_lost ? "lost its connection" : "is missing results";
    throw SessionFailure("session '" + name + "' " + why + " (" + std::to_string(r.measurements.size()) + " of " +
                         std::to_string(r.submitted) + " results)");
}

std::vector<double> il_of(const std::vector<testbed::Measurement>& ms)
{
    std::vector<double> out;
    out.reserve(ms.size());
    for (const auto& m : ms) {
        out.push_back(m.il_ms);
    }
    return out;
}

} // namespace

void ExperimentConfig::validate() const
{
    if (!(interaction_rate_hz > 0.0)) {
        throw std::invalid_argument("interaction rate must be > 0");
    }
    if (template_path.empty() && interaction_count == 0) {
        throw std::invalid_argument("interaction count must be > 0");
    }
    if (!(injected_delay_ms >= 0.0)) {
        throw std::invalid_argument("injected delay must be >= 0");
    }
}

ExperimentConfig ExperimentConfig::fast_profile(std::string name)
{
    ExperimentConfig cfg;
    cfg.name = std::move(name);
    cfg.interaction_count = 100;
    cfg.interaction_rate_hz = 20.0;
    return cfg;
}

std::vector<char> interactions_for(const ExperimentConfig& cfg)
{
    if (!cfg.template_path.empty()) {
        return load_template(cfg.template_path);
    }
    return generate_interactions(cfg.interaction_count, cfg.seed);
}

RunResult run_experiment(const ExperimentConfig& cfg, std::optional<double> base_mean_ms)
{
    cfg.validate();
    const auto interactions = interactions_for(cfg);

    testbed::LocalServer server(server_config(cfg, cfg.injected_delay_ms));
    auto session = testbed::run_session(session_config(cfg, server.port(), cfg.interaction_rate_hz), interactions);

    RunResult out;
    out.config = cfg;
    out.server = server.join();
    out.protocol_errors = session.protocol_errors;
    require_complete(session, cfg.name);
    out.measurements = std::move(session.measurements);
    out.stats = summarize(il_of(out.measurements));
    if (base_mean_ms) {
        out.shift_ms = out.stats.mean_ms - *base_mean_ms;
    }
    return out;
}

RunResult run_baseline(ExperimentConfig cfg)
{
    cfg.injected_delay_ms = 0.0;
    return run_experiment(cfg);
}

RunResult run_simulated(const ExperimentConfig& cfg, double base_mean_ms)
{
    return run_experiment(cfg, base_mean_ms);
}

double ComparisonReport::max_capture_ms() const
{
    double m = 0.0;
    for (const auto& r : rows) {
        m = std::max(m, r.lmt.mean_capture_ms);
    }
    return m;
}

lmt::LmtConfig ComparisonConfig::default_lmt()
{
    lmt::LmtConfig c;
    c.detector.calibration_samples = 60;
    c.tail_ms = 300.0;
    return c;
}

ComparisonReport run_comparison(const ExperimentConfig& base, const std::vector<double>& delays,
                                const ComparisonConfig& cmp)
{
    ComparisonReport report;
    for (double delay : delays) {
        ExperimentConfig cfg = base;
        cfg.injected_delay_ms = delay;
        cfg.interaction_count = cmp.events;
        cfg.template_path.clear();
        cfg.validate();

        auto display = std::make_shared<testbed::DisplaySurface>();
        // The client starts out showing the scene at rest.
        testbed::ServerSceneState initial;
        initial.resolution = cfg.resolution;
        display->publish(testbed::render_scene(initial));

        lmt::DisplaySurfaceSource source(
            display, lmt::centered_region(cfg.resolution.width, cfg.resolution.height, cmp.reticle_size),
            cmp.refresh_hz);
        lmt::Observer observer(source, cmp.lmt);
        observer.calibrate();

        testbed::LocalServer server(server_config(cfg, delay));
        testbed::SessionHooks hooks;
        hooks.display = display;
        hooks.on_submit = [&observer](std::size_t, char key, Micros submit_us) {
            observer.record_event_at(key, submit_us);
        };

        observer.start();
        precise_sleep_for(ms_to_duration(cmp.lmt.lead_in_ms));
        auto session = testbed::run_session(session_config(cfg, server.port(), cmp.rate_hz),
                                            generate_interactions(cmp.events, cfg.seed), hooks);
        precise_sleep_for(ms_to_duration(cmp.lmt.tail_ms));
        auto lmt_report = observer.finish();
        server.join();
        require_complete(session, cfg.name);

        ComparisonRow row;
        row.delay_ms = delay;
        row.integrated = summarize(il_of(session.measurements));
        row.lmt = std::move(lmt_report);

        double sum = 0.0;
        std::size_t paired = 0;
        for (std::size_t i = 0; i < row.lmt.rows.size() && i < session.measurements.size(); ++i) {
            if (row.lmt.rows[i].il_ms) {
                sum += *row.lmt.rows[i].il_ms - session.measurements[i].il_ms;
                ++paired;
            }
        }
        row.delta_ms = paired > 0 ? sum / static_cast<double>(paired) : 0.0;
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace irrlab::harness
