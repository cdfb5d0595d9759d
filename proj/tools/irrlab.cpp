// irrlab: run the testbed, the latency simulator and the observer tool from
// the command line.
//
// Exit codes: 0 success, 1 usage error, 2 session failure, 3 tolerance
// violation.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "irrlab/harness/experiment.hpp"
#include "irrlab/harness/report.hpp"
#include "irrlab/harness/template.hpp"
#include "irrlab/lmt/frame_source.hpp"
#include "irrlab/lmt/observer.hpp"
#include "irrlab/testbed/server.hpp"
#include "irrlab/testbed/session.hpp"

using namespace irrlab;
namespace fs = std::filesystem;

namespace {

enum Exit : int { ok = 0, usage = 1, session_failure = 2, tolerance = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ToleranceViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raw option values; enums are parsed after CLI11 is done so bad values get
// the same treatment as any other usage error.
struct ExperimentFlags {
    std::string name;
    double delay_ms = 0.0;
    double rate_hz = 10.0;
    std::size_t count = 1000;
    std::string template_path;
    std::uint64_t seed = 42;
    std::string output_dir = "results";
    std::string mode = "async";
    std::string delay_path = "response";
    std::string codec = "deflate";
    std::string resolution = "256x256";
    double tick_ms = 1.0;
    double timeout_s = 30.0;
    bool fast = false;

    harness::ExperimentConfig build(CLI::App& cmd) const
    {
        harness::ExperimentConfig cfg;
        if (fast) {
            cfg = harness::ExperimentConfig::fast_profile();
        }
        cfg.name = name;
        cfg.injected_delay_ms = delay_ms;
        if (!fast || cmd.count("--rate") > 0) cfg.interaction_rate_hz = rate_hz;
        if (!fast || cmd.count("--count") > 0) cfg.interaction_count = count;
        cfg.template_path = template_path;
        cfg.seed = seed;
        cfg.output_dir = output_dir;
        cfg.tick_ms = tick_ms;
        cfg.timeout_s = timeout_s;
        try {
            cfg.mode = sim::parse_mode(mode);
            cfg.delay_path = testbed::parse_delay_path(delay_path);
            cfg.codec = testbed::parse_codec(codec);
            cfg.resolution = testbed::parse_resolution(resolution);
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return cfg;
    }
};

// `--config FILE` is expanded into `--key=value` arguments before parsing
// (see expand_config); the option only exists so --help lists it.
void add_config_flag(CLI::App* cmd)
{
    static std::string sink;
    cmd->add_option("--config", sink, "key=value file of option defaults; later flags override it");
}

// Replaces every `--config FILE` with the file's entries, in place, so flags
// after it win under the take-last policy.
std::vector<std::string> expand_config(int argc, char** argv)
{
    std::vector<std::string> out;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        std::string file;
        if (arg == "--config") {
            if (i + 1 >= argc) {
                throw UsageError("--config needs a file");
            }
            file = argv[++i];
        } else if (arg.rfind("--config=", 0) == 0) {
            file = arg.substr(9);
        } else {
            out.push_back(std::move(arg));
            continue;
        }
        if (!fs::is_regular_file(file)) {
            throw UsageError("cannot read config file " + file);
        }
        for (const auto& item : CLI::ConfigINI().from_file(file)) {
            if (item.name == "++" || item.name == "--") {
                continue; // section markers
            }
            out.push_back("--" + item.fullname() + "=" + CLI::detail::join(item.inputs, ","));
        }
    }
    return out;
}

void add_server_flags(CLI::App* cmd, ExperimentFlags& f)
{
    cmd->add_option("--mode", f.mode, "Simulator mode: async or sync")->capture_default_str();
    cmd->add_option("--delay-path", f.delay_path, "Where the delay sits: response or request")->capture_default_str();
    cmd->add_option("--codec", f.codec, "Frame codec: deflate, raw or quantized")->capture_default_str();
    cmd->add_option("--resolution", f.resolution, "Frame size WxH")->capture_default_str();
}

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f, const std::string& default_name)
{
    f.name = default_name;
    add_config_flag(cmd);
    cmd->add_option("--experiment,--name", f.name, "Experiment name (output subdirectory)")->capture_default_str();
    cmd->add_option("--rate", f.rate_hz, "Interactions per second")->capture_default_str();
    cmd->add_option("--count", f.count, "Interactions when no template is given")->capture_default_str();
    cmd->add_option("--template", f.template_path, "Interaction template, one a/d per line");
    cmd->add_option("--seed", f.seed, "Seed for generated interactions")->capture_default_str();
    cmd->add_option("--output-dir", f.output_dir, "Results root")->capture_default_str();
    cmd->add_option("--tick-ms", f.tick_ms, "Client update period")->capture_default_str();
    cmd->add_option("--timeout", f.timeout_s, "Session stall timeout in seconds")->capture_default_str();
    cmd->add_flag("--fast", f.fast, "Fast profile: 100 interactions at 20 Hz");
    add_server_flags(cmd, f);
}

std::vector<double> parse_delays(const std::vector<double>& delays)
{
    for (double d : delays) {
        if (!(d >= 0.0)) {
            throw UsageError("delays must be >= 0");
        }
    }
    return delays;
}

void print_run(const harness::RunResult& r, const fs::path& dir)
{
    std::cout << harness::render_table({harness::table_row(r)}) << "wrote " << dir.string() << "\n";
}

// ---------------------------------------------------------------------------

int cmd_serve(const ExperimentFlags& f, CLI::App&, const std::string& host, std::uint16_t port, int sessions)
{
    testbed::ServerConfig cfg;
    cfg.host = host;
    cfg.port = port;
    cfg.delay_ms = f.delay_ms;
    try {
        cfg.mode = sim::parse_mode(f.mode);
        cfg.delay_path = testbed::parse_delay_path(f.delay_path);
        cfg.codec = testbed::parse_codec(f.codec);
        cfg.scene.resolution = testbed::parse_resolution(f.resolution);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (!(cfg.delay_ms >= 0.0)) {
        throw UsageError("delay must be >= 0");
    }
    testbed::RenderServer server(cfg);
    std::cout << "listening on " << host << ":" << server.port() << " (delay " << cfg.delay_ms << " ms, "
              << sim::to_string(cfg.mode) << ")" << std::endl;
    for (int i = 0; sessions <= 0 || i < sessions; ++i) {
        const auto stats = server.serve_one();
        std::cout << "session done: " << stats.handled << " handled, " << stats.errors << " errors, mean render "
                  << stats.mean_render_ms << " ms" << (stats.clean_shutdown ? "" : " (no shutdown message)")
                  << std::endl;
    }
    return ok;
}

int cmd_client(const ExperimentFlags& f, CLI::App& cmd, const std::string& host, std::uint16_t port)
{
    auto cfg = f.build(cmd);
    testbed::SessionConfig sc;
    sc.host = host;
    sc.port = port;
    sc.rate_hz = cfg.interaction_rate_hz;
    sc.tick_ms = cfg.tick_ms;
    sc.timeout_s = cfg.timeout_s;
    auto session = testbed::run_session(sc, harness::interactions_for(cfg));

    harness::RunResult r;
    r.config = cfg;
    r.protocol_errors = session.protocol_errors;
    if (!session.complete()) {
        throw harness::SessionFailure("session incomplete: " + std::to_string(session.measurements.size()) + " of " +
                                      std::to_string(session.submitted) + " results");
    }
    r.measurements = std::move(session.measurements);
    std::vector<double> il;
    for (const auto& m : r.measurements) il.push_back(m.il_ms);
    r.stats = summarize(il);
    print_run(r, harness::write_run_outputs(r));
    return ok;
}

int cmd_baseline(const ExperimentFlags& f, CLI::App& cmd)
{
    const auto r = harness::run_baseline(f.build(cmd));
    print_run(r, harness::write_run_outputs(r));
    return ok;
}

int cmd_simulate(const ExperimentFlags& f, CLI::App& cmd, const std::vector<double>& delays, int repetitions,
                 double tol_ms)
{
    auto base_cfg = f.build(cmd);
    if (repetitions < 1) {
        throw UsageError("repetitions must be >= 1");
    }
    const std::string name = base_cfg.name;
    base_cfg.name = name + "-base";
    const auto base = harness::run_baseline(base_cfg);
    harness::write_run_outputs(base);

    std::vector<harness::TableRow> rows{harness::table_row(base)};
    std::vector<std::string> violations;
    for (double d : parse_delays(delays)) {
        for (int rep = 0; rep < repetitions; ++rep) {
            auto cfg = base_cfg;
            cfg.injected_delay_ms = d;
            char label[64];
            std::snprintf(label, sizeof label, "-d%g", d);
            cfg.name = name + label + (repetitions > 1 ? "-r" + std::to_string(rep + 1) : "");
            const auto r = harness::run_simulated(cfg, base.stats.mean_ms);
            harness::write_run_outputs(r);
            rows.push_back(harness::table_row(r));
            if (std::abs(*r.shift_ms - d) > tol_ms) {
                violations.push_back(cfg.name + ": shift " + std::to_string(*r.shift_ms) + " ms vs injected " +
                                     std::to_string(d) + " ms");
            }
        }
    }
    std::cout << harness::render_table(rows);
    if (!violations.empty()) {
        std::string msg = "shift outside +/-" + std::to_string(tol_ms) + " ms:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw ToleranceViolation(msg);
    }
    return ok;
}

int cmd_compare(const ExperimentFlags& f, CLI::App& cmd, const std::vector<double>& delays,
                harness::ComparisonConfig cmp)
{
    const auto cfg = f.build(cmd);
    const auto report = harness::run_comparison(cfg, parse_delays(delays), cmp);
    const auto dir = harness::write_comparison_outputs(cfg.output_dir, cfg.name, report);
    std::cout << harness::render_comparison(report) << "wrote " << dir.string() << "\n";

    std::string problems;
    double lo = 1e300, hi = -1e300;
    for (const auto& row : report.rows) {
        if (row.lmt.misses > 0) problems += "\n  " + std::to_string(row.lmt.misses) + " LMT misses";
        if (!(row.delta_ms > 0.0)) problems += "\n  nonpositive delta at " + std::to_string(row.delay_ms) + " ms";
        lo = std::min(lo, row.delta_ms);
        hi = std::max(hi, row.delta_ms);
    }
    if (report.rows.size() > 1 && hi - lo > report.max_capture_ms()) {
        problems += "\n  delta spread " + std::to_string(hi - lo) + " ms exceeds one capture period";
    }
    if (!problems.empty()) {
        throw ToleranceViolation("comparison out of tolerance:" + problems);
    }
    return ok;
}

struct LmtFlags {
    std::string name = "lmt";
    std::string output_dir = "results";
    std::string source = "color-flip";
    double latency_ms = 0.0;
    std::size_t events = 10;
    double spacing_ms = 500.0;
    std::string mode = "psnr_threshold";
    std::string theta = "auto";
    double refresh_hz = 60.0;
    int region = 50;
    std::size_t calibration_samples = 1000;
    double guard_db = 3.0;
    double match_window_ms = 2000.0;
    std::uint64_t seed = 1;
    double noise_sigma = 1.0;
    int change_level = 25;
    bool check = false;
};

int cmd_lmt(const LmtFlags& f)
{
    lmt::LmtConfig cfg;
    try {
        cfg.detector.mode = lmt::parse_detection_mode(f.mode);
        if (f.theta == "auto") {
            cfg.auto_theta = true;
        } else {
            cfg.auto_theta = false;
            cfg.detector.theta = std::stod(f.theta);
        }
        cfg.detector.calibration_samples = f.calibration_samples;
        cfg.detector.guard_db = f.guard_db;
        cfg.detector.match_window_ms = f.match_window_ms;
        cfg.detector.validate();
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad detector option: ") + e.what());
    }
    if (f.spacing_ms <= 0.0) {
        throw UsageError("event spacing must be > 0");
    }

    std::unique_ptr<lmt::ScriptedScene> src;
    try {
        if (f.source == "color-flip") {
            src = std::make_unique<lmt::ColorFlipSource>(f.refresh_hz, f.latency_ms, f.region);
        } else if (f.source == "noisy") {
            lmt::NoisySceneSource::Options o;
            o.refresh_hz = f.refresh_hz;
            o.latency_ms = f.latency_ms;
            o.size = f.region;
            o.noise_sigma = f.noise_sigma;
            o.change_level = f.change_level;
            o.seed = f.seed;
            src = std::make_unique<lmt::NoisySceneSource>(o);
        } else {
            throw UsageError("unknown source '" + f.source + "' (color-flip or noisy)");
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::vector<lmt::Capture> captures;
    const auto report = lmt::run_lmt(*src, lmt::evenly_spaced_events(f.events, f.spacing_ms),
                                     [&](char k) { src->press(k); }, cfg, &captures);

    const auto dir = harness::experiment_dir(f.output_dir, f.name);
    {
        std::ofstream log(dir / "log.csv", std::ios::binary | std::ios::trunc);
        lmt::write_capture_log(log, captures);
    }
    std::ofstream(dir / "stats.json", std::ios::binary | std::ios::trunc) << lmt::to_json(report).dump(2) << "\n";

    std::ostringstream text;
    text << "source " << f.source << ", programmed latency " << f.latency_ms << " ms, mode "
         << lmt::to_string(report.mode) << "\n"
         << "theta " << report.theta_db << " dB, capture period " << report.mean_capture_ms << " ms, "
         << report.capture_count << " captures\n"
         << "events " << report.rows.size() << ", detected " << report.stats.n << ", misses " << report.misses
         << ", spurious " << report.false_positives << "\n"
         << "mean IL " << report.stats.mean_ms << " ms, stddev " << report.stats.stddev_ms << " ms, variance "
         << report.stats.variance << "\n";
    if (report.truncated) {
        text << "TRUNCATED: " << report.failure << "\n";
    }
    std::ofstream(dir / "report.txt", std::ios::binary | std::ios::trunc) << text.str();
    std::cout << text.str() << "wrote " << dir.string() << "\n";

    if (report.truncated) {
        throw harness::SessionFailure("frame source failed: " + report.failure);
    }
    if (f.check) {
        std::string problems;
        if (report.misses > 0) problems += "\n  " + std::to_string(report.misses) + " misses";
        if (report.false_positives > 0) problems += "\n  " + std::to_string(report.false_positives) + " spurious";
        for (double il : report.il_values()) {
            if (il < f.latency_ms || il >= f.latency_ms + report.mean_capture_ms + 3.0) {
                problems += "\n  IL " + std::to_string(il) + " ms outside [L, L + capture period + 3)";
            }
        }
        if (!problems.empty()) {
            throw ToleranceViolation("LMT check failed:" + problems);
        }
    }
    return ok;
}

int cmd_gen_template(const std::string& out, std::size_t count, std::uint64_t seed)
{
    try {
        harness::generate_template(out, count, seed);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::cout << "wrote " << count << " interactions to " << out << "\n";
    return ok;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& output_dir, bool plot)
{
    std::vector<fs::path> dirs;
    for (const auto& p : paths) dirs.emplace_back(p);
    if (dirs.empty()) {
        if (!fs::is_directory(output_dir)) {
            throw UsageError("no such results directory: " + output_dir);
        }
        for (const auto& e : fs::directory_iterator(output_dir)) {
            if (e.is_directory() && fs::exists(e.path() / "stats.json") && fs::exists(e.path() / "log.csv")) {
                dirs.push_back(e.path());
            }
        }
        std::sort(dirs.begin(), dirs.end());
    }

    std::vector<harness::TableRow> rows;
    for (const auto& d : dirs) {
        const auto json = d / "stats.json";
        nlohmann::json j;
        {
            std::ifstream in(json);
            if (!in) throw UsageError("cannot read " + json.string());
            j = nlohmann::json::parse(in, nullptr, false);
        }
        if (j.is_discarded() || !j.contains("experiment")) {
            // Comparison and LMT outputs have their own report.txt.
            std::ifstream in(d / "report.txt");
            std::cout << "== " << d.filename().string() << "\n" << in.rdbuf() << "\n";
            continue;
        }
        rows.push_back(harness::load_table_row(json));
        if (plot) {
            std::ifstream in(d / "log.csv");
            const auto ms = harness::read_measurement_log(in);
            std::ofstream out(d / "plot.csv", std::ios::binary | std::ios::trunc);
            harness::write_plot_csv(out, ms);
        }
    }
    if (!rows.empty()) {
        std::cout << harness::render_table(rows);
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interactive remote rendering latency lab"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string host = "127.0.0.1";
    std::uint16_t port = testbed::kDefaultPort;

    ExperimentFlags serve_f;
    int sessions = 1;
    auto* serve = app.add_subcommand("serve", "Run the render server");
    add_config_flag(serve);
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--delay", serve_f.delay_ms, "Injected network delay in ms")->capture_default_str();
    serve->add_option("--sessions", sessions, "Sessions to serve (0 = forever)")->capture_default_str();
    add_server_flags(serve, serve_f);

    ExperimentFlags client_f;
    auto* client = app.add_subcommand("client", "Run a client session against a running server");
    add_experiment_flags(client, client_f, "client");
    client->add_option("--host", host)->capture_default_str();
    client->add_option("--port", port)->capture_default_str();
    client->add_option("--delay", client_f.delay_ms, "Delay the server was started with (recorded only)");

    ExperimentFlags base_f;
    auto* baseline = app.add_subcommand("baseline", "Loopback run with no injected delay");
    add_experiment_flags(baseline, base_f, "baseline");

    ExperimentFlags sim_f;
    std::vector<double> sim_delays{50, 100, 174};
    int repetitions = 1;
    double tol_ms = 3.0;
    auto* simulate = app.add_subcommand("simulate", "Baseline followed by runs with injected delays");
    add_experiment_flags(simulate, sim_f, "simulate");
    simulate->add_option("--delays", sim_delays, "Injected delays in ms")->delimiter(',')->capture_default_str();
    simulate->add_option("--repetitions", repetitions, "Runs per delay")->capture_default_str();
    simulate->add_option("--tolerance", tol_ms, "Allowed |shift - delay| in ms")->capture_default_str();

    ExperimentFlags cmp_f;
    std::vector<double> cmp_delays{50, 100};
    harness::ComparisonConfig cmp;
    auto* compare = app.add_subcommand("compare", "LMT against integrated measurements");
    add_experiment_flags(compare, cmp_f, "compare");
    compare->add_option("--delays", cmp_delays, "Injected delays in ms")->delimiter(',')->capture_default_str();
    compare->add_option("--events", cmp.events, "Interactions per delay")->capture_default_str();
    compare->add_option("--event-rate", cmp.rate_hz, "Interactions per second")->capture_default_str();
    compare->add_option("--refresh-hz", cmp.refresh_hz, "Display refresh rate")->capture_default_str();
    compare->add_option("--region", cmp.reticle_size, "Reticle side in pixels")->capture_default_str();
    compare->add_option("--calibration-samples", cmp.lmt.detector.calibration_samples)->capture_default_str();

    LmtFlags lmt_f;
    auto* lmt_cmd = app.add_subcommand("lmt", "Observer measurement of a scripted synthetic scene");
    add_config_flag(lmt_cmd);
    lmt_cmd->add_option("--experiment,--name", lmt_f.name)->capture_default_str();
    lmt_cmd->add_option("--output-dir", lmt_f.output_dir)->capture_default_str();
    lmt_cmd->add_option("--source", lmt_f.source, "color-flip or noisy")->capture_default_str();
    lmt_cmd->add_option("--latency", lmt_f.latency_ms, "Programmed response latency in ms")->capture_default_str();
    lmt_cmd->add_option("--events", lmt_f.events)->capture_default_str();
    lmt_cmd->add_option("--spacing-ms", lmt_f.spacing_ms)->capture_default_str();
    lmt_cmd->add_option("--mode", lmt_f.mode, "per_pixel, psnr_threshold or psnr_delta")->capture_default_str();
    lmt_cmd->add_option("--theta", lmt_f.theta, "Threshold in dB or 'auto'")->capture_default_str();
    lmt_cmd->add_option("--refresh-hz", lmt_f.refresh_hz)->capture_default_str();
    lmt_cmd->add_option("--region", lmt_f.region, "Reticle side in pixels")->capture_default_str();
    lmt_cmd->add_option("--calibration-samples", lmt_f.calibration_samples)->capture_default_str();
    lmt_cmd->add_option("--guard-db", lmt_f.guard_db)->capture_default_str();
    lmt_cmd->add_option("--match-window-ms", lmt_f.match_window_ms)->capture_default_str();
    lmt_cmd->add_option("--seed", lmt_f.seed)->capture_default_str();
    lmt_cmd->add_option("--noise-sigma", lmt_f.noise_sigma)->capture_default_str();
    lmt_cmd->add_option("--change-level", lmt_f.change_level)->capture_default_str();
    lmt_cmd->add_flag("--check", lmt_f.check, "Exit 3 unless every event is detected within one capture period");

    std::string tpl_out;
    std::size_t tpl_count = 1000;
    std::uint64_t tpl_seed = 42;
    auto* gen = app.add_subcommand("gen-template", "Write a seeded interaction template");
    add_config_flag(gen);
    gen->add_option("--out,-o", tpl_out, "Output file")->required();
    gen->add_option("--count", tpl_count)->capture_default_str();
    gen->add_option("--seed", tpl_seed)->capture_default_str();

    std::vector<std::string> report_paths;
    std::string report_root = "results";
    bool plot = false;
    auto* report = app.add_subcommand("report", "Summarize experiment directories");
    report->add_option("dirs", report_paths, "Experiment directories (default: every one under --output-dir)");
    report->add_option("--output-dir", report_root)->capture_default_str();
    report->add_flag("--plot", plot, "Also write plot.csv (index,il_ms) next to each log.csv");

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : usage;
    }

    try {
        if (*serve) return cmd_serve(serve_f, *serve, host, port, sessions);
        if (*client) return cmd_client(client_f, *client, host, port);
        if (*baseline) return cmd_baseline(base_f, *baseline);
        if (*simulate) return cmd_simulate(sim_f, *simulate, sim_delays, repetitions, tol_ms);
        if (*compare) return cmd_compare(cmp_f, *compare, cmp_delays, cmp);
        if (*lmt_cmd) return cmd_lmt(lmt_f);
        if (*gen) return cmd_gen_template(tpl_out, tpl_count, tpl_seed);
        if (*report) return cmd_report(report_paths, report_root, plot);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const harness::TemplateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const InsufficientSamples& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const ToleranceViolation& e) {
        std::cerr << e.what() << "\n";
        return tolerance;
    } catch (const std::exception& e) {
        std::cerr << "session failed: " << e.what() << "\n";
        return session_failure;
    }
    return usage;
}
