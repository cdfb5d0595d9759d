#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrlab/latency_simulator.hpp"
#include "irrlab/lmt/observer.hpp"
#include "irrlab/stats.hpp"
#include "irrlab/testbed/session.hpp"

namespace irrlab::harness {

/// The session did not complete (timeout, lost connection, missing results).
class SessionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string name = "baseline";
    double injected_delay_ms = 0.0;
    double interaction_rate_hz = 10.0;
    std::size_t interaction_count = 1000;
    /// Empty: generate interactions from `seed`.
    std::filesystem::path template_path;
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "results";

    sim::Mode mode = sim::Mode::asynchronous;
    testbed::DelayPath delay_path = testbed::DelayPath::response;
    testbed::FrameCodec codec = testbed::FrameCodec::deflate;
    testbed::Resolution resolution{};
    double tick_ms = 1.0;
    double timeout_s = 30.0;

    /// Throws std::invalid_argument on a nonpositive rate or zero count.
    void validate() const;

    /// 100 interactions at 20 Hz.
    static ExperimentConfig fast_profile(std::string name = "baseline");
};

/// Template contents if a path is set, otherwise the seeded sequence of
/// interaction_count interactions.
std::vector<char> interactions_for(const ExperimentConfig& cfg);

struct RunResult {
    ExperimentConfig config;
    std::vector<testbed::Measurement> measurements;
    SummaryStats stats;
    testbed::ServerStats server;
    std::uint64_t protocol_errors = 0;
    /// mean - base mean, when a base mean was supplied.
    std::optional<double> shift_ms;
};

/// One loopback session against an in-process server with the configured
/// injected delay. Throws SessionFailure on an incomplete session and
/// InsufficientSamples when fewer than two interactions ran.
RunResult run_experiment(const ExperimentConfig& cfg, std::optional<double> base_mean_ms = std::nullopt);

/// run_experiment with the injected delay forced to zero.
RunResult run_baseline(ExperimentConfig cfg);

/// run_experiment with delay `cfg.injected_delay_ms`, reporting the shift
/// against `base_mean_ms`.
RunResult run_simulated(const ExperimentConfig& cfg, double base_mean_ms);

struct ComparisonRow {
    double delay_ms = 0.0;
    SummaryStats integrated;
    lmt::LmtReport lmt;
    /// lmt mean - integrated mean over the interactions both approaches saw.
    double delta_ms = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;

    /// Largest capture period seen across rows.
    double max_capture_ms() const;
};

struct ComparisonConfig {
    /// Interactions per delay.
    std::size_t events = 10;
    double rate_hz = 4.0;
    double refresh_hz = 60.0;
    int reticle_size = 50;
    lmt::LmtConfig lmt = default_lmt();

    static lmt::LmtConfig default_lmt();
};

/// For each delay: the LMT watches the client's display surface while a
/// session runs; the integrated and LMT measurements of the same
/// interactions are reported side by side.
ComparisonReport run_comparison(const ExperimentConfig& base, const std::vector<double>& delays,
                                const ComparisonConfig& cmp = {});

} // namespace irrlab::harness
