#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "irrlab/clock.hpp"

// Arithmetic over the seven-component interaction latency decomposition.
// Timestamps are integer microseconds; durations are fractional milliseconds.

namespace irrlab::model {

/// A required timestamp of an InteractionTimeline was never measured.
class UnmeasuredTimestamp : public std::runtime_error {
public:
    explicit UnmeasuredTimestamp(std::string field)
        : std::runtime_error("timestamp " + field + " is unmeasured"), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Residual came out negative: the supplied components exceed the total.
class InconsistentLatency : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Life of one interaction, t0 (physical action) through t7 (pixels visible).
/// Any timestamp may be left unmeasured.
class InteractionTimeline {
public:
    static constexpr std::size_t kPoints = 8;

    InteractionTimeline() = default;

    void set(std::size_t index, Micros us);
    void clear(std::size_t index);
    bool measured(std::size_t index) const { return points_.at(index).has_value(); }

    /// Throws UnmeasuredTimestamp naming "t<index>".
    Micros at(std::size_t index) const;

    /// Measured timestamps are nondecreasing in index order.
    bool monotone() const;

    /// Every measured timestamp shifted by `delta_us`.
    InteractionTimeline shifted(Micros delta_us) const;

private:
    std::array<std::optional<Micros>, kPoints> points_{};
};

struct LatencyBreakdown {
    double idl = 0;
    double cl1 = 0;
    double nl_up = 0;
    double sl = 0;
    double nl_down = 0;
    double cl2 = 0;
    double dl = 0;

    double cl() const { return cl1 + cl2; }
    double nl() const { return nl_up + nl_down; }

    /// Throws std::invalid_argument if any component is negative or not finite.
    void validate() const;

    /// Splits a round-trip network latency evenly between the two legs.
    static LatencyBreakdown with_round_trip_nl(double nl_round_trip);
};

struct RoughEstimateInputs {
    double rtt_ms = 0;
    double mean_render_ms = 0;
};

/// Result of an estimate that may legitimately come out negative under
/// measurement noise.
struct NoisyEstimate {
    double value_ms = 0;
    bool negative_warning = false;
};

double total_il(const LatencyBreakdown& b);

/// (t7 - t0) in ms.
double il_from_timeline(const InteractionTimeline& tl);

/// Server latency left over once every other component is removed from IL.
double sl_residual(double il, double idl, double cl, double nl, double dl);

/// Server latency from the client-side send/receive timestamps when DL is
/// unknown: (t5 - t2) - nl. t0 cancels, so only t2 and t5 must be measured.
NoisyEstimate sl_from_timestamps(const InteractionTimeline& tl, double nl);
NoisyEstimate sl_from_timestamps(Micros t2, Micros t5, double nl);

double dl_residual(double il, double idl, double cl, double nl, double sl);

/// Delay seen by interaction `i` when messages are processed one at a time:
/// nl + i * max(0, nl - sd).
double synchronous_backlog_delay(double nl, double sd, std::size_t i);

double rough_il_estimate(const RoughEstimateInputs& in);

} // namespace irrlab::model
