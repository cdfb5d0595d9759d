#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "irrlab/lmt/psnr.hpp"

namespace irrlab::lmt {

enum class DetectionMode {
    /// Any pixel differs from the previous capture. Only usable on scenes
    /// that are bitwise static between interactions.
    per_pixel,
    /// PSNR falls below theta; a run of consecutive below-theta captures is
    /// one change. Default.
    psnr_threshold,
    /// |psnr(n) - psnr(n-1)| > theta; consecutive flagged captures (the drop
    /// and its recovery) are one change.
    psnr_delta,
};

DetectionMode parse_detection_mode(std::string_view s);
std::string_view to_string(DetectionMode m);

struct DetectorConfig {
    DetectionMode mode = DetectionMode::psnr_threshold;
    double theta = 97.0;
    std::size_t calibration_samples = 1000;
    double match_window_ms = 2000.0;
    /// Margin between the rest-state PSNR statistic and theta.
    double guard_db = 3.0;

    /// Throws std::invalid_argument on theta outside (0, 100), fewer than two
    /// calibration samples, or a nonpositive window.
    void validate() const;
};

struct Detection {
    std::size_t capture_index = 0;
    Micros timestamp_us = 0;
    double psnr_db = 0.0;
};

/// Detection timestamps over time-ordered captures whose psnr_db has been
/// assigned; throws std::invalid_argument if any is missing.
std::vector<Detection> detect_changes(const std::vector<Capture>& captures, const DetectorConfig& cfg);

/// Mean rest PSNR minus the guard margin. Throws InsufficientRestSamples
/// below cfg.calibration_samples captures.
double calibrate_threshold(std::span<const Capture> rest, const DetectorConfig& cfg);

/// Largest rest-state |delta psnr| plus the guard margin; the psnr_delta
/// analogue of calibrate_threshold.
double calibrate_delta_threshold(std::span<const Capture> rest, const DetectorConfig& cfg);

/// Picks the calibration rule matching cfg.mode (per_pixel ignores theta and
/// gets the threshold-mode value for reporting).
double auto_theta(std::span<const Capture> rest, const DetectorConfig& cfg);

class InsufficientRestSamples : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct InteractionEvent {
    Micros timestamp_us = 0;
    char label = ' ';
};

struct MatchedEvent {
    InteractionEvent event;
    std::optional<Detection> detection;
    /// Detection time minus interaction time, when matched.
    std::optional<double> il_ms;
};

struct MatchResult {
    /// One row per event, in event order.
    std::vector<MatchedEvent> rows;
    std::size_t misses = 0;
    /// Detections that no event claimed (spontaneous scene changes).
    std::vector<Detection> unclaimed;
};

/// Pairs each event with the earliest unclaimed detection at or after it
/// and within `window_ms`. Both inputs must be time-ordered.
MatchResult match_interactions(const std::vector<InteractionEvent>& events, const std::vector<Detection>& detections,
                               double window_ms);

} // namespace irrlab::lmt
