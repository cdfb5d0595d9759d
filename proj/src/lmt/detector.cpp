#include "irrlab/lmt/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace irrlab::lmt {

namespace {

double require_psnr(const Capture& c, std::size_t index)
{
    if (!c.psnr_db) {
        throw std::invalid_argument("capture " + std::to_string(index) + " has no PSNR assigned");
    }
    return *c.psnr_db;
}

void require_rest_samples(std::span<const Capture> rest, const DetectorConfig& cfg)
{
    if (rest.empty() || rest.size() < cfg.calibration_samples) {
        throw InsufficientRestSamples("threshold calibration needs " + std::to_string(cfg.calibration_samples) +
                                      " rest captures, got " + std::to_string(rest.size()));
    }
}

bool theta_in_range(double theta) { return theta > 0.0 && theta < kIdenticalPsnr; }

} // namespace

DetectionMode parse_detection_mode(std::string_view s)
{
    if (s == "per_pixel") return DetectionMode::per_pixel;
    if (s == "psnr_threshold") return DetectionMode::psnr_threshold;
    if (s == "psnr_delta") return DetectionMode::psnr_delta;
    throw std::invalid_argument("unknown detection mode '" + std::string(s) + "'");
}

std::string_view to_string(DetectionMode m)
{
    switch (m) {
    case DetectionMode::per_pixel: return "per_pixel";
    case DetectionMode::psnr_threshold: return "psnr_threshold";
    case DetectionMode::psnr_delta: return "psnr_delta";
    }
    return "?";
}

void DetectorConfig::validate() const
{
    if (!theta_in_range(theta)) {
        throw std::invalid_argument("theta must lie in (0, 100), got " + std::to_string(theta));
    }
    if (calibration_samples < 2) {
        throw std::invalid_argument("calibration_samples must be >= 2");
    }
    if (!(match_window_ms > 0.0)) {
        throw std::invalid_argument("match window must be positive");
    }
}

std::vector<Detection> detect_changes(const std::vector<Capture>& captures, const DetectorConfig& cfg)
{
    if (cfg.mode != DetectionMode::per_pixel) {
        cfg.validate();
    }
    std::vector<Detection> out;
    bool in_event = false;
    for (std::size_t n = 0; n < captures.size(); ++n) {
        const double p = require_psnr(captures[n], n);
        bool flagged = false;
        switch (cfg.mode) {
        case DetectionMode::per_pixel:
            flagged = n > 0 && captures[n].pixels != captures[n - 1].pixels;
            if (flagged) {
                out.push_back({n, captures[n].timestamp_us, p});
            }
            continue;
        case DetectionMode::psnr_threshold:
            flagged = p < cfg.theta;
            break;
        case DetectionMode::psnr_delta:
            flagged = n > 0 && std::abs(p - require_psnr(captures[n - 1], n - 1)) > cfg.theta;
            break;
        }
        if (flagged && !in_event) {
            out.push_back({n, captures[n].timestamp_us, p});
        }
        in_event = flagged;
    }
    return out;
}

double calibrate_threshold(std::span<const Capture> rest, const DetectorConfig& cfg)
{
    require_rest_samples(rest, cfg);
    double sum = 0.0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        sum += require_psnr(rest[i], i);
    }
    const double theta = sum / static_cast<double>(rest.size()) - cfg.guard_db;
    if (!theta_in_range(theta)) {
        throw std::invalid_argument("calibrated theta " + std::to_string(theta) + " is outside (0, 100)");
    }
    return theta;
}

double calibrate_delta_threshold(std::span<const Capture> rest, const DetectorConfig& cfg)
{
    require_rest_samples(rest, cfg);
    double worst = 0.0;
    for (std::size_t i = 1; i < rest.size(); ++i) {
        worst = std::max(worst, std::abs(require_psnr(rest[i], i) - require_psnr(rest[i - 1], i - 1)));
    }
    const double theta = worst + cfg.guard_db;
    if (!theta_in_range(theta)) {
        throw std::invalid_argument("calibrated delta theta " + std::to_string(theta) + " is outside (0, 100)");
    }
    return theta;
}

double auto_theta(std::span<const Capture> rest, const DetectorConfig& cfg)
{
    return cfg.mode == DetectionMode::psnr_delta ? calibrate_delta_threshold(rest, cfg)
                                                 : calibrate_threshold(rest, cfg);
}

MatchResult match_interactions(const std::vector<InteractionEvent>& events, const std::vector<Detection>& detections,
                               double window_ms)
{
    MatchResult result;
    result.rows.reserve(events.size());
    const auto window_us = static_cast<Micros>(std::llround(window_ms * 1000.0));

    std::size_t next = 0;
    for (const auto& ev : events) {
        while (next < detections.size() && detections[next].timestamp_us < ev.timestamp_us) {
            result.unclaimed.push_back(detections[next]);
            ++next;
        }
        MatchedEvent row{ev, std::nullopt, std::nullopt};
        if (next < detections.size() && detections[next].timestamp_us - ev.timestamp_us <= window_us) {
            row.detection = detections[next];
            row.il_ms = micros_to_ms(detections[next].timestamp_us - ev.timestamp_us);
            ++next;
        } else {
            ++result.misses;
        }
        result.rows.push_back(row);
    }
    for (; next < detections.size(); ++next) {
        result.unclaimed.push_back(detections[next]);
    }
    return result;
}

} // namespace irrlab::lmt
