#pragma once

#include <atomic>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "irrlab/lmt/detector.hpp"
#include "irrlab/lmt/frame_source.hpp"
#include "irrlab/stats.hpp"

namespace irrlab::lmt {

struct CaptureCalibration {
    double mean_capture_ms = 0.0;
    /// The calibration captures with PSNR assigned; they double as rest
    /// samples for threshold calibration.
    std::vector<Capture> captures;
};

/// Grabs `n` frames back to back and returns the mean inter-capture time.
/// Throws std::invalid_argument for n < 2; source failures propagate.
CaptureCalibration calibrate_capture(FrameSource& src, std::size_t n = 1000);

/// Runs src.grab() on its own thread, tagging each capture with the global
/// clock, until stop().
class CaptureLoop {
public:
    explicit CaptureLoop(FrameSource& src) : src_(src) {}
    ~CaptureLoop() { stop(); }
    CaptureLoop(const CaptureLoop&) = delete;
    CaptureLoop& operator=(const CaptureLoop&) = delete;

    void start();
    /// Stops and returns every capture taken so far (empty on repeat calls).
    std::vector<Capture> stop();

    /// A grab threw; captures end at the failure.
    bool failed() const { return failed_; }
    std::string failure() const;

private:
    FrameSource& src_;
    std::thread worker_;
    std::atomic<bool> running_{false};
    std::atomic<bool> failed_{false};
    mutable std::mutex mutex_;
    std::vector<Capture> captures_;
    std::string failure_;
};

struct LmtConfig {
    DetectorConfig detector{};
    /// Derive theta from the calibration captures instead of detector.theta.
    bool auto_theta = true;
    /// Capturing starts this long before the first scripted event, so the
    /// first event has earlier captures to compare against.
    double lead_in_ms = 250.0;
    /// Capturing continues this long after the last event.
    double tail_ms = 500.0;
};

struct LmtReport {
    DetectionMode mode = DetectionMode::psnr_threshold;
    double theta_db = 0.0;
    double mean_capture_ms = 0.0;
    std::size_t capture_count = 0;
    std::vector<MatchedEvent> rows;
    std::size_t misses = 0;
    /// Detections not attributable to any event.
    std::size_t false_positives = 0;
    /// Statistics over matched IL values (n < 2 leaves only mean populated).
    SummaryStats stats{};
    bool truncated = false;
    std::string failure;

    std::vector<double> il_values() const;
};

/// Detection and matching over a finished capture run.
LmtReport analyze(std::vector<Capture>& captures, const std::vector<InteractionEvent>& events,
                  const DetectorConfig& detector, double theta, double mean_capture_ms);

/// An LMT attached to a frame source. Typical use: calibrate(), start(),
/// record interactions while the application runs, finish().
class Observer {
public:
    Observer(FrameSource& src, LmtConfig cfg);

    /// Capture-period calibration followed by threshold calibration (when
    /// auto_theta is set). Must run while the scene is at rest.
    void calibrate();

    double theta() const { return theta_; }
    double mean_capture_ms() const { return mean_capture_ms_; }

    void start();

    /// Records an interaction at the current time and returns it.
    Micros record_event(char label);
    /// Records an interaction observed at `timestamp_us` on the global clock.
    void record_event_at(char label, Micros timestamp_us);

    /// Stops capturing and analyses the run. `captures_out` receives the
    /// capture log when non-null.
    LmtReport finish(std::vector<Capture>* captures_out = nullptr);

private:
    FrameSource& src_;
    LmtConfig cfg_;
    CaptureLoop loop_;
    double theta_;
    double mean_capture_ms_ = 0.0;
    bool calibrated_ = false;
    std::mutex events_mutex_;
    std::vector<InteractionEvent> events_;
};

struct ScriptedEvent {
    double at_ms = 0.0;
    char label = 'k';
};

/// Evenly spaced events: `count` events `spacing_ms` apart starting at 0.
std::vector<ScriptedEvent> evenly_spaced_events(std::size_t count, double spacing_ms, char label = 'k');

/// Full LMT run: calibrate, start capturing, perform each scripted event at
/// its offset (recording its timestamp, then calling `inject`), wait for
/// the tail and analyse.
LmtReport run_lmt(FrameSource& src, const std::vector<ScriptedEvent>& script,
                  const std::function<void(char)>& inject, const LmtConfig& cfg,
                  std::vector<Capture>* captures_out = nullptr);

/// CSV with header `index,timestamp_us,psnr_db`.
void write_capture_log(std::ostream& out, const std::vector<Capture>& captures);

nlohmann::json to_json(const LmtReport& r);

} // namespace irrlab::lmt
