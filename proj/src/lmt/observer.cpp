#include "irrlab/lmt/observer.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace irrlab::lmt {

CaptureCalibration calibrate_capture(FrameSource& src, std::size_t n)
{
    if (n < 2) {
        throw std::invalid_argument("capture calibration needs at least 2 grabs");
    }
    CaptureCalibration cal;
    cal.captures.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Image img = src.grab();
        cal.captures.push_back({std::move(img), MonotonicClock::now_us(), std::nullopt});
    }
    assign_psnr(cal.captures);
    const Micros span = cal.captures.back().timestamp_us - cal.captures.front().timestamp_us;
    cal.mean_capture_ms = micros_to_ms(span) / static_cast<double>(n - 1);
    return cal;
}

void CaptureLoop::start()
{
    if (running_.exchange(true)) {
        throw std::logic_error("capture loop already running");
    }
    {
        std::lock_guard lk(mutex_);
        captures_.clear();
        failure_.clear();
    }
    failed_ = false;
    worker_ = std::thread([this] {
        while (running_) {
            try {
                Image img = src_.grab();
                const Micros ts = MonotonicClock::now_us();
                std::lock_guard lk(mutex_);
                captures_.push_back({std::move(img), ts, std::nullopt});
            } catch (const std::exception& e) {
                std::lock_guard lk(mutex_);
                failure_ = e.what();
                failed_ = true;
                return;
            }
        }
    });
}

std::vector<Capture> CaptureLoop::stop()
{
    running_ = false;
    if (worker_.joinable()) {
        worker_.join();
    }
    std::lock_guard lk(mutex_);
    return std::exchange(captures_, {});
}

std::string CaptureLoop::failure() const
{
    std::lock_guard lk(mutex_);
    return failure_;
}

std::vector<double> LmtReport::il_values() const
{
    std::vector<double> out;
    for (const auto& r : rows) {
        if (r.il_ms) {
            out.push_back(*r.il_ms);
        }
    }
    return out;
}

LmtReport analyze(std::vector<Capture>& captures, const std::vector<InteractionEvent>& events,
                  const DetectorConfig& detector, double theta, double mean_capture_ms)
{
    DetectorConfig cfg = detector;
    cfg.theta = theta;
    assign_psnr(captures);

    LmtReport report;
    report.mode = cfg.mode;
    report.theta_db = theta;
    report.mean_capture_ms = mean_capture_ms;
    report.capture_count = captures.size();

    auto match = match_interactions(events, detect_changes(captures, cfg), cfg.match_window_ms);
    report.rows = std::move(match.rows);
    report.misses = match.misses;
    report.false_positives = match.unclaimed.size();

    const auto il = report.il_values();
    if (il.size() >= 2) {
        report.stats = summarize(il);
    } else if (il.size() == 1) {
        report.stats.mean_ms = report.stats.min_ms = report.stats.max_ms = il.front();
        report.stats.n = 1;
    }
    return report;
}

Observer::Observer(FrameSource& src, LmtConfig cfg) : src_(src), cfg_(cfg), loop_(src), theta_(cfg.detector.theta)
{
    cfg_.detector.validate();
}

void Observer::calibrate()
{
    // One extra grab: the first capture has no predecessor and its PSNR is
    // a sentinel, not a rest sample.
    auto cal = calibrate_capture(src_, cfg_.detector.calibration_samples + 1);
    mean_capture_ms_ = cal.mean_capture_ms;
    const std::span<const Capture> rest(cal.captures.data() + 1, cal.captures.size() - 1);
    if (cfg_.auto_theta) {
        theta_ = auto_theta(rest, cfg_.detector);
    }
    calibrated_ = true;
}

void Observer::start()
{
    if (!calibrated_) {
        throw std::logic_error("observer must be calibrated before capturing");
    }
    {
        std::lock_guard lk(events_mutex_);
        events_.clear();
    }
    loop_.start();
}

Micros Observer::record_event(char label)
{
    const Micros now = MonotonicClock::now_us();
    record_event_at(label, now);
    return now;
}

void Observer::record_event_at(char label, Micros timestamp_us)
{
    std::lock_guard lk(events_mutex_);
    events_.push_back({timestamp_us, label});
}

LmtReport Observer::finish(std::vector<Capture>* captures_out)
{
    auto captures = loop_.stop();
    std::vector<InteractionEvent> events;
    {
        std::lock_guard lk(events_mutex_);
        events = events_;
    }
    std::sort(events.begin(), events.end(),
              [](const InteractionEvent& a, const InteractionEvent& b) { return a.timestamp_us < b.timestamp_us; });

    auto report = analyze(captures, events, cfg_.detector, theta_, mean_capture_ms_);
    report.truncated = loop_.failed();
    report.failure = loop_.failure();
    if (captures_out) {
        *captures_out = std::move(captures);
    }
    return report;
}

std::vector<ScriptedEvent> evenly_spaced_events(std::size_t count, double spacing_ms, char label)
{
    std::vector<ScriptedEvent> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back({static_cast<double>(i) * spacing_ms, label});
    }
    return out;
}

LmtReport run_lmt(FrameSource& src, const std::vector<ScriptedEvent>& script, const std::function<void(char)>& inject,
                  const LmtConfig& cfg, std::vector<Capture>* captures_out)
{
    Observer obs(src, cfg);
    obs.calibrate();
    obs.start();
    precise_sleep_for(ms_to_duration(cfg.lead_in_ms));
    const auto t0 = SteadyClock::now();
    for (const auto& ev : script) {
        precise_sleep_until(t0 + ms_to_duration(ev.at_ms));
        obs.record_event(ev.label);
        if (inject) {
            inject(ev.label);
        }
    }
    precise_sleep_for(ms_to_duration(cfg.tail_ms));
    return obs.finish(captures_out);
}

void write_capture_log(std::ostream& out, const std::vector<Capture>& captures)
{
    out << "index,timestamp_us,psnr_db\n";
    for (std::size_t i = 0; i < captures.size(); ++i) {
        out << i << ',' << captures[i].timestamp_us << ',';
        if (captures[i].psnr_db) {
            out << *captures[i].psnr_db;
        }
        out << '\n';
    }
}

nlohmann::json to_json(const LmtReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json j{{"event_us", row.event.timestamp_us}, {"label", std::string(1, row.event.label)}};
        if (row.detection) {
            j["detection_us"] = row.detection->timestamp_us;
            j["psnr_db"] = row.detection->psnr_db;
            j["il_ms"] = *row.il_ms;
        } else {
            j["detection_us"] = nullptr;
            j["il_ms"] = nullptr;
        }
        rows.push_back(std::move(j));
    }
    return {
        {"mode", std::string(to_string(r.mode))},
        {"theta_db", r.theta_db},
        {"mean_capture_ms", r.mean_capture_ms},
        {"capture_count", r.capture_count},
        {"n", r.stats.n},
        {"mean_ms", r.stats.mean_ms},
        {"stddev_ms", r.stats.stddev_ms},
        {"variance", r.stats.variance},
        {"min_ms", r.stats.min_ms},
        {"max_ms", r.stats.max_ms},
        {"misses", r.misses},
        {"false_positives", r.false_positives},
        {"truncated", r.truncated},
        {"rows", std::move(rows)},
    };
}

} // namespace irrlab::lmt
