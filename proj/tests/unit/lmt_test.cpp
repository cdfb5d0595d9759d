#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "irrlab/lmt/detector.hpp"
#include "irrlab/lmt/frame_source.hpp"
#include "irrlab/lmt/observer.hpp"
#include "irrlab/lmt/psnr.hpp"
#include "irrlab/testbed/client.hpp"

using namespace irrlab;
using namespace irrlab::lmt;

namespace {

Image uniform(int v, int size = 8)
{
    const auto b = static_cast<std::uint8_t>(v);
    return Image(size, size, Rgb{b, b, b});
}

std::vector<Capture> trace(const std::vector<double>& psnrs, Micros step_us = 16'000)
{
    std::vector<Capture> out;
    for (std::size_t i = 0; i < psnrs.size(); ++i) {
        out.push_back({Image(1, 1), static_cast<Micros>(i) * step_us, psnrs[i]});
    }
    return out;
}

// Exhaustive maximum matching between events and detections under the
// "detection at or after the event, within the window" compatibility rule.
std::size_t brute_force_max_matching(const std::vector<InteractionEvent>& ev, const std::vector<Detection>& det,
                                     Micros window_us)
{
    std::vector<bool> used(det.size(), false);
    std::function<std::size_t(std::size_t)> go = [&](std::size_t i) -> std::size_t {
        if (i == ev.size()) {
            return 0;
        }
        std::size_t best = go(i + 1);
        for (std::size_t j = 0; j < det.size(); ++j) {
            const Micros d = det[j].timestamp_us - ev[i].timestamp_us;
            if (!used[j] && d >= 0 && d <= window_us) {
                used[j] = true;
                best = std::max(best, 1 + go(i + 1));
                used[j] = false;
            }
        }
        return best;
    };
    return go(0);
}

} // namespace

TEST_CASE("mse examples")
{
    CHECK(mse(uniform(7), uniform(7)) == 0.0);
    CHECK(mse(uniform(0), uniform(255)) == 65025.0);

    Image a(4, 4, Rgb{10, 10, 10});
    Image b = a;
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 4; ++x) {
            b.set(x, y, Rgb{12, 12, 12});
        }
    }
    CHECK(mse(a, b) == 2.0);
    CHECK_THROWS_AS(mse(Image(2, 2), Image(3, 2)), DimensionMismatch);
}

TEST_CASE("psnr closed form")
{
    CHECK(psnr(uniform(40), uniform(40)) == kIdenticalPsnr);
    CHECK(std::abs(psnr(uniform(41), uniform(40)) - 20.0 * std::log10(255.0)) < 1e-9);
    CHECK(std::abs(psnr(uniform(0), uniform(255)) - 0.0) < 1e-9);

    double prev = kIdenticalPsnr;
    for (int d = 1; d <= 255; ++d) {
        const double p = psnr(uniform(d), uniform(0));
        CHECK(std::abs(p - 20.0 * std::log10(255.0 / d)) < 1e-9);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("psnr symmetry and offset invariance")
{
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> px(0, 200);
    for (int t = 0; t < 50; ++t) {
        Image a(6, 6), b(6, 6);
        for (auto& v : a.bytes()) v = static_cast<std::uint8_t>(px(rng));
        for (auto& v : b.bytes()) v = static_cast<std::uint8_t>(px(rng));
        CHECK(psnr(a, b) == psnr(b, a));
        Image a2 = a, b2 = b;
        for (auto& v : a2.bytes()) v = static_cast<std::uint8_t>(v + 55);
        for (auto& v : b2.bytes()) v = static_cast<std::uint8_t>(v + 55);
        CHECK(psnr(a2, b2) == psnr(a, b));
    }
}

TEST_CASE("first capture is 100 regardless of content")
{
    std::vector<Capture> caps{{uniform(0), 0, {}}, {uniform(255), 1, {}}, {uniform(255), 2, {}}};
    assign_psnr(caps);
    CHECK(*caps[0].psnr_db == 100.0);
    CHECK(*caps[1].psnr_db == doctest::Approx(0.0));
    CHECK(*caps[2].psnr_db == 100.0);
    CHECK(psnr(caps[1], nullptr) == 100.0);
}

TEST_CASE("detector config validation")
{
    DetectorConfig c;
    CHECK_NOTHROW(c.validate());
    c.theta = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.theta = 100.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = DetectorConfig{};
    c.calibration_samples = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(parse_detection_mode("psnr_delta") == DetectionMode::psnr_delta);
    CHECK_THROWS_AS(parse_detection_mode("edge"), std::invalid_argument);
}

TEST_CASE("threshold calibration")
{
    DetectorConfig cfg;
    cfg.calibration_samples = 10;
    CHECK(calibrate_threshold(trace(std::vector<double>(10, 100.0)), cfg) == 97.0);

    std::mt19937 rng(9);
    std::normal_distribution<double> jitter(45.0, 0.3);
    std::vector<double> noisy(200);
    for (auto& v : noisy) v = jitter(rng);
    double mean = 0;
    for (double v : noisy) mean += v;
    mean /= noisy.size();
    const double theta = calibrate_threshold(trace(noisy), cfg);
    CHECK(std::abs(theta - (mean - 3.0)) < 1e-9);
    CHECK(std::abs(theta - 42.0) < 0.2);

    CHECK_THROWS_AS(calibrate_threshold({}, cfg), InsufficientRestSamples);
    CHECK_THROWS_AS(calibrate_threshold(trace(std::vector<double>(9, 100.0)), cfg), InsufficientRestSamples);

    CHECK(calibrate_delta_threshold(trace(std::vector<double>(10, 100.0)), cfg) == 3.0);
    CHECK(calibrate_delta_threshold(trace({45, 46, 44, 45, 45, 45, 45, 45, 45, 45}), cfg) == 5.0);
}

TEST_CASE("detection on a single deep drop trace")
{
    const auto caps = trace({100, 100, 27, 100});
    DetectorConfig cfg;
    cfg.theta = 97;
    auto d = detect_changes(caps, cfg);
    REQUIRE(d.size() == 1);
    CHECK(d[0].capture_index == 2);
    CHECK(d[0].psnr_db == 27.0);

    cfg.mode = DetectionMode::psnr_delta;
    cfg.theta = 30;
    d = detect_changes(caps, cfg);
    REQUIRE(d.size() == 1);
    CHECK(d[0].capture_index == 2);
}

TEST_CASE("threshold mode coalesces consecutive low captures")
{
    DetectorConfig cfg;
    cfg.theta = 90;
    const auto d = detect_changes(trace({100, 40, 50, 100, 100, 30, 100}), cfg);
    REQUIRE(d.size() == 2);
    CHECK(d[0].capture_index == 1);
    CHECK(d[1].capture_index == 5);
}

TEST_CASE("static stream with one injected change: one detection in every mode")
{
    std::vector<Capture> caps;
    for (int i = 0; i < 20; ++i) {
        caps.push_back({uniform(i < 12 ? 30 : 200), i * 16'000, {}});
    }
    assign_psnr(caps);
    for (auto mode : {DetectionMode::per_pixel, DetectionMode::psnr_threshold, DetectionMode::psnr_delta}) {
        DetectorConfig cfg;
        cfg.mode = mode;
        cfg.theta = mode == DetectionMode::psnr_delta ? 3.0 : 97.0;
        const auto d = detect_changes(caps, cfg);
        REQUIRE(d.size() == 1);
        CHECK(d[0].capture_index == 12);
    }
}

TEST_CASE("per_pixel mode is silent on a static source")
{
    std::vector<Capture> caps(30, Capture{uniform(77), 0, {}});
    assign_psnr(caps);
    DetectorConfig cfg;
    cfg.mode = DetectionMode::per_pixel;
    CHECK(detect_changes(caps, cfg).empty());
}

TEST_CASE("unassigned psnr is rejected")
{
    std::vector<Capture> caps{{uniform(1), 0, {}}};
    CHECK_THROWS_AS(detect_changes(caps, DetectorConfig{}), std::invalid_argument);
}

TEST_CASE("matching examples")
{
    auto m = match_interactions({{0, 'a'}}, {{1, 17'000, 20.0}}, 2000);
    REQUIRE(m.rows.size() == 1);
    CHECK(*m.rows[0].il_ms == 17.0);
    CHECK(m.misses == 0);

    m = match_interactions({{0, 'a'}, {100'000, 'd'}}, {{1, 17'000, 20.0}}, 2000);
    CHECK(m.rows.size() == 2);
    CHECK(m.rows[0].il_ms.has_value());
    CHECK_FALSE(m.rows[1].il_ms.has_value());
    CHECK(m.misses == 1);

    m = match_interactions({{50'000, 'a'}}, {{0, 10'000, 20.0}, {5, 60'000, 20.0}}, 2000);
    CHECK(*m.rows[0].il_ms == 10.0);
    REQUIRE(m.unclaimed.size() == 1);
    CHECK(m.unclaimed[0].timestamp_us == 10'000);

    m = match_interactions({{0, 'a'}}, {{0, 2'500'000, 20.0}}, 2000);
    CHECK(m.misses == 1);
    CHECK(m.unclaimed.size() == 1);
}

TEST_CASE("greedy matching is maximum and claims each detection once")
{
    std::mt19937 rng(11);
    std::uniform_int_distribution<Micros> t(0, 400);
    std::uniform_int_distribution<int> count(0, 6);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<InteractionEvent> ev(count(rng));
        std::vector<Detection> det(count(rng));
        for (auto& e : ev) e.timestamp_us = t(rng);
        for (auto& d : det) d.timestamp_us = t(rng);
        std::sort(ev.begin(), ev.end(), [](auto& a, auto& b) { return a.timestamp_us < b.timestamp_us; });
        std::sort(det.begin(), det.end(), [](auto& a, auto& b) { return a.timestamp_us < b.timestamp_us; });
        for (std::size_t i = 0; i < det.size(); ++i) det[i].capture_index = i;

        const double window_ms = 0.1;
        const auto m = match_interactions(ev, det, window_ms);
        std::size_t matched = 0;
        std::vector<int> claims(det.size(), 0);
        for (const auto& r : m.rows) {
            if (r.detection) {
                ++matched;
                ++claims[r.detection->capture_index];
                CHECK(r.detection->timestamp_us >= r.event.timestamp_us);
                CHECK(r.detection->timestamp_us - r.event.timestamp_us <= 100);
            }
        }
        CHECK(m.rows.size() == ev.size());
        CHECK(matched + m.misses == ev.size());
        CHECK(matched + m.unclaimed.size() == det.size());
        CHECK(std::all_of(claims.begin(), claims.end(), [](int c) { return c <= 1; }));
        CHECK(matched == brute_force_max_matching(ev, det, 100));
    }
}

TEST_CASE("capture calibration tracks the refresh rate")
{
    for (double hz : {60.0, 120.0}) {
        ColorFlipSource src(hz);
        const auto cal = calibrate_capture(src, 61);
        const double expected = 1000.0 / hz;
        CHECK(cal.mean_capture_ms > expected - 1.0);
        CHECK(cal.mean_capture_ms < expected + 1.5);
        CHECK(cal.captures.size() == 61);
        CHECK(*cal.captures.front().psnr_db == 100.0);
    }
    ColorFlipSource src;
    CHECK_THROWS_AS(calibrate_capture(src, 1), std::invalid_argument);
}

TEST_CASE("noisy source rest psnr sits near the expected value")
{
    NoisySceneSource::Options opts;
    opts.refresh_hz = 500;
    NoisySceneSource src(opts);
    const auto cal = calibrate_capture(src, 50);
    double sum = 0;
    for (std::size_t i = 1; i < cal.captures.size(); ++i) sum += *cal.captures[i].psnr_db;
    const double mean = sum / static_cast<double>(cal.captures.size() - 1);
    // Difference of two independent N(0, 1) noise fields: mse ~= 2.
    CHECK(std::abs(mean - 20.0 * std::log10(255.0 / std::sqrt(2.0))) < 1.0);
}

TEST_CASE("color flip run: measurements are bounded by the programmed latency and one capture")
{
    for (double latency : {0.0, 40.0}) {
        ColorFlipSource src(60.0, latency);
        LmtConfig cfg;
        cfg.detector.calibration_samples = 30;
        cfg.lead_in_ms = 100;
        cfg.tail_ms = 200;
        std::vector<Capture> log;
        const auto report = run_lmt(src, evenly_spaced_events(5, 150.0), [&](char k) { src.press(k); }, cfg, &log);
        CHECK(report.theta_db == 97.0);
        CHECK(report.misses == 0);
        CHECK(report.false_positives == 0);
        CHECK(report.stats.n == 5);
        CHECK(log.size() == report.capture_count);
        for (double il : report.il_values()) {
            CHECK(il >= latency);
            CHECK(il < latency + report.mean_capture_ms + 3.0);
        }
    }
}

TEST_CASE("zero events still yields theta and capture period")
{
    ColorFlipSource src(120.0);
    LmtConfig cfg;
    cfg.detector.calibration_samples = 20;
    cfg.lead_in_ms = 20;
    cfg.tail_ms = 50;
    const auto report = run_lmt(src, {}, nullptr, cfg);
    CHECK(report.rows.empty());
    CHECK(report.stats.n == 0);
    CHECK(report.theta_db == 97.0);
    CHECK(report.mean_capture_ms > 0.0);
}

TEST_CASE("display surface source reads the presented frame")
{
    auto surface = std::make_shared<testbed::DisplaySurface>();
    DisplaySurfaceSource src(surface, centered_region(100, 100, 10), 240.0);
    CHECK(src.grab() == Image(10, 10));
    surface->publish(Image(100, 100, Rgb{1, 2, 3}));
    CHECK(src.grab() == Image(10, 10, Rgb{1, 2, 3}));
    surface->publish(Image(5, 5));
    CHECK_THROWS_AS(src.grab(), SourceError);
}

TEST_CASE("failing source truncates the report")
{
    auto surface = std::make_shared<testbed::DisplaySurface>();
    surface->publish(Image(20, 20));
    DisplaySurfaceSource src(surface, Region{0, 0, 10, 10}, 240.0);
    LmtConfig cfg;
    cfg.detector.calibration_samples = 5;
    Observer obs(src, cfg);
    obs.calibrate();
    obs.start();
    precise_sleep_for(std::chrono::milliseconds(20));
    surface->publish(Image(4, 4));
    precise_sleep_for(std::chrono::milliseconds(20));
    const auto report = obs.finish();
    CHECK(report.truncated);
    CHECK_FALSE(report.failure.empty());
}

TEST_CASE("capture log and json report")
{
    std::vector<Capture> caps{{uniform(0), 5, 100.0}, {uniform(0), 9, std::nullopt}};
    std::ostringstream out;
    write_capture_log(out, caps);
    CHECK(out.str() == "index,timestamp_us,psnr_db\n0,5,100\n1,9,\n");

    LmtReport r;
    r.theta_db = 97;
    r.rows.push_back({{0, 'a'}, Detection{3, 17'000, 20.0}, 17.0});
    r.rows.push_back({{50'000, 'd'}, std::nullopt, std::nullopt});
    const auto j = to_json(r);
    CHECK(j["theta_db"] == 97.0);
    CHECK(j["rows"].size() == 2);
    CHECK(j["rows"][0]["il_ms"] == 17.0);
    CHECK(j["rows"][1]["il_ms"].is_null());
    CHECK(j["mode"] == "psnr_threshold");
}
