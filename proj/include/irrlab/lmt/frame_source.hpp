#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "irrlab/clock.hpp"
#include "irrlab/image.hpp"

namespace irrlab::testbed {
class DisplaySurface;
}

namespace irrlab::lmt {

class SourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Something the LMT can watch. grab() returns the reticle contents of the
/// most recently presented frame, blocking until the next refresh of the
/// simulated display (never longer than one refresh period).
class FrameSource {
public:
    virtual ~FrameSource() = default;

    virtual Image grab() = 0;
    virtual double refresh_hz() const = 0;
    virtual Region region() const = 0;
};

/// Paces grab() to a fixed refresh grid and delegates pixel production.
class PacedSource : public FrameSource {
public:
    explicit PacedSource(double refresh_hz, Region region);

    Image grab() final;
    double refresh_hz() const final { return refresh_hz_; }
    Region region() const final { return region_; }

protected:
    /// Pixels on screen at `now_us`.
    virtual Image present(Micros now_us) = 0;

private:
    double refresh_hz_;
    Region region_;
    std::optional<SteadyClock::time_point> origin_;
    std::chrono::nanoseconds period_;
    std::int64_t frame_ = 0;
};

/// A scripted application under test. press() is the interaction; the scene
/// toggles between two states `latency_ms` after every press.
class ScriptedScene : public PacedSource {
public:
    ScriptedScene(double refresh_hz, Region region, double latency_ms);

    /// Records a press at the current time.
    void press(char label);
    double latency_ms() const { return latency_ms_; }

protected:
    /// Number of presses whose programmed response is visible at `now_us`.
    std::size_t visible_changes(Micros now_us) const;

private:
    mutable std::mutex mutex_;
    std::vector<Micros> presses_;
    Micros latency_us_;
    double latency_ms_;
};

/// Green field that turns blue (and back) in response to presses.
class ColorFlipSource final : public ScriptedScene {
public:
    static constexpr Rgb kGreen{0, 200, 0};
    static constexpr Rgb kBlue{0, 0, 220};

    ColorFlipSource(double refresh_hz = 60.0, double latency_ms = 0.0, int size = 50);

protected:
    Image present(Micros now_us) override;
};

/// Textured scene with fresh Gaussian noise on every refresh, so no two
/// captures are identical; a press shifts every channel by `change_level`.
class NoisySceneSource final : public ScriptedScene {
public:
    struct Options {
        double refresh_hz = 60.0;
        double latency_ms = 0.0;
        int size = 50;
        double noise_sigma = 1.0;
        int change_level = 25;
        std::uint64_t seed = 1;
    };

    explicit NoisySceneSource(const Options& opts);

protected:
    Image present(Micros now_us) override;

private:
    Options opts_;
    Image base_;
    std::mt19937_64 rng_;
};

/// Reads the testbed client's presented frame.
class DisplaySurfaceSource final : public PacedSource {
public:
    DisplaySurfaceSource(std::shared_ptr<const testbed::DisplaySurface> surface, Region region,
                         double refresh_hz = 60.0);

protected:
    Image present(Micros now_us) override;

private:
    std::shared_ptr<const testbed::DisplaySurface> surface_;
};

/// A 50x50 reticle centered in a frame of the given size.
Region centered_region(int frame_width, int frame_height, int size = 50);

} // namespace irrlab::lmt
