#include "irrlab/lmt/frame_source.hpp"

#include <algorithm>
#include <cmath>

#include "irrlab/testbed/client.hpp"

namespace irrlab::lmt {

PacedSource::PacedSource(double refresh_hz, Region region)
    : refresh_hz_(refresh_hz), region_(region)
{
    if (!(refresh_hz > 0.0)) {
        throw std::invalid_argument("refresh_hz must be positive");
    }
    if (region.width <= 0 || region.height <= 0) {
        throw std::invalid_argument("reticle must have a positive size");
    }
    period_ = std::chrono::nanoseconds(static_cast<std::int64_t>(std::llround(1e9 / refresh_hz)));
}

Image PacedSource::grab()
{
    const auto now = SteadyClock::now();
    if (!origin_) {
        origin_ = now;
        frame_ = 0;
    } else {
        // Next refresh boundary strictly after the previous one we served.
        const auto elapsed_frames = (now - *origin_) / period_;
        frame_ = std::max<std::int64_t>(frame_ + 1, elapsed_frames + 1);
        precise_sleep_until(*origin_ + frame_ * period_);
    }
    return present(MonotonicClock::now_us());
}

ScriptedScene::ScriptedScene(double refresh_hz, Region region, double latency_ms)
    : PacedSource(refresh_hz, region), latency_us_(ms_to_duration(latency_ms).count()), latency_ms_(latency_ms)
{
    if (!(latency_ms >= 0.0)) {
        throw std::invalid_argument("programmed latency must be >= 0");
    }
}

void ScriptedScene::press(char)
{
    const auto now = MonotonicClock::now_us();
    std::lock_guard lk(mutex_);
    presses_.push_back(now);
}

std::size_t ScriptedScene::visible_changes(Micros now_us) const
{
    std::lock_guard lk(mutex_);
    return static_cast<std::size_t>(std::count_if(presses_.begin(), presses_.end(),
                                                  [&](Micros p) { return p + latency_us_ <= now_us; }));
}

ColorFlipSource::ColorFlipSource(double refresh_hz, double latency_ms, int size)
    : ScriptedScene(refresh_hz, Region{0, 0, size, size}, latency_ms)
{
}

Image ColorFlipSource::present(Micros now_us)
{
    const auto r = region();
    return Image(r.width, r.height, visible_changes(now_us) % 2 == 0 ? kGreen : kBlue);
}

NoisySceneSource::NoisySceneSource(const Options& opts)
    : ScriptedScene(opts.refresh_hz, Region{0, 0, opts.size, opts.size}, opts.latency_ms),
      opts_(opts),
      base_(opts.size, opts.size),
      rng_(opts.seed)
{
    // Smooth mid-range gradient so noise and the change never clip.
    for (int y = 0; y < opts.size; ++y) {
        for (int x = 0; x < opts.size; ++x) {
            const auto v = static_cast<std::uint8_t>(90 + (x * 40) / std::max(1, opts.size - 1));
            const auto w = static_cast<std::uint8_t>(100 + (y * 30) / std::max(1, opts.size - 1));
            base_.set(x, y, {v, w, static_cast<std::uint8_t>((v + w) / 2)});
        }
    }
}

Image NoisySceneSource::present(Micros now_us)
{
    const int offset = visible_changes(now_us) % 2 == 0 ? 0 : opts_.change_level;
    std::normal_distribution<double> noise(0.0, opts_.noise_sigma);
    Image out = base_;
    for (auto& b : out.bytes()) {
        const double v = static_cast<double>(b) + offset + noise(rng_);
        b = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return out;
}

DisplaySurfaceSource::DisplaySurfaceSource(std::shared_ptr<const testbed::DisplaySurface> surface, Region region,
                                           double refresh_hz)
    : PacedSource(refresh_hz, region), surface_(std::move(surface))
{
    if (!surface_) {
        throw std::invalid_argument("display surface is null");
    }
}

Image DisplaySurfaceSource::present(Micros)
{
    try {
        return surface_->read_region(region());
    } catch (const std::out_of_range& e) {
        throw SourceError(e.what());
    }
}

Region centered_region(int frame_width, int frame_height, int size)
{
    return Region{(frame_width - size) / 2, (frame_height - size) / 2, size, size};
}

} // namespace irrlab::lmt
