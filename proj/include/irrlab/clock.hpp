#pragma once

#include <chrono>
#include <cstdint>

namespace irrlab {

using SteadyClock = std::chrono::steady_clock;

/// Microseconds on the process-wide monotonic timeline. Zero is the first
/// time anything in the process asked for the clock.
using Micros = std::int64_t;

/// The single global timer shared by every component that timestamps events
/// (client stopwatches, capture loop, interaction hooks). All values are
/// comparable across threads.
class MonotonicClock {
public:
    static Micros now_us();
    static SteadyClock::time_point epoch();
    static SteadyClock::time_point to_time_point(Micros us);
    static Micros from_time_point(SteadyClock::time_point tp);
};

inline double micros_to_ms(Micros us) { return static_cast<double>(us) / 1000.0; }

inline std::chrono::microseconds ms_to_duration(double ms)
{
    return std::chrono::microseconds(static_cast<std::int64_t>(ms * 1000.0 + (ms >= 0 ? 0.5 : -0.5)));
}

/// Sleeps until `deadline`. Coarse OS sleep gets close, a short yield loop
/// finishes the job. Never returns early.
void precise_sleep_until(SteadyClock::time_point deadline);

inline void precise_sleep_for(std::chrono::microseconds d)
{
    precise_sleep_until(SteadyClock::now() + d);
}

/// Elapsed-time timer with microsecond resolution.
class Stopwatch {
public:
    Stopwatch() = default;

    static Stopwatch started()
    {
        Stopwatch sw;
        sw.start();
        return sw;
    }

    void start();
    void stop();
    bool running() const { return running_; }
    Micros start_us() const { return start_us_; }
    Micros stop_us() const { return stop_us_; }
    Micros elapsed_us() const;
    double elapsed_ms() const { return micros_to_ms(elapsed_us()); }

private:
    Micros start_us_ = 0;
    Micros stop_us_ = 0;
    bool running_ = false;
};

} // namespace irrlab
