#include "irrlab/clock.hpp"

#include <stdexcept>
#include <thread>

namespace irrlab {

namespace {

// Final stretch handled by yielding instead of sleeping; OS sleeps overshoot
// by roughly this much on a loaded host.
constexpr auto kYieldWindow = std::chrono::microseconds(300);

} // namespace

SteadyClock::time_point MonotonicClock::epoch()
{
    static const SteadyClock::time_point start = SteadyClock::now();
    return start;
}

Micros MonotonicClock::now_us()
{
    return from_time_point(SteadyClock::now());
}

SteadyClock::time_point MonotonicClock::to_time_point(Micros us)
{
    return epoch() + std::chrono::microseconds(us);
}

Micros MonotonicClock::from_time_point(SteadyClock::time_point tp)
{
    return std::chrono::duration_cast<std::chrono::microseconds>(tp - epoch()).count();
}

void precise_sleep_until(SteadyClock::time_point deadline)
{
    auto now = SteadyClock::now();
    if (deadline - now > kYieldWindow) {
        std::this_thread::sleep_until(deadline - kYieldWindow);
    }
    while (SteadyClock::now() < deadline) {
        std::this_thread::yield();
    }
}

void Stopwatch::start()
{
    start_us_ = MonotonicClock::now_us();
    stop_us_ = start_us_;
    running_ = true;
}

void Stopwatch::stop()
{
    if (!running_) {
        throw std::logic_error("stopwatch stopped twice or never started");
    }
    stop_us_ = MonotonicClock::now_us();
    running_ = false;
}

Micros Stopwatch::elapsed_us() const
{
    return (running_ ? MonotonicClock::now_us() : stop_us_) - start_us_;
}

} // namespace irrlab
