#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "irrlab/clock.hpp"

namespace irrlab::sim {

enum class Mode {
    /// Every message waits its own delay concurrently; releases are gated so
    /// they leave in admission order. Inter-arrival spacing is preserved.
    asynchronous,
    /// Messages are delayed one after another; each delay starts when the
    /// previous message has been released, so a backlog builds whenever the
    /// send spacing is shorter than the delay.
    synchronous,
};

inline Mode parse_mode(std::string_view s);
inline std::string_view to_string(Mode m);

class SimulatorShutdown : public std::runtime_error {
public:
    SimulatorShutdown() : std::runtime_error("latency simulator is shut down") {}
};

template <class Message>
struct LatencySimulatorResult {
    Message message;
    std::uint64_t message_number = 0;
    Micros admitted_us = 0;
    Micros released_us = 0;
};

/// Order-preserving delay line.
///
/// delay() stamps each message with the next message number (1, 2, 3, ...)
/// and schedules its release. A release happens no earlier than
/// admission + duration, and never before every lower-numbered message has
/// been released: the gate only opens for number == processed + 1. The
/// processed counter is bumped after the ready handlers return.
///
/// Handlers run one at a time, either on the internal dispatcher thread or,
/// for zero-duration messages with nothing ahead of them, directly in the
/// caller of delay(). Handlers must not call shutdown().
template <class Message>
class LatencySimulator {
public:
    using Result = LatencySimulatorResult<Message>;
    using Handler = std::function<void(const Result&)>;
    using HandlerId = std::uint64_t;

    explicit LatencySimulator(double delay_ms = 0.0, Mode mode = Mode::asynchronous)
        : mode_(mode), delay_ms_(delay_ms)
    {
        if (!(delay_ms >= 0.0)) {
            throw std::invalid_argument("delay_ms must be >= 0");
        }
        dispatcher_ = std::thread([this] { dispatch_loop(); });
    }

    LatencySimulator(const LatencySimulator&) = delete;
    LatencySimulator& operator=(const LatencySimulator&) = delete;

    ~LatencySimulator() { shutdown(); }

    Mode mode() const { return mode_; }
    double delay_ms() const { return delay_ms_; }

    std::uint64_t received_count() const { return received_.load(); }
    std::uint64_t processed_count() const { return processed_.load(); }
    std::uint64_t handler_errors() const { return handler_errors_.load(); }

    HandlerId on_message_ready(Handler h)
    {
        std::lock_guard lk(handlers_mutex_);
        const HandlerId id = next_handler_id_++;
        handlers_.emplace(id, std::move(h));
        return id;
    }

    void remove_handler(HandlerId id)
    {
        std::lock_guard lk(handlers_mutex_);
        handlers_.erase(id);
    }

    /// Admits `message` with the simulator's configured delay.
    std::uint64_t delay(Message message) { return delay(std::move(message), delay_ms_); }

    /// Admits `message`; returns its message number. Throws SimulatorShutdown
    /// after shutdown() has begun.
    std::uint64_t delay(Message message, double duration_ms)
    {
        if (!(duration_ms >= 0.0)) {
            throw std::invalid_argument("duration must be >= 0");
        }
        const auto now = SteadyClock::now();
        std::unique_lock lk(mutex_);
        if (stopping_) {
            throw SimulatorShutdown();
        }
        const std::uint64_t number = received_.load() + 1;
        received_.store(number);

        if (duration_ms == 0.0 && pending_.empty() && processed_.load() + 1 == number) {
            // Nothing ahead of us; fire in the caller's context.
            lk.unlock();
            Result r{std::move(message), number, MonotonicClock::from_time_point(now), 0};
            fire(r);
            lk.lock();
            processed_.store(number);
            last_release_ = SteadyClock::now();
            cv_.notify_all();
            return number;
        }

        pending_.push_back(Pending{std::move(message), number, now, ms_to_duration(duration_ms)});
        cv_.notify_all();
        return number;
    }

    /// Stops admissions and blocks until every admitted message has been
    /// released. Idempotent.
    void shutdown()
    {
        {
            std::unique_lock lk(mutex_);
            stopping_ = true;
            cv_.notify_all();
            cv_.wait(lk, [this] { return processed_.load() == received_.load(); });
        }
        if (dispatcher_.joinable()) {
            dispatcher_.join();
        }
    }

private:
    struct Pending {
        Message message;
        std::uint64_t number;
        SteadyClock::time_point admitted;
        std::chrono::microseconds duration;
    };

    void fire(Result& r)
    {
        r.released_us = MonotonicClock::now_us();
        std::vector<Handler> hs;
        {
            std::lock_guard lk(handlers_mutex_);
            hs.reserve(handlers_.size());
            for (auto& [id, h] : handlers_) {
                hs.push_back(h);
            }
        }
        for (auto& h : hs) {
            try {
                h(r);
            } catch (...) {
                ++handler_errors_;
            }
        }
    }

    void dispatch_loop()
    {
        std::unique_lock lk(mutex_);
        for (;;) {
            cv_.wait(lk, [this] {
                return (stopping_ && pending_.empty() && processed_.load() == received_.load()) ||
                       (!pending_.empty() && pending_.front().number == processed_.load() + 1);
            });
            if (pending_.empty()) {
                return;
            }
            Pending head = std::move(pending_.front());
            pending_.pop_front();

            auto start = head.admitted;
            if (mode_ == Mode::synchronous) {
                start = std::max(start, last_release_);
            }
            const auto deadline = start + head.duration;

            lk.unlock();
            precise_sleep_until(deadline);
            Result r{std::move(head.message), head.number, MonotonicClock::from_time_point(head.admitted), 0};
            fire(r);
            lk.lock();

            processed_.store(head.number);
            last_release_ = SteadyClock::now();
            cv_.notify_all();
        }
    }

    const Mode mode_;
    const double delay_ms_;

    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<Pending> pending_;
    std::atomic<std::uint64_t> received_{0};
    std::atomic<std::uint64_t> processed_{0};
    SteadyClock::time_point last_release_{};
    bool stopping_ = false;

    std::mutex handlers_mutex_;
    std::map<HandlerId, Handler> handlers_;
    HandlerId next_handler_id_ = 1;
    std::atomic<std::uint64_t> handler_errors_{0};

    std::thread dispatcher_;
};

inline Mode parse_mode(std::string_view s)
{
    if (s == "async" || s == "asynchronous") {
        return Mode::asynchronous;
    }
    if (s == "sync" || s == "synchronous") {
        return Mode::synchronous;
    }
    throw std::invalid_argument("unknown simulator mode '" + std::string(s) + "'");
}

inline std::string_view to_string(Mode m)
{
    return m == Mode::asynchronous ? "async" : "sync";
}

/// Release times the simulator aims for, assuming instantaneous handlers:
/// release[k] = max(ready[k], release[k-1]) where ready[k] is
/// admitted[k] + duration[k] in asynchronous mode and
/// max(admitted[k], release[k-1]) + duration[k] in synchronous mode.
/// Inputs are in admission order, all in ms.
inline std::vector<double> planned_release_times(const std::vector<double>& admitted_ms,
                                                 const std::vector<double>& duration_ms, Mode mode)
{
    if (admitted_ms.size() != duration_ms.size()) {
        throw std::invalid_argument("admission and duration counts differ");
    }
    std::vector<double> out(admitted_ms.size());
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < admitted_ms.size(); ++k) {
        const double start = mode == Mode::synchronous ? std::max(admitted_ms[k], prev) : admitted_ms[k];
        out[k] = std::max(start + duration_ms[k], prev);
        prev = out[k];
    }
    return out;
}

/// Feeds `messages` into a synchronous-mode simulator at a fixed spacing of
/// `sd_ms` and returns each message's observed delay (release - admission)
/// in ms, in admission order.
template <class Message>
std::vector<double> delay_synchronous(std::vector<Message> messages, double nl_ms, double sd_ms)
{
    std::vector<double> delays(messages.size(), 0.0);
    if (messages.empty()) {
        return delays;
    }
    LatencySimulator<Message> sim(nl_ms, Mode::synchronous);
    sim.on_message_ready([&delays](const LatencySimulatorResult<Message>& r) {
        delays[r.message_number - 1] = micros_to_ms(r.released_us - r.admitted_us);
    });
    const auto start = SteadyClock::now();
    for (std::size_t i = 0; i < messages.size(); ++i) {
        precise_sleep_until(start + ms_to_duration(sd_ms * static_cast<double>(i)));
        sim.delay(std::move(messages[i]));
    }
    sim.shutdown();
    return delays;
}

} // namespace irrlab::sim
