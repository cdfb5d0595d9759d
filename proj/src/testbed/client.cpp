#include "irrlab/testbed/client.hpp"

#include <stdexcept>

#include "irrlab/testbed/codec.hpp"

namespace irrlab::testbed {

void FrameQueue::push(NetworkMessage m)
{
    std::lock_guard lk(mutex_);
    queue_.push_back(std::move(m));
}

std::optional<NetworkMessage> FrameQueue::try_pop()
{
    std::lock_guard lk(mutex_);
    if (queue_.empty()) {
        return std::nullopt;
    }
    NetworkMessage m = std::move(queue_.front());
    queue_.pop_front();
    return m;
}

std::size_t FrameQueue::size() const
{
    std::lock_guard lk(mutex_);
    return queue_.size();
}

void DisplaySurface::publish(Image img)
{
    const auto now = MonotonicClock::now_us();
    std::lock_guard lk(mutex_);
    current_.image = std::move(img);
    ++current_.version;
    current_.published_us = now;
}

DisplaySurface::Snapshot DisplaySurface::latest() const
{
    std::lock_guard lk(mutex_);
    return current_;
}

std::uint64_t DisplaySurface::version() const
{
    std::lock_guard lk(mutex_);
    return current_.version;
}

Image DisplaySurface::read_region(const Region& region) const
{
    std::lock_guard lk(mutex_);
    if (current_.image.empty()) {
        return Image(region.width, region.height);
    }
    return current_.image.crop(region);
}

Guid client_submit_interaction(ClientState& c, char interaction, const SendFn& send)
{
    if (!is_scene_interaction(interaction)) {
        throw std::invalid_argument(std::string("interaction must be 'a' or 'd', got '") + interaction + "'");
    }
    PendingInteraction pi;
    pi.index = c.submitted;
    pi.interaction = interaction;
    do {
        pi.id = Guid::random();
    } while (c.cib.contains(pi.id));
    pi.timer.start();

    NetworkMessage m;
    m.type = MessageType::interaction;
    m.interaction = interaction;
    m.id = pi.id;

    const Guid id = pi.id;
    c.cib.emplace(id, std::move(pi));
    ++c.submitted;
    send(m);
    return id;
}

std::optional<Measurement> client_fixed_update(ClientState& c)
{
    auto arrived = c.cfb.try_pop();
    if (!arrived) {
        return std::nullopt;
    }
    auto it = c.cib.find(arrived->id);
    if (it == c.cib.end()) {
        ++c.protocol_errors;
        return std::nullopt;
    }
    if (arrived->type != MessageType::frame_result) {
        // The server rejected this interaction; it will never get a frame.
        ++c.protocol_errors;
        c.cib.erase(it);
        return std::nullopt;
    }
    PendingInteraction& pi = it->second;
    pi.timer.stop();

    Measurement m;
    m.index = pi.index;
    m.id = pi.id;
    m.interaction = pi.interaction;
    m.submit_us = pi.timer.start_us();
    m.complete_us = pi.timer.stop_us();
    m.il_ms = pi.timer.elapsed_ms();
    c.results.push_back(m);

    c.frame_bytes += arrived->frame.size();
    pi.frame = std::move(arrived->frame);
    try {
        c.display->publish(decode_frame(pi.frame));
    } catch (const CodecError&) {
        ++c.protocol_errors;
    }
    c.cib.erase(it);
    return m;
}

} // namespace irrlab::testbed
