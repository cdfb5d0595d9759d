#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "irrlab/clock.hpp"
#include "irrlab/image.hpp"
#include "irrlab/testbed/message.hpp"

namespace irrlab::testbed {

/// An interaction that has been sent and whose result has not arrived yet.
struct PendingInteraction {
    std::size_t index = 0;
    char interaction = keys::rotate_left;
    Guid id;
    Stopwatch timer;
    /// Filled with the arrived frame bytes; kept for debugging only.
    std::vector<std::uint8_t> frame;
};

struct Measurement {
    std::size_t index = 0;
    Guid id;
    char interaction = keys::rotate_left;
    Micros submit_us = 0;
    Micros complete_us = 0;
    double il_ms = 0.0;
};

/// Client Frame Buffer: arrived messages waiting for the next tick.
/// One producer (network receive), one consumer (tick).
class FrameQueue {
public:
    void push(NetworkMessage m);
    std::optional<NetworkMessage> try_pop();
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::deque<NetworkMessage> queue_;
};

/// Latest frame shown by the client. Readable from any thread.
class DisplaySurface {
public:
    struct Snapshot {
        Image image;
        std::uint64_t version = 0;
        Micros published_us = 0;
    };

    void publish(Image img);
    Snapshot latest() const;
    std::uint64_t version() const;

    /// Copies `region` out of the current frame. An empty surface reads as
    /// a black region of the requested size.
    Image read_region(const Region& region) const;

private:
    mutable std::mutex mutex_;
    Snapshot current_;
};

struct ClientState {
    /// Client Interaction Buffer, keyed by GUID. Entries leave when their
    /// result is dequeued.
    std::unordered_map<Guid, PendingInteraction> cib;
    FrameQueue cfb;
    std::vector<Measurement> results;
    std::shared_ptr<DisplaySurface> display = std::make_shared<DisplaySurface>();

    std::size_t submitted = 0;
    std::uint64_t protocol_errors = 0;
    std::uint64_t frame_bytes = 0;
};

using SendFn = std::function<void(const NetworkMessage&)>;

/// Creates a PendingInteraction with a fresh GUID and started stopwatch,
/// records it in the CIB and sends the matching NetworkMessage. Throws
/// std::invalid_argument for anything but 'a' or 'd'; send failures propagate.
Guid client_submit_interaction(ClientState& c, char interaction, const SendFn& send);

/// One FixedUpdate tick: dequeues at most one arrived message, stops its
/// stopwatch, records the measurement and shows the frame. A GUID missing
/// from the CIB counts as a protocol error and the message is dropped.
std::optional<Measurement> client_fixed_update(ClientState& c);

} // namespace irrlab::testbed
