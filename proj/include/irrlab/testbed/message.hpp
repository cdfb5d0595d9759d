#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "irrlab/testbed/guid.hpp"

namespace irrlab::testbed {

// Wire layout of one message payload (all integers big-endian):
//
//   [type u8][guid 16 bytes][interaction u8][frame_len u32][frame bytes]
//
// On the socket every payload is preceded by its own u32 length.

enum class MessageType : std::uint8_t {
    interaction = 0,
    frame_result = 1,
    shutdown = 2,
    error = 3,
};

namespace keys {
inline constexpr char rotate_left = 'a';
inline constexpr char rotate_right = 'd';
inline constexpr char quit = 'q';
} // namespace keys

bool is_known_interaction(char c);
/// 'a' or 'd'; the characters a client may submit as interactions.
bool is_scene_interaction(char c);

inline constexpr std::size_t kHeaderBytes = 1 + 16 + 1 + 4;
inline constexpr std::size_t kMaxPayloadBytes = 64u << 20;

struct NetworkMessage {
    MessageType type = MessageType::interaction;
    char interaction = keys::rotate_left;
    Guid id;
    std::vector<std::uint8_t> frame;
    /// Simulator bookkeeping; never serialized.
    std::uint64_t message_number = 0;

    friend bool operator==(const NetworkMessage& a, const NetworkMessage& b)
    {
        return a.type == b.type && a.interaction == b.interaction && a.id == b.id && a.frame == b.frame;
    }
};

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_message(const NetworkMessage& m);

/// Throws ProtocolError on an unknown type byte, an interaction byte outside
/// {a, d, q} (error responses may carry any byte), truncation, or trailing
/// bytes.
NetworkMessage decode_message(std::span<const std::uint8_t> payload);

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v);
std::uint32_t get_u32_be(std::span<const std::uint8_t> in);

} // namespace irrlab::testbed
