#include "irrlab/testbed/message.hpp"

#include <algorithm>
#include <string>

namespace irrlab::testbed {

bool is_known_interaction(char c)
{
    return c == keys::rotate_left || c == keys::rotate_right || c == keys::quit;
}

bool is_scene_interaction(char c)
{
    return c == keys::rotate_left || c == keys::rotate_right;
}

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32_be(std::span<const std::uint8_t> in)
{
    return (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) | (std::uint32_t{in[2]} << 8) |
           std::uint32_t{in[3]};
}

std::vector<std::uint8_t> encode_message(const NetworkMessage& m)
{
    if (m.frame.size() > kMaxPayloadBytes - kHeaderBytes) {
        throw ProtocolError("frame too large to encode");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + m.frame.size());
    out.push_back(static_cast<std::uint8_t>(m.type));
    out.insert(out.end(), m.id.bytes.begin(), m.id.bytes.end());
    out.push_back(static_cast<std::uint8_t>(m.interaction));
    put_u32_be(out, static_cast<std::uint32_t>(m.frame.size()));
    out.insert(out.end(), m.frame.begin(), m.frame.end());
    return out;
}

NetworkMessage decode_message(std::span<const std::uint8_t> payload)
{
    if (payload.size() < kHeaderBytes) {
        throw ProtocolError("truncated message: " + std::to_string(payload.size()) + " bytes");
    }
    NetworkMessage m;
    const auto type = payload[0];
    if (type > static_cast<std::uint8_t>(MessageType::error)) {
        throw ProtocolError("unknown message type " + std::to_string(type));
    }
    m.type = static_cast<MessageType>(type);
    std::copy_n(payload.begin() + 1, 16, m.id.bytes.begin());
    m.interaction = static_cast<char>(payload[17]);
    if (m.type != MessageType::error && !is_known_interaction(m.interaction)) {
        throw ProtocolError("unknown interaction byte " + std::to_string(payload[17]));
    }
    const std::uint32_t frame_len = get_u32_be(payload.subspan(18, 4));
    if (payload.size() - kHeaderBytes != frame_len) {
        throw ProtocolError("frame length " + std::to_string(frame_len) + " does not match payload size " +
                            std::to_string(payload.size()));
    }
    m.frame.assign(payload.begin() + kHeaderBytes, payload.end());
    return m;
}

} // namespace irrlab::testbed
