#include "irrlab/testbed/guid.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace irrlab::testbed {

Guid Guid::random()
{
    // libstdc++'s default random_device reads the kernel CSPRNG.
    thread_local std::random_device rd;
    Guid g;
    for (std::size_t i = 0; i < g.bytes.size(); i += 4) {
        const std::uint32_t word = rd();
        for (std::size_t k = 0; k < 4; ++k) {
            g.bytes[i + k] = static_cast<std::uint8_t>(word >> (8 * k));
        }
    }
    return g;
}

bool Guid::is_nil() const
{
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

std::string Guid::to_string() const
{
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) {
            out.push_back('-');
        }
        out.push_back(hex[bytes[i] >> 4]);
        out.push_back(hex[bytes[i] & 0xF]);
    }
    return out;
}

Guid Guid::parse(const std::string& text)
{
    auto nibble = [&](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw std::invalid_argument("bad GUID text '" + text + "'");
    };
    std::string digits;
    for (char c : text) {
        if (c != '-') {
            digits.push_back(c);
        }
    }
    if (digits.size() != 32 || text.size() != 36) {
        throw std::invalid_argument("bad GUID text '" + text + "'");
    }
    Guid g;
    for (std::size_t i = 0; i < 16; ++i) {
        g.bytes[i] = static_cast<std::uint8_t>((nibble(digits[2 * i]) << 4) | nibble(digits[2 * i + 1]));
    }
    return g;
}

} // namespace irrlab::testbed
