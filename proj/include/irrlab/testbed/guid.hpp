#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace irrlab::testbed {

struct Guid {
    std::array<std::uint8_t, 16> bytes{};

    /// 16 bytes from the OS entropy source.
    static Guid random();

    bool is_nil() const;

    /// Canonical 8-4-4-4-12 lowercase hex form.
    std::string to_string() const;
    static Guid parse(const std::string& text);

    friend auto operator<=>(const Guid&, const Guid&) = default;
};

} // namespace irrlab::testbed

template <>
struct std::hash<irrlab::testbed::Guid> {
    std::size_t operator()(const irrlab::testbed::Guid& g) const noexcept
    {
        std::uint64_t h = 1469598103934665603ull;
        for (auto b : g.bytes) {
            h = (h ^ b) * 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};
