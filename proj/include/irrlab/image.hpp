#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace irrlab {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Region {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    friend bool operator==(const Region&, const Region&) = default;
};

/// Interleaved RGB8 pixel grid, row-major.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {});

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }
    std::size_t byte_size() const { return pixels_.size(); }

    std::span<const std::uint8_t> bytes() const { return pixels_; }
    std::span<std::uint8_t> bytes() { return pixels_; }

    Rgb at(int x, int y) const;
    void set(int x, int y, Rgb c);
    void fill(Rgb c);

    /// Copies `region`; throws std::out_of_range if it does not fit.
    Image crop(const Region& region) const;

    static Image from_bytes(int width, int height, std::vector<std::uint8_t> rgb);

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

} // namespace irrlab
