#include "irrlab/image.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace irrlab {

Image::Image(int width, int height, Rgb fill_color)
    : width_(width), height_(height)
{
    if (width < 0 || height < 0) {
        throw std::invalid_argument("negative image dimensions");
    }
    pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    fill(fill_color);
}

Rgb Image::at(int x, int y) const
{
    const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Image::set(int x, int y, Rgb c)
{
    const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
}

void Image::fill(Rgb c)
{
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = c.r;
        pixels_[i + 1] = c.g;
        pixels_[i + 2] = c.b;
    }
}

Image Image::crop(const Region& r) const
{
    if (r.x < 0 || r.y < 0 || r.width <= 0 || r.height <= 0 || r.x + r.width > width_ ||
        r.y + r.height > height_) {
        throw std::out_of_range("region " + std::to_string(r.width) + "x" + std::to_string(r.height) +
                                "+" + std::to_string(r.x) + "+" + std::to_string(r.y) +
                                " outside " + std::to_string(width_) + "x" + std::to_string(height_));
    }
    Image out(r.width, r.height);
    const std::size_t row_bytes = static_cast<std::size_t>(r.width) * 3;
    for (int y = 0; y < r.height; ++y) {
        const auto src = (static_cast<std::size_t>(r.y + y) * width_ + r.x) * 3;
        std::copy_n(pixels_.begin() + static_cast<std::ptrdiff_t>(src), row_bytes,
                    out.pixels_.begin() + static_cast<std::ptrdiff_t>(y * row_bytes));
    }
    return out;
}

Image Image::from_bytes(int width, int height, std::vector<std::uint8_t> rgb)
{
    if (width < 0 || height < 0 ||
        rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
        throw std::invalid_argument("pixel data does not match dimensions");
    }
    Image img;
    img.width_ = width;
    img.height_ = height;
    img.pixels_ = std::move(rgb);
    return img;
}

} // namespace irrlab
