#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "irrlab/clock.hpp"
#include "irrlab/image.hpp"

namespace irrlab::lmt {

/// PSNR reported for identical frames and for the first capture of a run.
inline constexpr double kIdenticalPsnr = 100.0;

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One grab of the reticle.
struct Capture {
    Image pixels;
    Micros timestamp_us = 0;
    std::optional<double> psnr_db;
};

/// Mean over every pixel and channel of the squared 0-255 difference.
double mse(const Image& a, const Image& b);

/// 100 for identical frames, otherwise 20 log10(255 / sqrt(mse)) clamped
/// to [0, 100].
double psnr(const Image& current, const Image& previous);

/// PSNR of a capture against its predecessor; 100 when there is none.
double psnr(const Capture& current, const Capture* previous);

/// Fills psnr_db for every capture from its predecessor in sequence order.
void assign_psnr(std::vector<Capture>& captures);

} // namespace irrlab::lmt
