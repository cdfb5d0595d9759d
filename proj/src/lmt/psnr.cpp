#include "irrlab/lmt/psnr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace irrlab::lmt {

double mse(const Image& a, const Image& b)
{
    if (a.width() != b.width() || a.height() != b.height()) {
        throw DimensionMismatch("capture sizes differ: " + std::to_string(a.width()) + "x" +
                                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()));
    }
    const auto pa = a.bytes();
    const auto pb = b.bytes();
    if (pa.empty()) {
        return 0.0;
    }
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const int d = int(pa[i]) - int(pb[i]);
        sum += static_cast<std::uint64_t>(d * d);
    }
    return static_cast<double>(sum) / static_cast<double>(pa.size());
}

double psnr(const Image& current, const Image& previous)
{
    const double e = mse(current, previous);
    if (e == 0.0) {
        return kIdenticalPsnr;
    }
    return std::clamp(20.0 * std::log10(255.0 / std::sqrt(e)), 0.0, kIdenticalPsnr);
}

double psnr(const Capture& current, const Capture* previous)
{
    if (previous == nullptr) {
        return kIdenticalPsnr;
    }
    return psnr(current.pixels, previous->pixels);
}

void assign_psnr(std::vector<Capture>& captures)
{
    for (std::size_t n = 0; n < captures.size(); ++n) {
        captures[n].psnr_db = psnr(captures[n], n == 0 ? nullptr : &captures[n - 1]);
    }
}

} // namespace irrlab::lmt
