#include "irrlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace irrlab {

SummaryStats summarize(std::span<const double> values)
{
    if (values.size() < 2) {
        throw InsufficientSamples("need at least 2 measurements, got " + std::to_string(values.size()));
    }
    SummaryStats s;
    s.n = values.size();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min_ms = *lo;
    s.max_ms = *hi;

    // Welford keeps the variance stable for large offsets (IL ~ 200 ms, spread ~ 2 ms).
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        const double d = v - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (v - mean);
    }
    s.mean_ms = mean;
    s.variance = m2 / static_cast<double>(s.n - 1);
    s.stddev_ms = std::sqrt(s.variance);
    return s;
}

} // namespace irrlab
