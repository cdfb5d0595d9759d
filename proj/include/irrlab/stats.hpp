#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace irrlab {

/// Sample statistics (n - 1 denominator) over latency measurements in ms.
struct SummaryStats {
    double mean_ms = 0.0;
    double stddev_ms = 0.0;
    double variance = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    std::size_t n = 0;

    friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

class InsufficientSamples : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws InsufficientSamples when fewer than two values are given.
SummaryStats summarize(std::span<const double> values);

} // namespace irrlab
