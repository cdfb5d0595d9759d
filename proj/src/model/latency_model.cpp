#include "irrlab/latency_model.hpp"

#include <algorithm>
#include <cmath>

namespace irrlab::model {

namespace {

std::string point_name(std::size_t index) { return "t" + std::to_string(index); }

void require_nonnegative(double v, const char* name)
{
    if (!std::isfinite(v) || v < 0) {
        throw std::invalid_argument(std::string(name) + " must be a finite nonnegative duration");
    }
}

double residual(double il, double known_sum, const char* what)
{
    const double r = il - known_sum;
    // Rounding in the sums can leave -1 ulp-scale residuals for a true zero.
    const double slack = 1e-9 * std::max(1.0, std::abs(il));
    if (r < 0 && r >= -slack) {
        return 0.0;
    }
    if (r < 0) {
        throw InconsistentLatency(std::string(what) + " residual is negative: components exceed IL by " +
                                  std::to_string(-r) + " ms");
    }
    return r;
}

} // namespace

void InteractionTimeline::set(std::size_t index, Micros us)
{
    points_.at(index) = us;
}

void InteractionTimeline::clear(std::size_t index)
{
    points_.at(index).reset();
}

Micros InteractionTimeline::at(std::size_t index) const
{
    const auto& p = points_.at(index);
    if (!p) {
        throw UnmeasuredTimestamp(point_name(index));
    }
    return *p;
}

bool InteractionTimeline::monotone() const
{
    std::optional<Micros> last;
    for (const auto& p : points_) {
        if (!p) {
            continue;
        }
        if (last && *p < *last) {
            return false;
        }
        last = p;
    }
    return true;
}

InteractionTimeline InteractionTimeline::shifted(Micros delta_us) const
{
    InteractionTimeline out = *this;
    for (auto& p : out.points_) {
        if (p) {
            *p += delta_us;
        }
    }
    return out;
}

void LatencyBreakdown::validate() const
{
    require_nonnegative(idl, "idl");
    require_nonnegative(cl1, "cl1");
    require_nonnegative(nl_up, "nl_up");
    require_nonnegative(sl, "sl");
    require_nonnegative(nl_down, "nl_down");
    require_nonnegative(cl2, "cl2");
    require_nonnegative(dl, "dl");
}

LatencyBreakdown LatencyBreakdown::with_round_trip_nl(double nl_round_trip)
{
    require_nonnegative(nl_round_trip, "nl");
    LatencyBreakdown b;
    b.nl_up = nl_round_trip / 2;
    b.nl_down = nl_round_trip / 2;
    return b;
}

double total_il(const LatencyBreakdown& b)
{
    b.validate();
    return b.idl + b.cl1 + b.nl_up + b.sl + b.nl_down + b.cl2 + b.dl;
}

double il_from_timeline(const InteractionTimeline& tl)
{
    return micros_to_ms(tl.at(7) - tl.at(0));
}

double sl_residual(double il, double idl, double cl, double nl, double dl)
{
    return residual(il, idl + cl + nl + dl, "SL");
}

NoisyEstimate sl_from_timestamps(Micros t2, Micros t5, double nl)
{
    require_nonnegative(nl, "nl");
    const double v = micros_to_ms(t5 - t2) - nl;
    return {v, v < 0};
}

NoisyEstimate sl_from_timestamps(const InteractionTimeline& tl, double nl)
{
    return sl_from_timestamps(tl.at(2), tl.at(5), nl);
}

double dl_residual(double il, double idl, double cl, double nl, double sl)
{
    return residual(il, idl + cl + nl + sl, "DL");
}

double synchronous_backlog_delay(double nl, double sd, std::size_t i)
{
    require_nonnegative(nl, "nl");
    require_nonnegative(sd, "sd");
    return nl + static_cast<double>(i) * std::max(0.0, nl - sd);
}

double rough_il_estimate(const RoughEstimateInputs& in)
{
    require_nonnegative(in.rtt_ms, "rtt_ms");
    require_nonnegative(in.mean_render_ms, "mean_render_ms");
    return in.rtt_ms + in.mean_render_ms;
}

} // namespace irrlab::model
