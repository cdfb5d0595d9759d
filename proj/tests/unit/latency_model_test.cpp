#include <doctest.h>

#include <cmath>
#include <random>

#include "irrlab/latency_model.hpp"

using namespace irrlab;
using namespace irrlab::model;

namespace {

InteractionTimeline timeline(std::initializer_list<std::pair<std::size_t, Micros>> points)
{
    InteractionTimeline tl;
    for (auto [i, us] : points) {
        tl.set(i, us);
    }
    return tl;
}

// Multiples of 1/1024 ms below 2^20: every sum below is exact in a double.
double dyadic(std::mt19937_64& rng)
{
    return static_cast<double>(rng() % (1u << 20)) / 1024.0;
}

LatencyBreakdown random_breakdown(std::mt19937_64& rng)
{
    return {dyadic(rng), dyadic(rng), dyadic(rng), dyadic(rng), dyadic(rng), dyadic(rng), dyadic(rng)};
}

} // namespace

TEST_CASE("total_il sums the seven components")
{
    CHECK(total_il({}) == 0.0);
    CHECK(total_il({1, 2, 3, 4, 5, 6, 7}) == 28.0);
    // NL 174 split evenly, SL = 5.04 render + 12.69 capture/compression.
    CHECK(total_il({0, 0, 87, 17.73, 87, 0, 0}) == doctest::Approx(191.73).epsilon(1e-12));
    CHECK(std::abs(total_il({0, 0, 87, 17.73, 87, 0, 0}) - 191.72) <= 0.01 + 1e-9);
}

TEST_CASE("negative components are rejected")
{
    LatencyBreakdown b;
    b.sl = -1;
    CHECK_THROWS_AS(total_il(b), std::invalid_argument);
}

TEST_CASE("il_from_timeline")
{
    CHECK(il_from_timeline(timeline({{0, 500}, {7, 500}})) == 0.0);
    CHECK(il_from_timeline(timeline({{0, 0}, {7, 15190}})) == doctest::Approx(15.19));
    CHECK(il_from_timeline(timeline({{0, 1000}, {7, 192720}})) == doctest::Approx(191.72));

    try {
        il_from_timeline(timeline({{0, 0}}));
        FAIL("expected UnmeasuredTimestamp");
    } catch (const UnmeasuredTimestamp& e) {
        CHECK(e.field() == "t7");
    }
    CHECK_THROWS_AS(il_from_timeline(timeline({{7, 10}})), UnmeasuredTimestamp);
}

TEST_CASE("timeline monotonicity ignores unmeasured points")
{
    CHECK(timeline({{2, 10}, {5, 20}}).monotone());
    CHECK_FALSE(timeline({{2, 30}, {5, 20}}).monotone());
    CHECK(InteractionTimeline{}.monotone());
}

TEST_CASE("sl_residual")
{
    CHECK(sl_residual(28, 1, 8, 8, 7) == 4.0);
    CHECK(sl_residual(10, 0, 0, 0, 0) == 10.0);
    CHECK_THROWS_AS(sl_residual(5, 10, 0, 0, 0), InconsistentLatency);
}

TEST_CASE("dl_residual")
{
    CHECK(dl_residual(28, 1, 8, 8, 4) == 7.0);
    CHECK(dl_residual(16, 0, 0, 0, 0) == 16.0);
    CHECK_THROWS_AS(dl_residual(0, 0, 0, 0, 1), InconsistentLatency);
}

TEST_CASE("sl_from_timestamps")
{
    auto zero = sl_from_timestamps(timeline({{2, 40}, {5, 40}}), 0);
    CHECK(zero.value_ms == 0.0);
    CHECK_FALSE(zero.negative_warning);

    auto wan = sl_from_timestamps(timeline({{2, 0}, {5, 191720}}), 174);
    CHECK(wan.value_ms == doctest::Approx(17.72));
    CHECK_FALSE(wan.negative_warning);

    auto noisy = sl_from_timestamps(timeline({{2, 0}, {5, 100000}}), 174);
    CHECK(noisy.value_ms == doctest::Approx(-74.0));
    CHECK(noisy.negative_warning);

    try {
        sl_from_timestamps(timeline({{5, 10}}), 0);
        FAIL("expected UnmeasuredTimestamp");
    } catch (const UnmeasuredTimestamp& e) {
        CHECK(e.field() == "t2");
    }
}

TEST_CASE("synchronous_backlog_delay")
{
    for (std::size_t i : {0u, 1u, 7u, 100u}) {
        CHECK(synchronous_backlog_delay(100, 100, i) == 100.0);
    }
    CHECK(synchronous_backlog_delay(174, 100, 2) == 322.0);
    CHECK(synchronous_backlog_delay(50, 100, 5) == 50.0);
}

TEST_CASE("rough_il_estimate")
{
    CHECK(rough_il_estimate({0, 0}) == 0.0);
    CHECK(rough_il_estimate({174, 17.73}) == doctest::Approx(191.73));
    CHECK(rough_il_estimate({32, 16}) == 48.0);
}

TEST_CASE("round-trip properties over random breakdowns")
{
    std::mt19937_64 rng(20240611);
    for (int n = 0; n < 10000; ++n) {
        const auto b = random_breakdown(rng);
        const double il = total_il(b);
        CHECK(sl_residual(il, b.idl, b.cl(), b.nl(), b.dl) == b.sl);
        CHECK(dl_residual(il, b.idl, b.cl(), b.nl(), b.sl) == b.dl);
    }
}

TEST_CASE("residuals round-trip arbitrary doubles within rounding")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 500.0);
    for (int n = 0; n < 10000; ++n) {
        LatencyBreakdown b{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        if (n % 10 == 0) {
            b.sl = 0.0;
        }
        const double il = total_il(b);
        CHECK(std::abs(sl_residual(il, b.idl, b.cl(), b.nl(), b.dl) - b.sl) <= 1e-9 * il);
    }
}

TEST_CASE("timeline and timestamp invariances")
{
    std::mt19937_64 rng(99);
    for (int n = 0; n < 1000; ++n) {
        InteractionTimeline tl;
        Micros t = static_cast<Micros>(rng() % 1'000'000);
        for (std::size_t i = 0; i < InteractionTimeline::kPoints; ++i) {
            t += static_cast<Micros>(rng() % 50'000);
            tl.set(i, t);
        }
        REQUIRE(tl.monotone());
        const Micros shift = static_cast<Micros>(rng() % 10'000'000) - 5'000'000;
        CHECK(il_from_timeline(tl.shifted(shift)) == il_from_timeline(tl));

        const double nl = dyadic(rng);
        auto moved = tl;
        moved.set(0, tl.at(0) - static_cast<Micros>(rng() % 1000));
        CHECK(sl_from_timestamps(moved, nl).value_ms == sl_from_timestamps(tl, nl).value_ms);
        moved.clear(0);
        CHECK(sl_from_timestamps(moved, nl).value_ms == sl_from_timestamps(tl, nl).value_ms);
    }
}

TEST_CASE("backlog grows by max(0, nl - sd) per interaction")
{
    std::mt19937_64 rng(3);
    for (int n = 0; n < 10000; ++n) {
        const double nl = dyadic(rng);
        const double sd = dyadic(rng);
        const std::size_t i = rng() % 1000;
        CHECK(synchronous_backlog_delay(nl, sd, i + 1) - synchronous_backlog_delay(nl, sd, i) ==
              std::max(0.0, nl - sd));
    }
}

TEST_CASE("round-trip NL splits evenly")
{
    const auto b = LatencyBreakdown::with_round_trip_nl(174);
    CHECK(b.nl_up == 87.0);
    CHECK(b.nl_down == 87.0);
    CHECK(b.nl() == 174.0);
}
