#include "doctest.h"

#include <cmath>

#include "spdelab/noise.hpp"
#include "spdelab/stats.hpp"

using namespace spdelab;

TEST_CASE("same seed and step reproduce the slice") {
    SeedSpec s{42, 7, 3};
    auto a = white_noise_slice(s, 11, 64);
    auto b = white_noise_slice(s, 11, 64);
    REQUIRE(a.values == b.values);
    auto c = white_noise_slice(s, 12, 64);
    CHECK(a.values != c.values);
}

TEST_CASE("draws are standard normal: mean and variance over 1e6") {
    // CLT: stderr(mean) = 1/sqrt(n), stderr(var) = sqrt(2/n)
    const std::size_t n = 1'000'000;
    SeedSpec s{2024, 0, 0};
    CounterRng rng(s);
    Accumulator acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(rng.normal(0, i));
    CHECK(std::fabs(acc.mean()) < 0.004);
    CHECK(std::fabs(acc.variance() - 1.0) < 0.005);
}

TEST_CASE("distinct stream tags decorrelate") {
    const std::size_t n = 100'000;
    SeedSpec s{5, 1, 0};
    CounterRng a(s), b(s.with_tag(1));
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += a.normal(0, i) * b.normal(0, i);
    CHECK(std::fabs(sum / n) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("replicate index changes the stream") {
    SeedSpec s{9, 0, 0};
    auto a = white_noise_slice(s, 0, 16);
    auto b = white_noise_slice(s.with_replicate(1), 0, 16);
    CHECK(a.values != b.values);
}

TEST_CASE("white-noise box integral has variance equal to the box area") {
    // sum of xi*sqrt(dt*dx) over an nt-by-nx box; Var = nt*nx*dt*dx
    const double dt = 1e-3, dx = 0.05;
    const int nt = 40, nx = 30;
    const double area = nt * nx * dt * dx;
    const std::size_t reps = 4000;
    Accumulator acc;
    for (std::size_t r = 0; r < reps; ++r) {
        CounterRng rng(SeedSpec{77, r, 0});
        double v = 0;
        for (int t = 0; t < nt; ++t)
            for (int i = 0; i < nx; ++i) v += rng.normal(t, i) * std::sqrt(dt * dx);
        acc.add(v);
    }
    const double tol = 3.0 * area * std::sqrt(2.0 / reps);
    CHECK(std::fabs(acc.variance() - area) < tol);
}

TEST_CASE("reflecting path stays nonnegative and local time grows only near zero") {
    auto p = reflecting_bm(SeedSpec{1, 2, 3}, 1e-3, 5000, 0.3);
    const double sq = std::sqrt(1e-3);
    for (std::size_t i = 1; i < p.values.size(); ++i) {
        REQUIRE(p.values[i] >= 0.0);
        REQUIRE(p.local_time[i] >= p.local_time[i - 1]);
        if (p.local_time[i] > p.local_time[i - 1]) REQUIRE(p.values[i] < sq);
    }
}

TEST_CASE("path from 5 never touches zero over [0,1]") {
    // reflection principle: P(min < 0) = 2*Phi(-5) ~ 5.7e-7
    for (std::uint64_t r = 0; r < 100; ++r) {
        auto p = reflecting_bm(SeedSpec{31, r, 0}, 1e-4, 10000, 5.0);
        CHECK(p.local_time.back() == 0.0);
    }
}

TEST_CASE("local time calibration: E[L_1] = sqrt(2/pi) from zero") {
    // E|B_1| = 0.79788; discrete estimator carries an O(sqrt(dt)) bias
    const std::size_t paths = 8000, steps = 10000;
    Accumulator acc;
    for (std::uint64_t r = 0; r < paths; ++r)
        acc.add(reflecting_bm(SeedSpec{314, r, 0}, 1e-4, steps, 0.0).local_time.back());
    const double target = std::sqrt(2.0 / M_PI);
    auto res = acc.result();
    CHECK(std::fabs(res.mean - target) < 3.0 * res.stderr_ + 0.01);
}

TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS(white_noise_slice(SeedSpec{}, 0, 0));
    CHECK_THROWS(reflecting_bm(SeedSpec{}, 0.0, 10, 0.0));
    CHECK_THROWS(reflecting_bm(SeedSpec{}, 1e-3, 10, -1.0));
}
