#include "spdelab/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace spdelab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

inline void box_muller(double u1, double u2, double& z0, double& z1) {
    const double r = std::sqrt(-2.0 * std::log(u1));
    z0 = r * std::cos(kTwoPi * u2);
    z1 = r * std::sin(kTwoPi * u2);
}
}  // namespace

double CounterRng::normal(std::uint64_t step, std::uint64_t counter) const {
    const std::uint64_t base = 2 * counter;
    double z0, z1;
    box_muller(uniform(step, base), uniform(step, base + 1), z0, z1);
    return z0;
}

void CounterRng::normal_fill(std::uint64_t step, double* out, std::size_t n) const {
    std::size_t i = 0;
    for (; i + 1 < n; i += 2) {
        box_muller(uniform(step, i), uniform(step, i + 1), out[i], out[i + 1]);
    }
    if (i < n) {
        double z0, z1;
        box_muller(uniform(step, i), uniform(step, i + 1), z0, z1);
        out[i] = z0;
    }
}

NoiseSlice white_noise_slice(const SeedSpec& seed, std::uint64_t step_index,
                             std::size_t n_cells) {
    if (n_cells == 0) throw std::invalid_argument("white_noise_slice: n_cells must be >= 1");
    NoiseSlice s;
    s.values.resize(n_cells);
    CounterRng(seed).normal_fill(step_index, s.values.data(), n_cells);
    return s;
}

ReflectedPath reflecting_bm(const SeedSpec& seed, double dt,
                            std::size_t n_steps, double x0) {
    if (!(dt > 0)) throw std::invalid_argument("reflecting_bm: dt must be > 0");
    if (x0 < 0) throw std::invalid_argument("reflecting_bm: x0 must be >= 0");

    const CounterRng rng(seed);
    const double sq = std::sqrt(dt);
    const double dl = local_time_rate() * sq;

    ReflectedPath p;
    p.times.resize(n_steps + 1);
    p.values.resize(n_steps + 1);
    p.local_time.resize(n_steps + 1);
    p.times[0] = 0.0;
    p.values[0] = x0;
    p.local_time[0] = 0.0;

    double r = x0, lt = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        r = std::fabs(r + sq * rng.normal(i, 0));
        if (r < sq) lt += dl;
        p.times[i + 1] = static_cast<double>(i + 1) * dt;
        p.values[i + 1] = r;
        p.local_time[i + 1] = lt;
    }
    return p;
}

}  // namespace spdelab
