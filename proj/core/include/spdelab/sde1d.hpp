#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spdelab/noise.hpp"
#include "spdelab/stats.hpp"

namespace spdelab {

// Scale function of the diffusion dX = b dt + sqrt(K) X^q dB on [0,inf):
//   s(x) = int_0^x exp(-2b y^(1-2q) / (K(1-2q))) dy,
// evaluated exactly through the regularized lower incomplete gamma
// (substituting u = y^(1-2q)); s(0)=0, s'(0)=1, s is strictly
// increasing and bounded, and solves (K x^(2q)/2) s'' + b s' = 0.
class ScaleFn {
  public:
    ScaleFn(double b, double q, double K = 1.0);

    double b() const { return b_; }
    double q() const { return q_; }
    double K() const { return K_; }
    double gamma() const { return gamma_; }

    double eval(double x) const;
    double deriv(double x) const;       // exp(-c x^gamma)
    double inv(double y) const;         // domain [0, upper())
    double upper() const { return s_inf_; }
    // |(K x^(2q)/2) s''(x) + b s'(x)| with s'' from central differences
    // of the analytic s'.
    double ode_residual(double x) const;

  private:
    double b_, q_, K_, gamma_, c_, a_, s_inf_;
};

// Speed measure of the same diffusion: absolutely continuous part in
// natural scale plus an atom of mass 1/b at zero.  The a.c. part has
// the closed-form cumulative (1/2b)(1/s'(w2) - 1/s'(w1)), w = s^{-1}.
class SpeedMeasure {
  public:
    explicit SpeedMeasure(ScaleFn s) : scale_(std::move(s)) {}
    const ScaleFn& scale() const { return scale_; }
    double atom_at_zero() const { return 1.0 / scale_.b(); }
    double density_in_scale(double y) const;
    double ac_mass(double y1, double y2) const;

  private:
    ScaleFn scale_;
};

struct PathSummary {
    double elapsed = 0.0;
    double final_value = 0.0;
    std::vector<double> levels;
    std::vector<double> hit_times;  // NaN where the level was not reached
    double occupation_time_at_zero = 0.0;
    double local_time_driver = 0.0;  // time-change simulator only
    std::size_t clip_events = 0;     // Euler simulator only
};

// Exact-in-construction simulator: a reflecting driver Brownian path R
// from s(x0) with discrete local time, the additive clock
// A(u) = int L^R(u,y) m(dy) accumulated from binned occupation plus the
// atom's b^{-1} L^R(u,0), and X(t) = s^{-1}(R(A^{-1}(t))).  The clock
// advances at zero only through the atom, so
// b * occupation_time_at_zero == local_time_driver holds identically.
PathSummary simulate_sticky_exact(const SeedSpec& seed, const SpeedMeasure& m,
                                  double x0, double t_end, double dt,
                                  std::span<const double> levels = {},
                                  std::vector<std::pair<double, double>>* path_out = nullptr,
                                  double path_dt = 0.0);

// Clipped Euler scheme for dX = b dt + X^p dB, X >= 0.  Clip events
// (overshoots into the negative half-line) are counted, not hidden:
// they are the discrete trace of the sticky boundary.
PathSummary simulate_sde_euler(const SeedSpec& seed, double b, double p,
                               double x0, double t_end, double dt,
                               std::span<const double> levels = {});

struct SurvivalCurve {
    std::vector<double> horizons;
    std::vector<MCResult> survival;  // Wilson-free plain proportions with stderr
    SlopeFit slope;                  // log survival vs log horizon
};

// Driftless diffusion dY = |Y|^q dB absorbed at zero, started above
// zero; returns per-horizon survival estimates on common paths and the
// log-log regression slope.  Steps adapt to the diffusive scale
// Y^(2(1-q)) with bounds proportional to y0^(2(1-q)), so the scheme is
// exactly covariant under the diffusion's self-similarity.
SurvivalCurve girsanov_survival(const SeedSpec& seed, double q, double y0,
                                std::span<const double> horizons,
                                std::size_t n_paths);

// Absorption times min(T0, t_cap) for the same scheme.
std::vector<double> girsanov_passage_times(const SeedSpec& seed, double q,
                                           double y0, std::size_t n_paths,
                                           double t_cap);

struct TimeChange {
    std::vector<double> clock;      // A at step boundaries, clock[0] = 0
    std::vector<double> tau_prime;  // per step, = 1/R
    double max_tau_prime = 0.0;
    std::vector<double> mass_on_tau;  // mass resampled on the tau clock
};

// Discrete time change from the realized quadratic-variation rates of a
// mass path: A'(u) = qv(u) / (K * M(u)^(2 p')), with unit rate while
// the mass is zero or the Holder gate is off (flat pieces).  tau = A^{-1}
// satisfies tau' = 1/A' <= 1 whenever the integral lower bound holds.
TimeChange time_change_tau(std::span<const double> mass_path,
                           std::span<const double> qv_rates, double dt,
                           double K, double p_prime,
                           std::span<const std::uint8_t> holder_ok = {});

}  // namespace spdelab
