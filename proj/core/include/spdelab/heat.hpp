#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "spdelab/noise.hpp"

namespace spdelab {

// Uniform cell-centered grid on [-L, L] with an explicit time step.
// The scheme needs dt/dx^2 <= 1/2; runs default to 1/4.
struct GridSpec {
    double halfwidth = 10.0;
    int n_cells = 512;
    double dt = 0.0;

    double dx() const { return 2.0 * halfwidth / n_cells; }
    double stability_ratio() const { return dt / (dx() * dx()); }
    double cell_center(int i) const { return -halfwidth + (i + 0.5) * dx(); }

    // dt = ratio*dx^2 exactly (open-ended stepping).
    static GridSpec with_ratio(double halfwidth, int n_cells, double ratio = 0.25);
    // Largest dt <= ratio*dx^2 dividing the horizon into whole steps.
    static GridSpec with_horizon(double halfwidth, int n_cells, double t_end,
                                 double ratio = 0.25);
    std::size_t steps_for(double t_end) const;
};

// Nonnegative field on a grid; X(t, .) at one time.
struct Field {
    GridSpec grid;
    std::vector<double> values;

    static Field zero(const GridSpec& g) { return {g, std::vector<double>(g.n_cells, 0.0)}; }
};

double mass(const Field& f);                        // dx * sum
double qv_rate(const Field& f, double p);           // dx * sum f^(2p)
double sup_norm(const Field& f);
// Largest value among the outermost `fraction` of cells on each side;
// decay diagnostic for the rapidly-decreasing state space.
double boundary_tail_max(const Field& f, double fraction = 0.05);

// Immigration source: smooth bump c*exp(-1/(1-x^2)) on |x|<1, scaled so
// the grid quadrature of psi equals the target b exactly (which keeps
// the discrete mass identity E<X_t,1> = b t exact).
struct SourceFn {
    double b = 0.0;
    double sup_psi = 0.0;
    double sup_dpsi = 0.0;
    std::vector<double> sampled;  // psi at the grid cell centers

    static SourceFn bump(const GridSpec& g, double b_target);
};

// x^p for the exponents this code actually meets; sqrt chains where
// possible since pow dominates the step cost otherwise.
class PowFn {
  public:
    explicit PowFn(double p);
    double operator()(double x) const {
        switch (kind_) {
            case Kind::Half: return std::sqrt(x);
            case Kind::Quarter: return std::sqrt(std::sqrt(x));
            case Kind::ThreeQuarters: {
                const double r = std::sqrt(x);
                return r * std::sqrt(r);
            }
            case Kind::One: return x;
            default: return std::pow(x, p_);
        }
    }
    double exponent() const { return p_; }

  private:
    enum class Kind { Half, Quarter, ThreeQuarters, One, Generic };
    Kind kind_;
    double p_;
};

// One explicit heat half-Laplacian step with zero Dirichlet ends.
// Mass can only decrease, and only through the boundary.
Field heat_step(const Field& f);
Field heat_step(const Field& f, double dt);

// 2*int_0^tau P_s psi ds, built by stepping the heat dynamics with
// source 2*psi; total mass is 2*b*tau exactly up to boundary leakage.
Field ramp_field(const SourceFn& src, double tau, const GridSpec& g);

// Moment-matched nonnegative update: given a target mean mu >= 0 and
// standard deviation sd, draws max(m + s*xi, 0) with (m, s) chosen so
// the censored variable has mean mu and variance sd^2 exactly.  For
// sd <= mu/4 censoring is negligible and (m, s) = (mu, sd), i.e. the
// plain Gaussian Euler update.  A naive clipped update instead pumps
// spurious mass out of near-zero cells at any affordable resolution.
class CensoredStep {
  public:
    static const CensoredStep& instance();
    // Shift/scale pair for unit mean; multiply both by mu.
    void params(double rho, double& m_over_mu, double& s_over_mu) const;
    double sample(double mu, double sd, double xi) const;

  private:
    CensoredStep();
    std::vector<double> log_rho_, m_, s_;
    double lo_, hi_, inv_step_;
};

struct SpdeStepStats {
    std::size_t gauss_cells = 0;
    std::size_t censored_cells = 0;
    std::size_t twopoint_cells = 0;
};

// One explicit Euler step of
//   dX = (1/2) X_xx dt + src_scale * psi dt + X^p dW,
// noise scaled by sqrt(dt/dx) per cell; nonnegativity via the censored
// moment-matched update.  src may be null when src_scale == 0.
Field spde_step(const Field& f, const SourceFn* src, double src_scale,
                const PowFn& sigma_pow, const NoiseSlice& noise,
                SpdeStepStats* stats = nullptr);

// Mass threshold below which a discrete path is declared extinct,
// 10*sqrt(dt*dx) (one noise increment's scale).
double zero_mass_threshold(const GridSpec& g);

}  // namespace spdelab
