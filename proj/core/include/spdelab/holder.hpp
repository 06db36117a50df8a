#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spdelab/noise.hpp"

namespace spdelab {

// Holder class: |f(x)-f(y)| <= C|x-y|^beta with beta in (0,1), C > 0.
struct HolderClass {
    double beta;
    double C;
    bool valid() const { return beta > 0 && beta < 1 && C > 0; }
};

// Nonnegative function sampled on the uniform node grid x0 + i*dx.
struct SampledFn {
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> values;
    std::optional<HolderClass> certified;

    double integral() const;  // composite trapezoid
};

// Explicit constant for the integral lower bound
//   integral(f^alpha) >= K(beta,C) * integral(f)^((alpha*beta+1)/(beta+1)).
// K(beta,C) = min(1, (2C)^(-1/beta)): either sup f < 1 and the f-integral
// itself is the bound, or f >= 1/2 on an interval of half-length
// (2C)^(-1/beta) around a near-maximizer.
double ral_constant(double beta, double C);

struct RalCheck {
    double lhs = 0.0;        // trapezoid of f^alpha
    double rhs = 0.0;        // K * trapezoid(f)^((alpha*beta+1)/(beta+1))
    double tol = 0.0;        // relative quadrature allowance
    bool holds = false;
};

// Checks the integral inequality for a certified function.  Throws if f
// carries no certificate or alpha is outside (0,1).
RalCheck ral_check(const SampledFn& f, double alpha);

// Largest difference quotient |f(x)-f(x')|/|x-x'|^beta over a
// deterministic pair schedule: every lag with |x-x'| <= 1 when the grid
// is small, lags 1..64 plus a coarse geometric ladder (and the maximal
// lag at distance 1) otherwise.
double holder_constant_estimate(const SampledFn& f, double beta);
double holder_constant_estimate(std::span<const double> values, double dx, double beta);

// Same schedule applied to |f(x)-f(x')| + |g(x)-g(x')| for a pair of
// fields sharing one grid.
double holder_pair_estimate(std::span<const double> f, std::span<const double> g,
                            double dx, double beta);

// Seeded generator of certified nonnegative compactly supported test
// functions: a random cosine sum with decaying coefficients, rectified
// at 0, windowed to [-W, W] and rescaled until the pair-scan constant
// sits just inside the class.
SampledFn generate_holder_fn(const SeedSpec& seed, const HolderClass& cls,
                             double support_halfwidth);

// The mass-normalizing rescaling g(x) = b^(-beta) f(bx) with
// b = integral(f)^(1/(beta+1)); g has unit integral and the same class.
// A zero function is returned unchanged.
SampledFn scale_reduce(const SampledFn& f);

}  // namespace spdelab
