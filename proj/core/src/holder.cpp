#include "spdelab/holder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdelab {

double SampledFn::integral() const {
    if (values.size() < 2) return 0.0;
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * dx;
}

double ral_constant(double beta, double C) {
    if (!(HolderClass{beta, C}.valid()))
        throw std::invalid_argument("ral_constant: need beta in (0,1), C > 0");
    return std::min(1.0, std::pow(2.0 * C, -1.0 / beta));
}

namespace {

// Lags visited by the pair scan: everything up to max_lag when the full
// scan is affordable, otherwise 1..64 plus a geometric ladder; the lag
// at distance one is always included since rough-function suprema is
// not the only regime (the hat family peaks there).
std::vector<std::size_t> pair_lags(std::size_t n, double dx) {
    std::vector<std::size_t> lags;
    if (n < 2 || dx <= 0) return lags;
    std::size_t max_lag = n - 1;
    const double span1 = 1.0 / dx;
    if (span1 < static_cast<double>(max_lag)) max_lag = static_cast<std::size_t>(span1);
    if (max_lag == 0) max_lag = 1;
    if (n <= 2048) {
        for (std::size_t l = 1; l <= max_lag; ++l) lags.push_back(l);
        return lags;
    }
    for (std::size_t l = 1; l <= std::min<std::size_t>(64, max_lag); ++l) lags.push_back(l);
    for (std::size_t l = 96; l < max_lag; l = l + l / 2) lags.push_back(l);
    if (max_lag > 64) lags.push_back(max_lag);
    return lags;
}

}  // namespace

double holder_constant_estimate(std::span<const double> values, double dx, double beta) {
    if (!(beta > 0 && beta < 1))
        throw std::invalid_argument("holder_constant_estimate: beta in (0,1)");
    double best = 0.0;
    for (std::size_t l : pair_lags(values.size(), dx)) {
        const double w = std::pow(static_cast<double>(l) * dx, -beta);
        double m = 0.0;
        for (std::size_t i = 0; i + l < values.size(); ++i)
            m = std::max(m, std::fabs(values[i + l] - values[i]));
        best = std::max(best, m * w);
    }
    return best;
}

double holder_constant_estimate(const SampledFn& f, double beta) {
    return holder_constant_estimate(f.values, f.dx, beta);
}

double holder_pair_estimate(std::span<const double> f, std::span<const double> g,
                            double dx, double beta) {
    if (f.size() != g.size())
        throw std::invalid_argument("holder_pair_estimate: size mismatch");
    double best = 0.0;
    for (std::size_t l : pair_lags(f.size(), dx)) {
        const double w = std::pow(static_cast<double>(l) * dx, -beta);
        double m = 0.0;
        for (std::size_t i = 0; i + l < f.size(); ++i)
            m = std::max(m, std::fabs(f[i + l] - f[i]) + std::fabs(g[i + l] - g[i]));
        best = std::max(best, m * w);
    }
    return best;
}

RalCheck ral_check(const SampledFn& f, double alpha) {
    if (!f.certified || !f.certified->valid())
        throw std::invalid_argument("ral_check: f carries no valid Holder certificate");
    if (!(alpha > 0 && alpha < 1))
        throw std::invalid_argument("ral_check: alpha must lie in (0,1)");

    const double beta = f.certified->beta;
    const double K = ral_constant(beta, f.certified->C);

    SampledFn falpha;
    falpha.x0 = f.x0;
    falpha.dx = f.dx;
    falpha.values.resize(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        falpha.values[i] = std::pow(std::max(f.values[i], 0.0), alpha);

    RalCheck r;
    r.lhs = falpha.integral();
    const double mass = f.integral();
    r.rhs = K * std::pow(mass, (alpha * beta + 1.0) / (beta + 1.0));

    // Quadrature allowance proportional to the roughest adjacent-node
    // increment of f^alpha seen on the grid.
    double lip = 0.0;
    for (std::size_t i = 0; i + 1 < falpha.values.size(); ++i)
        lip = std::max(lip, std::fabs(falpha.values[i + 1] - falpha.values[i]) / f.dx);
    r.tol = std::min(1.0, 10.0 * f.dx * lip);
    r.holds = r.lhs >= r.rhs * (1.0 - r.tol);
    return r;
}

SampledFn generate_holder_fn(const SeedSpec& seed, const HolderClass& cls,
                             double support_halfwidth) {
    if (!cls.valid()) throw std::invalid_argument("generate_holder_fn: invalid class");
    if (!(support_halfwidth > 0))
        throw std::invalid_argument("generate_holder_fn: support_halfwidth must be > 0");

    const double W = support_halfwidth;
    const std::size_t n = 1025;
    const double dx = 2.0 * W / static_cast<double>(n - 1);

    const CounterRng rng(seed);
    constexpr int n_modes = 24;
    double amp[n_modes], phase[n_modes], freq[n_modes];
    for (int m = 0; m < n_modes; ++m) {
        // coefficient decay m^-(beta+0.55) keeps the beta-seminorm finite
        amp[m] = std::pow(static_cast<double>(m + 1), -(cls.beta + 0.55)) *
                 std::fabs(rng.normal(0, m));
        phase[m] = 2.0 * M_PI * rng.uniform(1, m);
        freq[m] = M_PI * static_cast<double>(m + 1) / W;
    }

    SampledFn f;
    f.x0 = -W;
    f.dx = dx;
    f.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = f.x0 + static_cast<double>(i) * dx;
        double s = 0.0;
        for (int m = 0; m < n_modes; ++m) s += amp[m] * std::cos(freq[m] * x + phase[m]);
        const double window = std::cos(0.5 * M_PI * x / W);
        f.values[i] = std::max(s, 0.0) * window * window;
    }
    f.values.front() = 0.0;
    f.values.back() = 0.0;

    double est = holder_constant_estimate(f, cls.beta);
    if (est <= 0) {
        // rectification wiped the sample; fall back to the bare window
        for (std::size_t i = 0; i < n; ++i) {
            const double x = f.x0 + static_cast<double>(i) * dx;
            const double window = std::cos(0.5 * M_PI * x / W);
            f.values[i] = window * window;
        }
        f.values.front() = 0.0;
        f.values.back() = 0.0;
        est = holder_constant_estimate(f, cls.beta);
    }
    const double scale = 0.98 * cls.C / est;
    for (double& v : f.values) v *= scale;

    f.certified = cls;
    return f;
}

SampledFn scale_reduce(const SampledFn& f) {
    if (!f.certified) throw std::invalid_argument("scale_reduce: uncertified input");
    const double mass = f.integral();
    if (!(mass > 0)) return f;
    const double beta = f.certified->beta;
    const double b = std::pow(mass, 1.0 / (beta + 1.0));
    SampledFn g;
    g.x0 = f.x0 / b;
    g.dx = f.dx / b;
    g.certified = f.certified;
    g.values.resize(f.values.size());
    const double v = std::pow(b, -beta);
    for (std::size_t i = 0; i < f.values.size(); ++i) g.values[i] = v * f.values[i];
    return g;
}

}  // namespace spdelab
