#include "spdelab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdelab {

namespace {
constexpr double kGaussRho = 0.25;   // below this, censoring is a no-op
constexpr double kTwoPointRho = 1e6; // above this, use the two-point law

double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }
double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) * 0.3989422804014326779;
}

// Moments of max(z + Z, 0), Z standard normal:
//   h1 = E, h2 = E of the square.
double h1(double z) { return z * norm_cdf(z) + norm_pdf(z); }
double h2(double z) { return (z * z + 1.0) * norm_cdf(z) + z * norm_pdf(z); }
double var_over_mean_sq(double z) {
    const double a = h1(z);
    return (h2(z) - a * a) / (a * a);
}
}  // namespace

GridSpec GridSpec::with_ratio(double halfwidth, int n_cells, double ratio) {
    if (!(halfwidth > 0) || n_cells < 2)
        throw std::invalid_argument("GridSpec: need halfwidth > 0 and n_cells >= 2");
    if (!(ratio > 0) || ratio > 0.5)
        throw std::invalid_argument("GridSpec: stability needs dt/dx^2 <= 1/2");
    GridSpec g{halfwidth, n_cells, 0.0};
    g.dt = ratio * g.dx() * g.dx();
    return g;
}

GridSpec GridSpec::with_horizon(double halfwidth, int n_cells, double t_end,
                                double ratio) {
    GridSpec g = with_ratio(halfwidth, n_cells, ratio);
    if (!(t_end > 0)) throw std::invalid_argument("GridSpec: t_end must be > 0");
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / g.dt - 1e-12));
    g.dt = t_end / static_cast<double>(steps);
    return g;
}

std::size_t GridSpec::steps_for(double t_end) const {
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

double mass(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.grid.dx();
}

double qv_rate(const Field& f, double p) {
    const PowFn pw(2.0 * p);
    double s = 0.0;
    for (double v : f.values) s += pw(v);
    return s * f.grid.dx();
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::fabs(v));
    return m;
}

double boundary_tail_max(const Field& f, double fraction) {
    const auto n = f.values.size();
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * n));
    double m = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        m = std::max(m, std::fabs(f.values[i]));
        m = std::max(m, std::fabs(f.values[n - 1 - i]));
    }
    return m;
}

SourceFn SourceFn::bump(const GridSpec& g, double b_target) {
    if (!(b_target > 0)) throw std::invalid_argument("SourceFn: b must be > 0");
    SourceFn s;
    s.sampled.resize(g.n_cells, 0.0);
    double sum = 0.0;
    for (int i = 0; i < g.n_cells; ++i) {
        const double x = g.cell_center(i);
        if (std::fabs(x) < 1.0) {
            s.sampled[i] = std::exp(-1.0 / (1.0 - x * x));
            sum += s.sampled[i];
        }
    }
    if (sum <= 0)
        throw std::invalid_argument("SourceFn: grid does not resolve the bump support");
    const double c = b_target / (sum * g.dx());
    for (auto& v : s.sampled) v *= c;
    s.b = b_target;
    s.sup_psi = c * std::exp(-1.0);
    // sup |psi'| from the analytic derivative on a fine grid
    double dmax = 0.0;
    for (int i = 1; i < 100000; ++i) {
        const double x = -1.0 + 2e-5 * i;
        const double om = 1.0 - x * x;
        if (om <= 0) continue;
        dmax = std::max(dmax, std::fabs(c * std::exp(-1.0 / om) * 2.0 * x / (om * om)));
    }
    s.sup_dpsi = dmax;
    return s;
}

PowFn::PowFn(double p) : p_(p) {
    if (!(p >= 0)) throw std::invalid_argument("PowFn: exponent must be >= 0");
    const double eps = 1e-12;
    if (std::fabs(p - 0.5) < eps) kind_ = Kind::Half;
    else if (std::fabs(p - 0.25) < eps) kind_ = Kind::Quarter;
    else if (std::fabs(p - 0.75) < eps) kind_ = Kind::ThreeQuarters;
    else if (std::fabs(p - 1.0) < eps) kind_ = Kind::One;
    else kind_ = Kind::Generic;
}

namespace {
void check_stability(const GridSpec& g, double dt) {
    if (!(dt > 0) || dt / (g.dx() * g.dx()) > 0.5 + 1e-12)
        throw std::invalid_argument("heat_step: dt/dx^2 must be <= 1/2");
}

// mu_i = (1-r) f_i + (r/2)(f_{i+1} + f_{i-1}) + dt*scale*psi_i, the
// deterministic part of the step; nonnegative whenever f is.
void deterministic_part(const Field& f, double dt, const SourceFn* src,
                        double src_scale, std::vector<double>& out) {
    const int n = f.grid.n_cells;
    const double r = dt / (f.grid.dx() * f.grid.dx());
    out.resize(n);
    const auto& v = f.values;
    for (int i = 0; i < n; ++i) {
        const double left = i > 0 ? v[i - 1] : 0.0;
        const double right = i + 1 < n ? v[i + 1] : 0.0;
        out[i] = (1.0 - r) * v[i] + 0.5 * r * (left + right);
    }
    if (src && src_scale != 0.0) {
        for (int i = 0; i < n; ++i) out[i] += dt * src_scale * src->sampled[i];
    }
}
}  // namespace

Field heat_step(const Field& f) { return heat_step(f, f.grid.dt); }

Field heat_step(const Field& f, double dt) {
    check_stability(f.grid, dt);
    Field out{f.grid, {}};
    deterministic_part(f, dt, nullptr, 0.0, out.values);
    return out;
}

Field ramp_field(const SourceFn& src, double tau, const GridSpec& g) {
    if (tau < 0) throw std::invalid_argument("ramp_field: tau must be >= 0");
    Field f = Field::zero(g);
    if (tau == 0) return f;
    const auto full = static_cast<std::size_t>(std::floor(tau / g.dt + 1e-12));
    const double rest = tau - static_cast<double>(full) * g.dt;
    std::vector<double> tmp;
    for (std::size_t k = 0; k < full; ++k) {
        deterministic_part(f, g.dt, &src, 2.0, tmp);
        f.values.swap(tmp);
    }
    if (rest > 1e-15) {
        deterministic_part(f, rest, &src, 2.0, tmp);
        f.values.swap(tmp);
    }
    return f;
}

const CensoredStep& CensoredStep::instance() {
    static const CensoredStep table;
    return table;
}

CensoredStep::CensoredStep() {
    // Tabulate z(rho) by bisection on Var/E^2 = rho^2, then store the
    // unit-mean shift m = z/h1(z) and scale s = 1/h1(z).
    const int n = 4096;
    lo_ = std::log(kGaussRho * 0.5);
    hi_ = std::log(kTwoPointRho * 2.0);
    inv_step_ = (n - 1) / (hi_ - lo_);
    log_rho_.resize(n);
    m_.resize(n);
    s_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double lr = lo_ + (hi_ - lo_) * i / (n - 1);
        const double target = std::exp(2.0 * lr);
        double a = -38.0, b = 40.0;  // var_over_mean_sq is decreasing in z
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (var_over_mean_sq(mid) > target) a = mid;
            else b = mid;
        }
        const double z = 0.5 * (a + b);
        const double inv = 1.0 / h1(z);
        log_rho_[i] = lr;
        m_[i] = z * inv;
        s_[i] = inv;
    }
}

void CensoredStep::params(double rho, double& m_over_mu, double& s_over_mu) const {
    const double lr = std::log(rho);
    double t = (lr - lo_) * inv_step_;
    t = std::clamp(t, 0.0, static_cast<double>(log_rho_.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(t), log_rho_.size() - 2);
    const double w = t - static_cast<double>(i);
    m_over_mu = m_[i] + w * (m_[i + 1] - m_[i]);
    s_over_mu = s_[i] + w * (s_[i + 1] - s_[i]);
}

double CensoredStep::sample(double mu, double sd, double xi) const {
    if (!(mu > 0)) return 0.0;
    if (!(sd > 0)) return mu;
    const double rho = sd / mu;
    if (rho <= kGaussRho) return std::max(mu + sd * xi, 0.0);
    if (rho >= kTwoPointRho) {
        // mean/variance-exact two-point law {0, a}
        const double r2 = rho * rho;
        const double pi_up = 1.0 / (1.0 + r2);
        return norm_cdf(xi) > 1.0 - pi_up ? mu * (1.0 + r2) : 0.0;
    }
    double m, s;
    params(rho, m, s);
    return std::max(mu * (m + s * xi), 0.0);
}

Field spde_step(const Field& f, const SourceFn* src, double src_scale,
                const PowFn& sigma_pow, const NoiseSlice& noise,
                SpdeStepStats* stats) {
    const int n = f.grid.n_cells;
    if (noise.values.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("spde_step: noise slice size mismatch");
    if (src_scale != 0.0 && src == nullptr)
        throw std::invalid_argument("spde_step: source required when src_scale != 0");
    for (double v : f.values)
        if (v < 0) throw std::invalid_argument("spde_step: negative input field");
    check_stability(f.grid, f.grid.dt);

    Field out{f.grid, {}};
    deterministic_part(f, f.grid.dt, src, src_scale, out.values);

    const double amp = std::sqrt(f.grid.dt / f.grid.dx());
    const CensoredStep& cs = CensoredStep::instance();
    for (int i = 0; i < n; ++i) {
        const double sd = amp * sigma_pow(f.values[i]);
        const double mu = out.values[i];
        if (stats && mu > 0 && sd > 0) {
            const double rho = sd / mu;
            if (rho <= kGaussRho) ++stats->gauss_cells;
            else if (rho >= kTwoPointRho) ++stats->twopoint_cells;
            else ++stats->censored_cells;
        }
        out.values[i] = cs.sample(mu, sd, noise.values[i]);
    }
    return out;
}

double zero_mass_threshold(const GridSpec& g) {
    return 10.0 * std::sqrt(g.dt * g.dx());
}

}  // namespace spdelab
