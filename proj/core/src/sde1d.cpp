#include "spdelab/sde1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "spdelab/heat.hpp"

namespace spdelab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ScaleFn::ScaleFn(double b, double q, double K) : b_(b), q_(q), K_(K) {
    if (!(b > 0)) throw std::invalid_argument("ScaleFn: b must be > 0");
    if (!(q > 0 && q < 0.5)) throw std::invalid_argument("ScaleFn: q must lie in (0,1/2)");
    if (!(K > 0)) throw std::invalid_argument("ScaleFn: K must be > 0");
    gamma_ = 1.0 - 2.0 * q;
    c_ = 2.0 * b / (K * gamma_);
    a_ = 1.0 / gamma_;
    if (a_ > 170.0)
        throw std::invalid_argument("ScaleFn: exponent too close to 1/2 for this evaluation");
    s_inf_ = std::exp(std::lgamma(a_) - std::log(gamma_) - a_ * std::log(c_));
    if (!(s_inf_ > 0) || !std::isfinite(s_inf_))
        throw std::invalid_argument("ScaleFn: parameters drive s(inf) out of double range");
}

double ScaleFn::eval(double x) const {
    if (x < 0) throw std::invalid_argument("ScaleFn::eval: x must be >= 0");
    if (x == 0) return 0.0;
    return s_inf_ * boost::math::gamma_p(a_, c_ * std::pow(x, gamma_));
}

double ScaleFn::deriv(double x) const {
    if (x < 0) throw std::invalid_argument("ScaleFn::deriv: x must be >= 0");
    return std::exp(-c_ * std::pow(x, gamma_));
}

double ScaleFn::inv(double y) const {
    if (y < 0 || y >= s_inf_)
        throw std::domain_error("ScaleFn::inv: argument outside [0, s(inf))");
    if (y == 0) return 0.0;
    const double t = boost::math::gamma_p_inv(a_, y / s_inf_);
    return std::pow(t / c_, a_);
}

double ScaleFn::ode_residual(double x) const {
    if (!(x > 0)) throw std::invalid_argument("ScaleFn::ode_residual: x must be > 0");
    const double h = 1e-5 * std::max(x, 0.5);
    const double spp = (deriv(x + h) - deriv(x - h)) / (2.0 * h);
    return std::fabs(0.5 * K_ * std::pow(x, 2.0 * q_) * spp + b_ * deriv(x));
}

double SpeedMeasure::density_in_scale(double y) const {
    const double w = scale_.inv(y);
    const double sp = scale_.deriv(w);
    return 1.0 / (scale_.K() * sp * sp * std::pow(w, 2.0 * scale_.q()));
}

double SpeedMeasure::ac_mass(double y1, double y2) const {
    if (y2 < y1) std::swap(y1, y2);
    const double w1 = scale_.inv(y1), w2 = scale_.inv(y2);
    return (1.0 / scale_.deriv(w2) - 1.0 / scale_.deriv(w1)) / (2.0 * scale_.b());
}

PathSummary simulate_sticky_exact(const SeedSpec& seed, const SpeedMeasure& m,
                                  double x0, double t_end, double dt,
                                  std::span<const double> levels,
                                  std::vector<std::pair<double, double>>* path_out,
                                  double path_dt) {
    if (x0 < 0) throw std::invalid_argument("simulate_sticky_exact: x0 must be >= 0");
    if (!(dt > 0) || !(t_end > 0))
        throw std::invalid_argument("simulate_sticky_exact: dt, t_end must be > 0");

    const ScaleFn& s = m.scale();
    const double s_inf = s.upper();
    const double sq = std::sqrt(dt);
    const double dl = local_time_rate() * sq;
    const double h = sq;  // occupation bin width in natural scale
    const double b = s.b();
    const double y_cap = s_inf * (1.0 - 1e-12);

    PathSummary out;
    out.levels.assign(levels.begin(), levels.end());
    out.hit_times.assign(levels.size(), kNaN);
    std::vector<double> level_scale(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i)
        level_scale[i] = levels[i] > 0 ? s.eval(levels[i]) : 0.0;

    // per-bin clock rate (a.c. speed mass of the bin / width), lazily filled
    std::vector<double> bin_rate;
    auto rate_for = [&](double y) -> double {
        if (y >= y_cap) return 1e30;
        const auto idx = static_cast<std::size_t>(y / h);
        if (idx >= bin_rate.size()) bin_rate.resize(idx + 1, -1.0);
        if (bin_rate[idx] < 0) {
            const double y1 = h * static_cast<double>(idx);
            const double y2 = std::min(y1 + h, y_cap);
            bin_rate[idx] = m.ac_mass(y1, y2) / h;
        }
        return bin_rate[idx];
    };

    const CounterRng rng(seed);
    double y = std::min(s.eval(x0), y_cap);
    double clock = 0.0;   // X-time
    double lt = 0.0;      // driver local time at 0
    double occ0 = 0.0;    // X-time spent at zero (atom contribution)
    double u = 0.0;       // driver time
    std::size_t next_out = 0;

    std::uint64_t step = 0;
    while (clock < t_end) {
        const double y_prev = y;
        const double raw = y + sq * rng.normal(step, 0);
        y = std::fabs(raw);
        u += dt;
        ++step;

        double dA = dt * rate_for(y);
        if (y < h) {
            lt += dl;
            dA += dl / b;
            occ0 += dl / b;
        }
        const double clock_prev = clock;
        clock += dA;

        // level hits on the X clock (first crossing, driver-exact)
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (!std::isnan(out.hit_times[i])) continue;
            const bool hit = levels[i] > 0 ? y >= level_scale[i] : raw <= 0.0;
            if (hit) out.hit_times[i] = std::min(clock, t_end);
        }

        if (path_out && path_dt > 0) {
            while (true) {
                const double t_next = static_cast<double>(next_out) * path_dt;
                if (t_next > clock || t_next > t_end) break;
                // position at the requested clock time: linear in driver time
                const double frac = dA > 0 ? std::clamp((t_next - clock_prev) / dA, 0.0, 1.0) : 1.0;
                const double yy = std::min(y_prev + frac * (y - y_prev), y_cap);
                path_out->emplace_back(t_next, s.inv(std::max(yy, 0.0)));
                ++next_out;
            }
        }
        if (step > (std::uint64_t(1) << 40))
            throw std::runtime_error("simulate_sticky_exact: step budget exhausted");
    }

    // the last step may overshoot the horizon by one clock increment;
    // occupation and local time keep their exact pairing
    out.elapsed = clock;
    out.final_value = s.inv(std::clamp(y, 0.0, y_cap));
    out.occupation_time_at_zero = occ0;
    out.local_time_driver = lt;
    return out;
}

PathSummary simulate_sde_euler(const SeedSpec& seed, double b, double p,
                               double x0, double t_end, double dt,
                               std::span<const double> levels) {
    if (!(p > 0 && p < 0.5)) throw std::invalid_argument("simulate_sde_euler: p in (0,1/2)");
    if (x0 < 0 || !(dt > 0) || !(t_end > 0))
        throw std::invalid_argument("simulate_sde_euler: bad parameters");

    const CounterRng rng(seed);
    const PowFn pw(p);
    const double sq = std::sqrt(dt);
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));

    PathSummary out;
    out.levels.assign(levels.begin(), levels.end());
    out.hit_times.assign(levels.size(), kNaN);

    double x = x0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double g = x + b * dt + pw(x) * sq * rng.normal(i, 0);
        if (g < 0) {
            x = 0.0;
            ++out.clip_events;
        } else {
            x = g;
        }
        const double t = static_cast<double>(i + 1) * dt;
        if (x == 0.0) out.occupation_time_at_zero += dt;
        for (std::size_t k = 0; k < levels.size(); ++k) {
            if (!std::isnan(out.hit_times[k])) continue;
            const bool hit = levels[k] > 0 ? x >= levels[k] : g <= 0.0;
            if (hit) out.hit_times[k] = t;
        }
    }
    out.elapsed = t_end;
    out.final_value = x;
    return out;
}

namespace {
// One absorption time of dY = |Y|^q dB from y0 with the scale-covariant
// adaptive step; capped at t_cap.
double girsanov_absorption_time(const CounterRng& rng, std::uint64_t path_index,
                                double q, double y0, double t_cap) {
    const PowFn pw(q);
    const double scale = std::pow(y0, 2.0 * (1.0 - q));
    const double h0 = 5e-3;
    const double dt_lo = h0 * scale * 1e-4;
    const double dt_hi = h0 * scale * 1e6;
    double y = y0, t = 0.0;
    std::uint64_t k = 0;
    while (t < t_cap) {
        const double dt = std::clamp(h0 * std::pow(y, 2.0 * (1.0 - q)), dt_lo, dt_hi);
        y += pw(y) * std::sqrt(dt) * rng.normal(path_index, k++);
        t += dt;
        if (y <= 0.0) return t;
    }
    return t_cap;
}
}  // namespace

SurvivalCurve girsanov_survival(const SeedSpec& seed, double q, double y0,
                                std::span<const double> horizons,
                                std::size_t n_paths) {
    if (!(q > 0 && q < 0.5)) throw std::invalid_argument("girsanov_survival: q in (0,1/2)");
    if (!(y0 > 0)) throw std::invalid_argument("girsanov_survival: y0 must be > 0");
    if (horizons.empty() || n_paths == 0)
        throw std::invalid_argument("girsanov_survival: empty request");

    const double t_cap = *std::max_element(horizons.begin(), horizons.end());
    const CounterRng rng(seed);
    std::vector<std::size_t> alive(horizons.size(), 0);
    for (std::size_t i = 0; i < n_paths; ++i) {
        const double t0 = girsanov_absorption_time(rng, i, q, y0, t_cap * 1.0000001);
        for (std::size_t j = 0; j < horizons.size(); ++j)
            if (t0 > horizons[j]) ++alive[j];
    }

    SurvivalCurve c;
    c.horizons.assign(horizons.begin(), horizons.end());
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < horizons.size(); ++j) {
        const double n = static_cast<double>(n_paths);
        const double phat = static_cast<double>(alive[j]) / n;
        MCResult r;
        r.n = n_paths;
        r.mean = phat;
        r.stderr_ = std::sqrt(std::max(phat * (1 - phat), 0.0) / n);
        r.ci_lo = r.mean - 1.959963984540054 * r.stderr_;
        r.ci_hi = r.mean + 1.959963984540054 * r.stderr_;
        c.survival.push_back(r);
        if (phat > 0) pts.emplace_back(horizons[j], phat);
    }
    if (pts.size() >= 2) c.slope = loglog_slope(pts);
    return c;
}

std::vector<double> girsanov_passage_times(const SeedSpec& seed, double q,
                                           double y0, std::size_t n_paths,
                                           double t_cap) {
    if (!(q > 0 && q < 0.5) || !(y0 > 0) || !(t_cap > 0) || n_paths == 0)
        throw std::invalid_argument("girsanov_passage_times: bad parameters");
    const CounterRng rng(seed);
    std::vector<double> out(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i)
        out[i] = girsanov_absorption_time(rng, i, q, y0, t_cap);
    return out;
}

TimeChange time_change_tau(std::span<const double> mass_path,
                           std::span<const double> qv_rates, double dt,
                           double K, double p_prime,
                           std::span<const std::uint8_t> holder_ok) {
    if (mass_path.size() != qv_rates.size() + 1)
        throw std::invalid_argument("time_change_tau: mass_path must have one more sample than qv_rates");
    if (!holder_ok.empty() && holder_ok.size() != qv_rates.size())
        throw std::invalid_argument("time_change_tau: mask size mismatch");
    if (!(K > 0) || !(p_prime > 0 && p_prime < 0.5) || !(dt > 0))
        throw std::invalid_argument("time_change_tau: bad parameters");

    const std::size_t n = qv_rates.size();
    TimeChange tc;
    tc.clock.resize(n + 1);
    tc.tau_prime.resize(n);
    tc.clock[0] = 0.0;
    const PowFn pw(2.0 * p_prime);
    for (std::size_t i = 0; i < n; ++i) {
        const double M = mass_path[i];
        const bool ok = holder_ok.empty() || holder_ok[i];
        // flat-piece convention: unit rate at zero mass or past the gate
        double R = 1.0;
        if (M > 0 && ok) R = qv_rates[i] / (K * pw(M));
        tc.clock[i + 1] = tc.clock[i] + dt * R;
        tc.tau_prime[i] = 1.0 / R;
        tc.max_tau_prime = std::max(tc.max_tau_prime, tc.tau_prime[i]);
    }

    // resample the mass path on a uniform grid of the new clock
    const double total = tc.clock[n];
    std::size_t j = 0;
    for (double t = 0.0; t <= total + 1e-15; t += dt) {
        while (j + 1 < tc.clock.size() && tc.clock[j + 1] < t) ++j;
        if (j + 1 >= mass_path.size()) {
            tc.mass_on_tau.push_back(mass_path.back());
            break;
        }
        const double span = tc.clock[j + 1] - tc.clock[j];
        const double w = span > 0 ? std::clamp((t - tc.clock[j]) / span, 0.0, 1.0) : 0.0;
        tc.mass_on_tau.push_back(mass_path[j] + w * (mass_path[j + 1] - mass_path[j]));
    }
    return tc;
}

}  // namespace spdelab
