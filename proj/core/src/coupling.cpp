#include "spdelab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spdelab/holder.hpp"

namespace spdelab {

CoupledState CoupledState::start(const GridSpec& g, const SourceFn& src,
                                 double eps, double p) {
    if (!(eps > 0)) throw std::invalid_argument("CoupledState: eps must be > 0");
    if (!(p > 0 && p < 0.5)) throw std::invalid_argument("CoupledState: p in (0,1/2)");
    CoupledState s;
    s.grid = g;
    s.src = src;
    s.eps = eps;
    s.p = p;
    s.X = Field::zero(g);
    s.Y = Field::zero(g);
    s.phase = Phase::Ramp;
    s.owner = Role::X;
    s.excursion_index = 0;
    s.t = 0.0;
    s.t_start = 0.0;
    s.t_ramp_end = eps;
    return s;
}

namespace {
void ramp_advance(Field& f, const SourceFn& src, double dt) {
    Field g = heat_step(f, dt);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        g.values[i] += dt * 2.0 * src.sampled[i];
    f = std::move(g);
}
}  // namespace

void couple_step(CoupledState& s, const NoiseSlice* noise, CoupleStepDiag* diag) {
    CoupleStepDiag local;
    CoupleStepDiag& d = diag ? *diag : local;
    d = CoupleStepDiag{};

    if (s.phase == Phase::Ramp) {
        const double remaining = s.t_ramp_end - s.t;
        const double dt = std::min(s.grid.dt, remaining);
        Field& f = s.owner == Role::X ? s.X : s.Y;
        ramp_advance(f, s.src, dt);
        const double sign = s.excursion_index % 2 == 0 ? 1.0 : -1.0;
        s.ledger_coef += sign * dt;
        s.t += dt;
        d.dt = dt;
        d.ramp = true;
        if (s.t >= s.t_ramp_end - 1e-12 * s.eps) {
            s.t = s.t_ramp_end;
            s.phase = Phase::Stochastic;
            d.entered_stochastic = true;
        }
    } else {
        if (!noise) throw std::invalid_argument("couple_step: stochastic phase needs noise");
        const PowFn pw(s.p);
        Field xn = spde_step(s.X, &s.src, 1.0, pw, *noise);
        Field yn = spde_step(s.Y, &s.src, 1.0, pw, *noise);

        // comparison holds for the continuum pair; discrete leakage past
        // the dominant field is measured and then removed
        Field& dom = s.owner == Role::X ? xn : yn;
        Field& sub = s.owner == Role::X ? yn : xn;
        double worst = 0.0, excess = 0.0;
        for (std::size_t i = 0; i < dom.values.size(); ++i) {
            const double over = sub.values[i] - dom.values[i];
            if (over > 0) {
                worst = std::max(worst, over);
                excess += over;
                sub.values[i] = dom.values[i];
            }
        }
        d.dominance_violation = worst;
        d.dominance_violation_mass = excess * s.grid.dx();

        d.qv_rate_dominant = qv_rate(dom, s.p);
        s.X = std::move(xn);
        s.Y = std::move(yn);
        s.t += s.grid.dt;
        ++s.stoch_steps;
        d.dt = s.grid.dt;

        if (mass(s.dominant()) < zero_mass_threshold(s.grid)) {
            std::fill(s.X.values.begin(), s.X.values.end(), 0.0);
            std::fill(s.Y.values.begin(), s.Y.values.end(), 0.0);
            ++s.excursion_index;
            s.owner = other(s.owner);
            s.phase = Phase::Ramp;
            s.t_start = s.t;
            s.t_ramp_end = s.t + s.eps;
            d.excursion_ended = true;
        }
    }
    d.mass_X = mass(s.X);
    d.mass_Y = mass(s.Y);
}

Field coupled_difference_step(const Field& D, const Field& Y_prev, double p,
                              const NoiseSlice& noise) {
    if (D.values.size() != Y_prev.values.size())
        throw std::invalid_argument("coupled_difference_step: size mismatch");
    Field out = heat_step(D, D.grid.dt);
    const PowFn pw(p);
    const double amp = std::sqrt(D.grid.dt / D.grid.dx());
    const CensoredStep& cs = CensoredStep::instance();
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double sd = amp * (pw(Y_prev.values[i] + D.values[i]) - pw(Y_prev.values[i]));
        out.values[i] = cs.sample(out.values[i], std::max(sd, 0.0), noise.values[i]);
    }
    return out;
}

SeparationTrial run_separation_trial(const SeedSpec& seed, const GridSpec& g,
                                     const SeparationTrialConfig& cfg) {
    if (!(cfg.b > 0) || !(cfg.eps > 0) || !(cfg.p > 0 && cfg.p < 0.5))
        throw std::invalid_argument("run_separation_trial: need b > 0, eps > 0, p in (0,1/2)");
    if (!(2.0 * cfg.b * cfg.eps < cfg.x0 && cfg.x0 < 1.0))
        throw std::invalid_argument("run_separation_trial: need 2*b*eps < x0 < 1");

    const SourceFn src = SourceFn::bump(g, cfg.b);
    CoupledState s = CoupledState::start(g, src, cfg.eps, cfg.p);
    const int budget = cfg.max_excursions > 0
                           ? cfg.max_excursions
                           : static_cast<int>(std::ceil(10.0 / cfg.eps));
    const double p_prime = (cfg.p + 2.0) / 5.0;
    const PowFn mass_pow(2.0 * p_prime);
    std::vector<double> Kk(cfg.holder_k.size());
    for (std::size_t i = 0; i < Kk.size(); ++i) Kk[i] = ral_constant(0.25, cfg.holder_k[i]);

    SeparationTrial out;
    out.vk_flag.assign(cfg.holder_k.size(), 0);
    out.min_qv_margin = std::numeric_limits<double>::infinity();
    ExcursionRecord rec{0, 0.0, cfg.eps, 0.0, 0.0, 0.0, false, false};
    const double delta = zero_mass_threshold(g);

    CoupleStepDiag d;
    std::uint64_t monitor_countdown = 0;
    double last_estimate = 0.0;
    bool have_estimate = false;

    while (true) {
        NoiseSlice slice;
        const bool stoch = s.phase == Phase::Stochastic;
        if (stoch) slice = white_noise_slice(seed, s.stoch_steps, g.n_cells);
        couple_step(s, stoch ? &slice : nullptr, &d);

        out.ledger_max_coef = std::max(out.ledger_max_coef, std::fabs(s.ledger_coef));
        const double sep = std::fabs(d.mass_X - d.mass_Y);
        const double big = std::max(d.mass_X, d.mass_Y);
        rec.peak_mass = std::max(rec.peak_mass, big);
        rec.peak_separation = std::max(rec.peak_separation, sep);

        if (stoch) {
            out.max_dominance_violation =
                std::max(out.max_dominance_violation, d.dominance_violation);
            if (big > delta)
                out.max_dominance_violation_frac = std::max(
                    out.max_dominance_violation_frac, d.dominance_violation_mass / big);

            if (monitor_countdown == 0) {
                last_estimate = holder_pair_estimate(s.X.values, s.Y.values,
                                                     g.dx(), 0.25);
                have_estimate = true;
                out.max_holder_estimate = std::max(out.max_holder_estimate, last_estimate);
                for (std::size_t i = 0; i < cfg.holder_k.size(); ++i)
                    if (last_estimate > cfg.holder_k[i]) out.vk_flag[i] = 1;
                monitor_countdown = cfg.monitor_stride;
            }
            --monitor_countdown;

            // mass lower bound and time-change slope against the smallest
            // k whose Holder gate currently holds
            const double M = std::max(d.mass_X, d.mass_Y);
            if (have_estimate && M > delta) {
                for (std::size_t i = 0; i < cfg.holder_k.size(); ++i) {
                    if (last_estimate <= cfg.holder_k[i]) {
                        const double R = d.qv_rate_dominant / (Kk[i] * mass_pow(M));
                        out.min_qv_margin = std::min(out.min_qv_margin, R);
                        out.max_tau_prime = std::max(out.max_tau_prime, 1.0 / R);
                        break;
                    }
                }
            }

            if (sep >= cfg.x0) {
                rec.hit_x0 = true;
                rec.t_end = s.t;
                out.records.push_back(rec);
                out.outcome = TrialOutcome::Separated;
                out.separated_first = true;
                break;
            }
            if (big >= 1.0) {
                rec.hit_one = true;
                rec.t_end = s.t;
                out.records.push_back(rec);
                out.outcome = TrialOutcome::MassReachedOne;
                break;
            }
        }

        if (d.excursion_ended) {
            rec.t_end = s.t;
            out.records.push_back(rec);
            if (s.excursion_index >= budget) {
                out.outcome = TrialOutcome::Budget;
                break;
            }
            rec = ExcursionRecord{s.excursion_index, s.t_start, s.t_ramp_end,
                                  0.0, 0.0, 0.0, false, false};
        }
    }
    out.n_excursions = static_cast<int>(out.records.size());
    if (!std::isfinite(out.min_qv_margin)) out.min_qv_margin = 0.0;
    return out;
}

SignedExcursions run_signed_excursions(const SeedSpec& seed, const GridSpec& g,
                                       const SignedExcursionConfig& cfg) {
    if (!(cfg.eps > 0 && cfg.eps < 1))
        throw std::invalid_argument("run_signed_excursions: eps in (0,1)");
    if (!(cfg.p > 0 && cfg.p < 0.5))
        throw std::invalid_argument("run_signed_excursions: p in (0,1/2)");
    if (!(cfg.t_horizon > 0))
        throw std::invalid_argument("run_signed_excursions: t_horizon must be > 0");

    const SourceFn src = SourceFn::bump(g, cfg.b);
    const PowFn pw(cfg.p);
    const double delta = zero_mass_threshold(g);
    // dust-stall guard: the moment-matched step reaches exact zero by
    // itself; if sub-threshold mass lingers anyway, force the restart
    const auto stall_limit = static_cast<std::size_t>(std::ceil(cfg.eps / g.dt));

    SignedExcursions out;
    Field f = Field::zero(g);
    auto restart = [&] {
        ++out.excursion_count;
        for (int i = 0; i < g.n_cells; ++i)
            f.values[i] = cfg.eps * src.sampled[i];
    };
    restart();

    double t = 0.0;
    std::uint64_t step = 0;
    std::size_t stall = 0;
    while (t < cfg.t_horizon) {
        const NoiseSlice slice = white_noise_slice(seed, step, g.n_cells);
        f = spde_step(f, nullptr, 0.0, pw, slice);
        ++step;
        t += g.dt;
        const double m = mass(f);
        if (cfg.record_stride > 0 && step % static_cast<std::uint64_t>(cfg.record_stride) == 0) {
            const double sign = out.excursion_count % 2 == 1 ? 1.0 : -1.0;
            out.mass_path.emplace_back(t, sign * m);
        }
        if (m >= 1.0) {
            out.escaped = true;
            out.escape_time = t;
            out.first_escape_index = out.excursion_count;
            break;
        }
        if (m == 0.0) {
            stall = 0;
            restart();
            continue;
        }
        if (m < delta) {
            if (++stall >= stall_limit) {
                ++out.stall_guard_hits;
                stall = 0;
                restart();
            }
        } else {
            stall = 0;
        }
    }
    return out;
}

}  // namespace spdelab
