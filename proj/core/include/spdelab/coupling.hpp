#pragma once

#include <cstdint>
#include <vector>

#include "spdelab/heat.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {

enum class Role { X, Y };
enum class Phase { Ramp, Stochastic };

inline Role other(Role r) { return r == Role::X ? Role::Y : Role::X; }

// The coupled pair (X, Y) built from alternating excursions: the owner
// of excursion j (X for even j, Y for odd) is first ramped for time eps
// by the heat dynamics with source 2*psi while the other field is held
// at zero; both then evolve with the common noise and source psi until
// the owner's mass returns to zero, which starts excursion j+1 with the
// roles swapped.
struct CoupledState {
    GridSpec grid;
    SourceFn src;
    double eps = 0.0;
    double p = 0.0;
    Field X, Y;
    Phase phase = Phase::Ramp;
    Role owner = Role::X;  // ramp owner == dominant field of the excursion
    int excursion_index = 0;
    double t = 0.0;
    double t_start = 0.0;     // T_j
    double t_ramp_end = 0.0;  // U_j = T_j + eps
    double ledger_coef = 0.0; // A_1(t,x) = ledger_coef * psi(x)
    std::uint64_t stoch_steps = 0;  // noise slices consumed

    static CoupledState start(const GridSpec& g, const SourceFn& src, double eps,
                              double p);
    const Field& dominant() const { return owner == Role::X ? X : Y; }
    const Field& dominated() const { return owner == Role::X ? Y : X; }
};

struct CoupleStepDiag {
    double dt = 0.0;
    bool ramp = false;
    bool entered_stochastic = false;
    bool excursion_ended = false;
    double mass_X = 0.0;
    double mass_Y = 0.0;
    double qv_rate_dominant = 0.0;          // dx * sum F^(2p), stochastic steps
    double dominance_violation = 0.0;       // pre-enforcement max of (dominated-dominant)
    double dominance_violation_mass = 0.0;  // dx * sum of the enforced excess
};

// Advances the construction by one grid step (ramp steps may be
// shorter so that the ramp lasts exactly eps).  `noise` is required in
// stochastic phases and ignored during ramps.  Both fields consume the
// same slice; the dominated field is clipped at the dominant one and
// the removed excess is reported, not hidden.
void couple_step(CoupledState& s, const NoiseSlice* noise,
                 CoupleStepDiag* diag = nullptr);

// Difference dynamics driven by the recorded slices: D stepped with
// diffusion coefficient (Y+D)^p - Y^p against the pre-step Y.  Used to
// replay X - Y independently of the pairwise construction.
Field coupled_difference_step(const Field& D, const Field& Y_prev, double p,
                              const NoiseSlice& noise);

struct ExcursionRecord {
    int j = 0;
    double t_start = 0.0;
    double t_ramp_end = 0.0;
    double t_end = 0.0;
    double peak_mass = 0.0;
    double peak_separation = 0.0;
    bool hit_one = false;
    bool hit_x0 = false;
};

enum class TrialOutcome { Separated, MassReachedOne, Budget };

struct SeparationTrialConfig {
    double eps = 0.05;
    double p = 0.25;
    double b = 1.0;
    double x0 = 0.2;
    int max_excursions = 0;         // 0 -> ceil(10/eps)
    int monitor_stride = 8;         // Holder scans every this many steps
    std::vector<double> holder_k = {8.0, 16.0, 32.0};
};

struct SeparationTrial {
    TrialOutcome outcome = TrialOutcome::Budget;
    bool separated_first = false;
    int n_excursions = 0;
    std::vector<ExcursionRecord> records;
    double ledger_max_coef = 0.0;        // max |A_1|/psi over the run, <= eps
    double max_holder_estimate = 0.0;    // pair estimate at monitored steps
    std::vector<std::uint8_t> vk_flag;   // per configured k
    double min_qv_margin = 0.0;          // min of qv/(K(k) M^(2p')) over gated steps
    double max_tau_prime = 0.0;          // max 1/R over gated stochastic steps
    double max_dominance_violation = 0.0;
    double max_dominance_violation_frac = 0.0;
};

// Runs coupled excursions until the mass gap |<X,1> - <Y,1>| reaches x0
// (separated_first), some mass reaches 1, or the excursion budget runs
// out.  Requires 0 < 2*b*eps < x0 < 1.
SeparationTrial run_separation_trial(const SeedSpec& seed, const GridSpec& g,
                                     const SeparationTrialConfig& cfg);

struct SignedExcursionConfig {
    double eps = 0.05;
    double p = 0.25;
    double b = 1.0;
    double t_horizon = 16.0;
    int record_stride = 0;  // 0 -> no mass path recording
};

struct SignedExcursions {
    bool escaped = false;
    double escape_time = 0.0;            // valid when escaped
    int excursion_count = 0;             // excursions started
    int first_escape_index = 0;          // 1-based; 0 when none
    std::vector<std::pair<double, double>> mass_path;  // (t, signed mass)
    std::size_t stall_guard_hits = 0;
};

// Signed single-field construction: excursion i starts from
// (-1)^i * eps * psi and evolves by dX = (1/2)X_xx dt + |X|^p dW (no
// drift) until total mass returns to zero, then restarts with the sign
// flipped; escaped once |<X,1>| reaches 1 before the horizon.
SignedExcursions run_signed_excursions(const SeedSpec& seed, const GridSpec& g,
                                       const SignedExcursionConfig& cfg);

}  // namespace spdelab
