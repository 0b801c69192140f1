#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "mmlab/params.hpp"
#include "mmlab/rng.hpp"

namespace mmlab {

// Copy numbers. Concentration x maps to round(x*omega) counts; the enzyme
// total E_T = round(eT*omega) lives on the network since it never changes.
struct CountState {
    std::int64_t n_S = 0;
    std::int64_t n_C = 0;
    std::int64_t n_P = 0;
};

enum class NetworkLabel { full, reduced };

struct ReactionNetwork;

using PropensityFn = double (*)(const CountState&, const ReactionNetwork&);

struct Reaction {
    const char* name;
    std::array<int, 3> change; // (n_S, n_C, n_P)
    PropensityFn propensity;
};

struct ReactionNetwork {
    NetworkLabel label = NetworkLabel::full;
    Parameters params;
    std::int64_t enzyme_total = 0;
    bool rounded_enzyme = false; // eT*omega was not integral; a warning was issued
    std::vector<Reaction> reactions;

    double total_propensity(const CountState& x) const;
};

// Influx, binding, unbinding, catalysis with mass-action propensities
//   omega*k0, (k1/omega) n_S (E_T - n_C), k_m1 n_C, k2 n_C.
// Requires E_T >= 1. Non-integral eT*omega is rounded with a warning on stderr.
ReactionNetwork build_full_network(const Parameters& p);

// Influx and consumption; the consumption propensity k2 eT n_S/(K_M + n_S/omega)
// inherits the quasi-steady-state rate law.
ReactionNetwork build_reduced_network(const Parameters& p);

struct SsaRunResult {
    CountState state;
    double t = 0;
    std::uint64_t events = 0;
    bool absorbed = false; // total propensity hit zero
};

// Gillespie direct method. Runs from (t0, x) until t_end, max_events fires, or
// absorption, whichever first. on_event(tau, before, after, reaction) is
// invoked once per fired event, tau being the holding time of `before`.
template <class OnEvent>
SsaRunResult run_ssa(const ReactionNetwork& net, CountState x, double t0, double t_end,
                     std::uint64_t max_events, Xoshiro256pp& rng, OnEvent&& on_event) {
    const std::size_t n_reactions = net.reactions.size();
    double a[8];
    double t = t0;
    std::uint64_t fired = 0;
    while (fired < max_events) {
        double a_tot = 0;
        for (std::size_t r = 0; r < n_reactions; ++r) {
            a[r] = net.reactions[r].propensity(x, net);
            a_tot += a[r];
        }
        if (!(a_tot > 0)) return {x, t, fired, true};
        const double tau = rng.exponential(a_tot);
        if (t + tau > t_end) return {x, t_end, fired, false};
        t += tau;
        std::size_t r = 0;
        double threshold = rng.uniform() * a_tot;
        for (; r + 1 < n_reactions; ++r) {
            threshold -= a[r];
            if (threshold < 0) break;
        }
        const CountState before = x;
        x.n_S += net.reactions[r].change[0];
        x.n_C += net.reactions[r].change[1];
        x.n_P += net.reactions[r].change[2];
        ++fired;
        on_event(tau, before, x, static_cast<int>(r));
    }
    return {x, t, fired, false};
}

struct CountTrajectory {
    std::vector<double> times;
    std::vector<CountState> states;
    bool absorbed = false;
};

// State sampled on the grid t = 0, sample_dt, 2*sample_dt, ... <= t_end. After
// absorption the remaining grid repeats the final state.
CountTrajectory simulate(const ReactionNetwork& net, CountState initial, double t_end,
                         double sample_dt, std::uint64_t seed);

// Columns t,n_S,n_C,n_P; t at 17 significant digits.
void write_csv(const CountTrajectory& traj, std::ostream& os);

struct MomentEstimate {
    double mean = 0;
    double variance = 0;
    double std_dev = 0;
    double se_mean = 0;
    double se_variance = 0;
    std::uint64_t events = 0;
    double burn_in = 0;
    std::uint64_t seed = 0;
};

// Keys exactly {mean, variance, std, se_mean, se_variance, events, burn_in, seed}.
void to_json(nlohmann::json& j, const MomentEstimate& m);

struct MomentOptions {
    // Burn-in time is burn_in_relaxations/rate, rate the slow relaxation rate
    // of the full system linearised at the fixed point (both networks share
    // the schedule so comparisons use matched windows). burn_in_time, when
    // set, overrides that.
    double burn_in_relaxations = 20.0;
    std::optional<double> burn_in_time;
    int batches = 32;
};

// |slow eigenvalue| of the fixed-point Jacobian. Both eigenvalues are real
// and negative whenever alpha < 1; the small root is computed as det/fast to
// avoid cancellation.
double slow_relaxation_rate(const Parameters& p);

// Rounded fixed point: (round(gamma*omega), round(nu*omega), 0) for the full
// network, complex count 0 for the reduced one.
CountState initial_stationary_state(const ReactionNetwork& net);

// Stationary mean and variance of n_S from one long trajectory started at the
// rounded fixed point: burn-in, then time-weighted moments over the remaining
// event budget, standard errors from equal-event-count batch means. Throws
// InsufficientBudgetError when the budget cannot cover burn-in plus one event
// per batch, NoStationaryPointError when alpha >= 1. An absorbed run (k0 = 0)
// degenerates to a point mass at the absorbing state.
MomentEstimate stationary_moments(const ReactionNetwork& net, std::uint64_t budget_events,
                                  std::uint64_t seed, const MomentOptions& opts = {});

// Ensemble alternative: `replicas` independent runs, each burnt in from the
// rounded fixed point and sampled once, replica r seeded with hash64(seed, r).
// Worker threads only distribute replicas, so results do not depend on
// `workers`.
MomentEstimate replica_moments(const ReactionNetwork& net, int replicas,
                               std::uint64_t seed, const MomentOptions& opts = {},
                               unsigned workers = 0);

} // namespace mmlab
