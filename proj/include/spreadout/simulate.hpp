#pragma once

// Monte Carlo cross-checks: n-step return frequency, oriented-percolation
// survival / critical-point bisection with common-random-number coupling, and
// the doubly-connected two-point sum.  All estimates are pure functions of
// (config, seed): streams are keyed by (seed, trial, generation, site), so
// results are bitwise independent of the worker count.

#include <cstdint>
#include <string>

#include "spreadout/kernels.hpp"

namespace spreadout {

struct SimConfig {
    std::uint64_t seed = 1;
    std::int64_t trials = 10'000;
    int horizon = 100;  // generations T
    double p = 1.0;
    bool ignore_collisions = false;   // ghost / branching-process mode
    bool poisson_offspring = false;   // Poisson approximation (explicitly opt-in)
    std::int64_t max_active = 10'000;  // blow-up cap per trial
    double survival_threshold = 0.02;
    double bisect_tol = 1e-3;
    double p_lo = 0.9;
    double p_hi = 1.2;
    int workers = 0;  // 0 = library/environment default
};

struct SimEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
    std::int64_t dropped_trials = 0;
    std::int64_t flagged_trials = 0;  // max_active exceeded, counted survived
    std::uint64_t seed = 0;
};

// Fraction of n-step walks with iid D steps that end at the origin.
SimEstimate mc_return(const Kernel& k, int n, const SimConfig& cfg);
SimEstimate mc_return_serial(const Kernel& k, int n, const SimConfig& cfg);

// P(cluster of the origin reaches generation T) at bond strength p D(.).
SimEstimate op_survival(const Kernel& k, double p, const SimConfig& cfg);

struct PcEstimate {
    double p_c = 0.0;
    double std_error = 0.0;  // survival stderr / CRN slope estimate
    double survival_at_pc = 0.0;
    double slope = 0.0;
    int evaluations = 0;
    std::int64_t trials = 0;
    bool monotone_ok = false;  // per-trial survival nondecreasing along the path
    std::uint64_t seed = 0;
};

// Bisection on the survival curve under CRN coupling; the coupling makes each
// trial's survival indicator literally nondecreasing in p (asserted).
PcEstimate op_pc_estimate(const Kernel& k, const SimConfig& cfg);

// MC estimate of sum_{x, 1<=t<=T} P(two bond-disjoint occupied paths
// (o,0) -> (x,t)); compares against (1/2) sum_{t=2}^{T} r_{2t}.
SimEstimate op_double_connection_sum(const Kernel& k, const SimConfig& cfg);

int resolve_workers(int requested);  // env default SPREADOUT_WORKERS

}  // namespace spreadout
