#include <doctest.h>
#include <spreadout/returns.hpp>
#include <spreadout/simulate.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace spreadout;

static SimConfig base_cfg(std::uint64_t seed, std::int64_t trials) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.trials = trials;
    return cfg;
}

TEST_CASE("simulation config validation") {
    Kernel k = make_uniform(3, 1);
    SimConfig cfg = base_cfg(1, 50);  // too few trials for a quotable stderr
    CHECK_THROWS_AS(mc_return(k, 4, cfg), std::invalid_argument);
    cfg = base_cfg(1, 1000);
    cfg.horizon = -1;
    CHECK_THROWS_AS(op_survival(k, 1.0, cfg), std::invalid_argument);
    cfg = base_cfg(1, 1000);
    cfg.max_active = 0;
    CHECK_THROWS_AS(op_survival(k, 1.0, cfg), std::invalid_argument);
    cfg = base_cfg(1, 1000);
    CHECK_THROWS_AS(op_survival(k, -0.5, cfg), std::invalid_argument);
    // p * max_mass > 1 would need bond probabilities above one.
    CHECK_THROWS_AS(op_survival(k, 30.0, cfg), std::invalid_argument);
    // Poisson offspring only makes sense in the ghost regime.
    cfg = base_cfg(1, 1000);
    cfg.poisson_offspring = true;
    cfg.ignore_collisions = false;
    CHECK_THROWS_AS(op_survival(k, 1.0, cfg), std::invalid_argument);
}

TEST_CASE("mc return degenerate cases are exact") {
    Kernel k = make_uniform(2, 1);
    SimConfig cfg = base_cfg(3, 500);
    SimEstimate one_step = mc_return(k, 1, cfg);
    CHECK(one_step.value == 0.0);  // a single nonzero step cannot return
    CHECK(one_step.std_error == 0.0);
    SimEstimate zero_step = mc_return(k, 0, cfg);
    CHECK(zero_step.value == 1.0);
}

TEST_CASE("mc return serial and parallel paths are bitwise identical") {
    Kernel k = make_uniform(2, 2);
    SimConfig cfg = base_cfg(77, 20000);
    SimEstimate a = mc_return_serial(k, 6, cfg);
    SimEstimate b = mc_return(k, 6, cfg);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    SimConfig cfg3 = cfg;
    cfg3.workers = 3;
    SimEstimate c = mc_return(k, 6, cfg3);
    CHECK(a.value == c.value);
}

TEST_CASE("mc return is consistent with the exact value") {
    Kernel k = make_uniform(2, 1);
    ReturnSeries s = return_series_integer(k, 4);
    SimConfig cfg = base_cfg(2024, 200000);
    SimEstimate est = mc_return(k, 4, cfg);
    CHECK(est.std_error > 0.0);
    CHECK(std::fabs(est.value - s.r[4]) <= 5.0 * est.std_error);
}

TEST_CASE("mc return estimates are unbiased across seeds") {
    // Pool 40 independent seeds; the pooled z-score should be modest.
    Kernel k = make_uniform(1, 2);
    ReturnSeries s = return_series_integer(k, 4);
    double sum = 0.0, var = 0.0;
    const int reps = 40;
    for (int i = 0; i < reps; ++i) {
        SimConfig cfg = base_cfg(1000 + i, 4000);
        SimEstimate est = mc_return(k, 4, cfg);
        sum += est.value;
        var += est.std_error * est.std_error;
    }
    double pooled = sum / reps;
    double pooled_se = std::sqrt(var) / reps;
    CHECK(std::fabs(pooled - s.r[4]) <= 4.0 * pooled_se);
}

TEST_CASE("survival probability endpoints") {
    Kernel k = make_uniform(3, 1);
    SimConfig cfg = base_cfg(5, 300);
    cfg.horizon = 0;
    SimEstimate always = op_survival(k, 0.5, cfg);
    CHECK(always.value == 1.0);  // generation 0 is the seeded origin
    cfg.horizon = 4;
    SimEstimate dead = op_survival(k, 0.0, cfg);
    CHECK(dead.value == 0.0);
}

TEST_CASE("survival decreases with horizon and increases with p") {
    Kernel k = make_uniform(3, 1);
    SimConfig cfg = base_cfg(11, 3000);
    cfg.ignore_collisions = true;
    cfg.horizon = 5;
    double s5 = op_survival(k, 1.05, cfg).value;
    cfg.horizon = 20;
    double s20 = op_survival(k, 1.05, cfg).value;
    CHECK(s20 <= s5 + 1e-12);
    double weaker = op_survival(k, 0.95, cfg).value;
    CHECK(weaker <= op_survival(k, 1.15, cfg).value + 1e-12);
}

TEST_CASE("ghost-mode critical point approaches one as the horizon grows") {
    // Collision-free spread-out branching has mean offspring exactly p, so
    // the finite-horizon pseudo-critical point drifts down toward 1.
    Kernel k = make_uniform(3, 1);
    SimConfig cfg = base_cfg(9, 1000);
    cfg.ignore_collisions = true;
    cfg.bisect_tol = 5e-3;
    cfg.max_active = 2000;  // caps the cost of the supercritical bracket edge
    std::vector<double> gap;
    for (int T : {25, 100}) {
        cfg.horizon = T;
        PcEstimate pc = op_pc_estimate(k, cfg);
        CHECK(pc.monotone_ok);
        CHECK(pc.evaluations > 2);
        gap.push_back(std::fabs(pc.p_c - 1.0));
    }
    CHECK(gap[1] <= gap[0] + 0.02);
    CHECK(gap[1] < 0.12);
}

TEST_CASE("bisection bracket validation") {
    Kernel k = make_uniform(3, 1);
    SimConfig cfg = base_cfg(13, 500);
    cfg.ignore_collisions = true;
    cfg.horizon = 30;
    cfg.max_active = 500;
    cfg.p_lo = 1.5;  // survives at the low end: invalid bracket
    cfg.p_hi = 1.6;
    CHECK_THROWS_AS(op_pc_estimate(k, cfg), std::invalid_argument);
    cfg.p_lo = 0.2;
    cfg.p_hi = 0.3;  // dies at the high end too: invalid bracket
    CHECK_THROWS_AS(op_pc_estimate(k, cfg), std::invalid_argument);
}

TEST_CASE("double connection sum degenerate cases") {
    Kernel k = make_uniform(5, 1);
    SimConfig cfg = base_cfg(21, 500);
    cfg.horizon = 1;
    // Two bond-disjoint paths to the same vertex need t >= 2.
    CHECK(op_double_connection_sum(k, cfg).value == 0.0);
    cfg.horizon = 4;
    cfg.p = 0.0;
    CHECK(op_double_connection_sum(k, cfg).value == 0.0);
    cfg.p = 1.0;
    cfg.horizon = 21;
    CHECK_THROWS_AS(op_double_connection_sum(k, cfg), std::invalid_argument);
}

TEST_CASE("double connection sum tracks the even return sum") {
    // At p = 1 the leading behaviour of the doubly-connected sum over
    // 2 <= t <= T is (1/2) sum r_{2t} + O(beta^2); beta is small enough at
    // d=5 L=2 that 4 sigma plus a beta^2 cushion brackets it.
    Kernel k = make_uniform(5, 2);
    SimConfig cfg = base_cfg(31, 40000);
    cfg.horizon = 10;
    SimEstimate est = op_double_connection_sum(k, cfg);
    ReturnSeries s = return_series_integer(k, 20);
    double target = 0.0;
    for (int t = 2; t <= 10; ++t) target += 0.5 * s.r[2 * t];
    CHECK(std::fabs(est.value - target) <=
          4.0 * est.std_error + 50.0 * k.beta * k.beta);
    CHECK(est.std_error > 0.0);
}

TEST_CASE("survival estimates are reproducible for a fixed config") {
    Kernel k = make_uniform(3, 1);
    SimConfig cfg = base_cfg(17, 2000);
    cfg.horizon = 10;
    SimEstimate a = op_survival(k, 1.0, cfg);
    SimEstimate b = op_survival(k, 1.0, cfg);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    SimConfig cfg3 = cfg;
    cfg3.workers = 3;
    SimEstimate c = op_survival(k, 1.0, cfg3);
    CHECK(a.value == c.value);
}

TEST_CASE("uniform offspring with huge M is rejected") {
    // The distinct-index subset draw needs M - 1 to fit in 32 bits.
    Kernel k = make_uniform(7, 40);  // (81)^7 - 1 > 2^32
    SimConfig cfg = base_cfg(1, 500);
    CHECK_THROWS_AS(op_survival(k, 1.0, cfg), std::invalid_argument);
}
