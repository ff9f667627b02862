#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "spreadout/continuum.hpp"
#include "spreadout/diagrams.hpp"
#include "spreadout/gmp_util.hpp"
#include "spreadout/kernels.hpp"
#include "spreadout/returns.hpp"
#include "spreadout/simulate.hpp"
#include "spreadout/sums.hpp"
#include "spreadout/verify.hpp"

namespace spreadout {

namespace {

struct CriterionSpec {
    const char* name;
    bool gating;
};

const CriterionSpec kCriteria[] = {
    {"exact-r2-rational", true},        // 1
    {"series-method-agreement", true},  // 2
    {"mc-return-oracle", true},         // 3
    {"irwin-hall-density", true},       // 4
    {"continuum-limit-rate", true},     // 5
    {"series-shape-invariants", true},  // 6
    {"saw-defect-bound", true},         // 7
    {"triangle-diagnostic", true},      // 8
    {"cp-epsilon-limit", true},         // 9
    {"ghost-pc-calibration", true},     // 10
    {"op-pc-exploratory", false},       // 11
};

// 1: r_2 must come out as the exact rational 1/((2L+1)^d - 1).
bool crit_exact_r2(std::ostringstream& out) {
    bool ok = true;
    for (int d = 1; d <= 4; ++d)
        for (int L = 1; L <= 5; ++L) {
            Kernel k = make_uniform(d, L);
            ReturnSeries s = return_series_integer(k, 2);
            const mpq_class want = make_rational(1, mpz_class(k.M - 1));
            if (s.exact[2] != want || s.exact[0] != 1 || s.exact[1] != 0) {
                ok = false;
                out << "mismatch at d=" << d << " L=" << L << "; ";
            }
        }
    out << "r_2 == 1/((2L+1)^d - 1) exactly for d in 1..4, L in 1..5";
    return ok;
}

// 2: integer, dense and quadrature routes agree.
bool crit_method_agreement(std::ostringstream& out) {
    double worst_id = 0.0, worst_q = 0.0;
    for (int d = 1; d <= 3; ++d)
        for (int L = 1; L <= 3; ++L) {
            Kernel k = make_uniform(d, L);
            ReturnSeries si = return_series_integer(k, 16);
            ReturnSeries sd = return_series_dense(k, 16);
            for (int n = 0; n <= 16; ++n)
                worst_id = std::max(worst_id, std::abs(si.r[n] - sd.r[n]));
            if (d <= 2)
                for (int n = 0; n <= 10; ++n) {
                    const double q = fourier_quadrature_return(k, n);
                    worst_q = std::max(worst_q, std::abs(q - si.r[n]));
                    worst_q = std::max(worst_q, std::abs(q - sd.r[n]));
                }
        }
    out << "max |integer - dense| = " << worst_id << " (tol 1e-12) over d<=3, L<=3, n<=16; "
        << "max |quadrature - series| = " << worst_q << " (tol 1e-8) over d<=2, n<=10";
    return worst_id <= 1e-12 && worst_q <= 1e-8;
}

// 3: Monte Carlo return frequency against the exact r_n.
bool crit_mc_oracle(std::ostringstream& out) {
    bool ok = true;
    const int cases[3][3] = {{1, 1, 2}, {2, 2, 4}, {3, 1, 6}};
    for (const auto& c : cases) {
        Kernel k = make_uniform(c[0], c[1]);
        ReturnSeries s = return_series_integer(k, c[2]);
        SimConfig cfg;
        cfg.seed = 12345;
        cfg.trials = 1'000'000;
        SimEstimate est = mc_return(k, c[2], cfg);
        const double gap = std::abs(est.value - s.r[c[2]]);
        out << "(d,L,n)=(" << c[0] << "," << c[1] << "," << c[2] << "): gap/se = "
            << gap / est.std_error << "; ";
        if (!(gap <= 4.0 * est.std_error)) ok = false;
    }
    out << "tol 4 standard errors at 1e6 trials";
    return ok;
}

// 4: center density of n-fold uniform[-1,1] sums, closed form vs a grid
// convolution oracle built from scratch here (midpoint atoms, h = 1e-3).
bool crit_irwin_hall(std::ostringstream& out) {
    bool ok = continuum_center_density_exact(2) == mpq_class(1, 2) &&
              continuum_center_density_exact(3) == mpq_class(3, 8);
    if (!ok) out << "small-n exact values wrong; ";
    const int G = 2000;
    const double h = 2.0 / G;
    std::vector<double> base(G, 1.0 / G), pmf(base);
    double worst = 0.0;
    for (int n = 2; n <= 10; ++n) {
        std::vector<double> nxt(pmf.size() + G - 1, 0.0);
        for (std::size_t i = 0; i < pmf.size(); ++i)
            for (int j = 0; j < G; ++j) nxt[i + j] += pmf[i] * base[j];
        pmf.swap(nxt);
        // atom index s sits at x = (s + n/2) h - n; x = 0 is the atom
        // s = n (G-1)/2 for even n and straddled by two atoms for odd n
        double vh;
        if (n % 2 == 0) {
            vh = pmf[static_cast<std::size_t>(n) * (G - 1) / 2] / h;
        } else {
            const std::size_t lo = (static_cast<std::size_t>(n) * (G - 1) - 1) / 2;
            vh = (pmf[lo] + pmf[lo + 1]) / (2.0 * h);
        }
        worst = std::max(worst, std::abs(vh - continuum_center_density(n)));
    }
    out << "grid oracle (h=0.001) vs closed form for n<=10: max gap " << worst
        << " (tol 1e-4); v_2 == 1/2, v_3 == 3/8 exact";
    return ok && worst <= 1e-4;
}

// 5: the lattice loop sums approach their beta-scaled continuum limits at rate
// beta/L: the rescaled discrepancy stays within a factor 2 across L.
bool crit_continuum_rate(std::ostringstream& out) {
    bool ok = true;
    const std::vector<int> Ls = {4, 8, 16, 32};
    const struct {
        CompareVariant v;
        const char* label;
    } variants[] = {{CompareVariant::AllFrom3, "unit-weight"},
                    {CompareVariant::EvenFrom2, "even-step"}};
    for (const auto& var : variants) {
        auto rows = compare_discrete_continuum(5, Ls, var.v, 1e-10);
        double lo = 1e300, hi = 0.0;
        bool tails = true;
        for (const auto& r : rows) {
            lo = std::min(lo, r.ratio);
            hi = std::max(hi, r.ratio);
            tails = tails && r.tails_valid;
        }
        out << var.label << " rescaled gaps in [" << lo << ", " << hi << "]; ";
        if (!tails || !(lo > 0.0) || !(hi / lo <= 2.0)) ok = false;
    }
    out << "d=5, L in {4,8,16,32}, |discrete - beta*continuum| * L / beta within factor 2";
    return ok;
}

// 6: shape invariants of the series (log-convexity along even steps, even
// monotonicity), stability of the gauss constant in L, and the discretized
// one-step kernel q = (1-eps) delta + eps D obeying the same gaussian bound
// with eps-rescaled time.
bool crit_shape_invariants(std::ostringstream& out) {
    bool ok = true;
    for (int d : {1, 2, 3, 5, 7})
        for (int L : {1, 2, 4}) {
            Kernel k = make_uniform(d, L);
            ReturnSeries s = return_series_integer(k, 30);
            if (!s.monotone_even) {
                ok = false;
                out << "even-monotonicity fail d=" << d << " L=" << L << "; ";
            }
            for (int n = 2; n + 2 <= 30; n += 2)
                if (s.exact[n] * s.exact[n] > s.exact[n - 2] * s.exact[n + 2]) {
                    ok = false;
                    out << "log-convexity fail d=" << d << " L=" << L << " n=" << n << "; ";
                }
        }
    out << "even-step log-convexity and monotonicity hold (d in {1,2,3,5,7}, L in {1,2,4}, n<=30); ";

    ReturnSeries s4;
    double g4 = 0.0, beta4 = 0.0, glo = 1e300, ghi = 0.0;
    for (int L : {4, 8, 16}) {
        Kernel k = make_uniform(5, L);
        ReturnSeries s = return_series_integer(k, 30);
        double g = 0.0;
        for (int n = 2; n <= 30; ++n)
            g = std::max(g, s.r[n] * std::pow(static_cast<double>(n), 2.5) / k.beta);
        if (L == 4) {
            g4 = g;
            beta4 = k.beta;
            s4 = s;
        }
        glo = std::min(glo, g);
        ghi = std::max(ghi, g);
    }
    out << "gauss constants (d=5, n=2..30) in [" << glo << ", " << ghi << "], factor "
        << ghi / glo << "; ";
    if (!(ghi / glo <= 2.0)) ok = false;

    for (double eps : {1.0, 0.5, 0.25}) {
        double c = 0.0;
        for (int n = 2; n <= 30; ++n) {
            const double excess = discretized_return(s4, eps, n) - std::pow(1.0 - eps, n);
            c = std::max(c, excess * std::pow(std::max(1.0, n * eps), 2.5) / beta4);
        }
        out << "C(eps=" << eps << ") = " << c << "; ";
        if (!(c >= 0.5 * g4 && c <= 2.0 * g4)) ok = false;
    }
    out << "discretized constants within factor 2 of " << g4;
    return ok;
}

// 7: the first expansion coefficient differs from the plain return sum by the
// self-intersecting loops, which the crude (sum n r_n)(sum r_n) bound covers.
bool crit_saw_defect(std::ostringstream& out) {
    bool ok = true;
    for (int L : {1, 2}) {
        Kernel k = make_uniform(5, L);
        LoopEnumeration loops = saw_loop_sum(k, 8);
        ReturnSeries s = return_series_integer(k, 8);
        mpq_class sum_r = 0;
        for (int n = 2; n <= 8; ++n) sum_r += s.exact[n];
        const mpq_class defect = sum_r - loops.pi1_exact;
        SawBound bound = saw_correction_bound(compute_series(k, 1e-10));
        out << "L=" << L << ": defect " << to_double(defect) << " vs bound " << bound.value
            << "; ";
        if (defect < 0 || !(to_double(defect) <= bound.value) || !bound.tails_valid) ok = false;
    }
    out << "0 <= sum r_n - pi1 <= (sum n r_n)(sum r_n) at d=5, nmax=8";
    return ok;
}

// 8: triangle diagram: L^d-scaling stability at d=7, plus a d=2 cross-check
// of the truncated series against 2-D quadrature of D_hat^2 sum C(n,2) D_hat^{n-2}.
bool crit_triangle(std::ostringstream& out) {
    bool ok = true;
    double lo = 1e300, hi = 0.0;
    for (int L : {2, 3, 4}) {
        Kernel k = make_uniform(7, L);
        ReturnSeries s = compute_series(k, 1e-10);
        LoopSums ls = loop_sums(s);
        if (!ls.has_triangle || !ls.tail_triangle.valid) {
            ok = false;
            out << "triangle tail invalid at L=" << L << "; ";
        }
        const double scaled = ls.triangle / k.beta;
        out << "L=" << L << " triangle*L^7 = " << scaled << "; ";
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    if (!(lo > 0.0 && hi / lo <= 2.0)) ok = false;

    Kernel k2 = make_uniform(2, 1);
    ReturnSeries s2 = return_series_integer(k2, 40);
    LoopSums ls2 = loop_sums(s2, /*force_triangle=*/true);
    if (ls2.tail_triangle.valid) {
        ok = false;
        out << "d=2 triangle tail unexpectedly valid; ";
    }
    const double tri_series = ls2.triangle;  // pure truncation at N=40
    const int Q = 40 * k2.L + 8;
    double coef[39];
    for (int j = 0; j <= 38; ++j) coef[j] = 0.5 * (j + 2) * (j + 1);
    AxisFactorization ax = axis_factorization(k2);
    const double Mf = static_cast<double>(k2.M);
    double acc = 0.0;
    for (int i = 0; i < Q; ++i) {
        const double ui = ax.axis_fourier(-M_PI + (i + 0.5) * (2.0 * M_PI / Q));
        for (int j = 0; j < Q; ++j) {
            const double uj = ax.axis_fourier(-M_PI + (j + 0.5) * (2.0 * M_PI / Q));
            const double x = (Mf * ui * uj - 1.0) / (Mf - 1.0);
            double pv = coef[38];
            for (int c = 37; c >= 0; --c) pv = pv * x + coef[c];
            acc += x * x * pv;
        }
    }
    const double tri_quad = acc / (static_cast<double>(Q) * Q);
    out << "d=2 truncated triangle: series " << tri_series << ", quadrature " << tri_quad
        << " (tol 1e-6)";
    if (!(std::abs(tri_series - tri_quad) <= 1e-6)) ok = false;
    return ok;
}

// 9: the discretization error of the contact-process sum is O(eps): fit the
// constant on eps in {0.2, 0.1} and check it still covers eps = 0.05.
bool crit_cp_limit(std::ostringstream& out) {
    Kernel k = make_uniform(5, 4);
    ReturnSeries s = compute_series(k, 1e-10);
    const double S = loop_sums(s).S_all;
    const double c1 = std::abs(cp_epsilon_sum(s, 0.2) - S) / 0.2;
    const double c2 = std::abs(cp_epsilon_sum(s, 0.1) - S) / 0.1;
    const double C = std::max(c1, c2);
    const double gap = std::abs(cp_epsilon_sum(s, 0.05) - S);
    out << "fitted slopes " << c1 << ", " << c2 << "; gap at eps=0.05 is " << gap
        << " <= " << C * 0.05;
    return gap <= C * 0.05;
}

// 10: ghost mode (collisions ignored) is a pure branching process, so the
// bisection must land on p_c = 1 up to the survival-threshold offset.
bool crit_ghost_calibration(std::ostringstream& out) {
    Kernel k = make_uniform(5, 1);
    SimConfig cfg;
    cfg.seed = 7;
    cfg.trials = 10'000;
    cfg.horizon = 200;
    cfg.ignore_collisions = true;
    PcEstimate est = op_pc_estimate(k, cfg);
    const double gap = std::abs(est.p_c - 1.0);
    out << "ghost-mode p_c = " << est.p_c << " (gap " << gap << ", tol 0.02), stderr "
        << est.std_error << ", coupling monotone: " << (est.monotone_ok ? "yes" : "no");
    return gap <= 0.02 && est.monotone_ok;
}

// 11 (reported, not gating): the full collision dynamics against the
// leading-order prediction 1 + (1/2) sum r_{2n}.
bool crit_op_exploratory(std::ostringstream& out) {
    Kernel k = make_uniform(5, 2);
    ReturnSeries s = compute_series(k, 1e-10);
    const double pred = 1.0 + 0.5 * loop_sums(s).S_even;
    SimConfig cfg;
    cfg.seed = 7;
    cfg.trials = 10'000;
    cfg.horizon = 200;
    PcEstimate est = op_pc_estimate(k, cfg);
    const double gap = std::abs(est.p_c - pred);
    out << "collision-mode p_c = " << est.p_c << " vs leading-order " << pred << "; measured gap "
        << gap << " (target 0.02), stderr " << est.std_error
        << ", coupling monotone: " << (est.monotone_ok ? "yes" : "no");
    return gap <= 0.02;
}

}  // namespace

int criterion_count() { return static_cast<int>(std::size(kCriteria)); }

const char* criterion_name(int id) {
    if (id < 1 || id > criterion_count()) throw std::invalid_argument("criterion id out of range");
    return kCriteria[id - 1].name;
}

bool criterion_gating(int id) {
    if (id < 1 || id > criterion_count()) throw std::invalid_argument("criterion id out of range");
    return kCriteria[id - 1].gating;
}

CriterionResult run_criterion(int id) {
    CriterionResult res;
    res.id = id;
    res.name = criterion_name(id);
    res.gating = criterion_gating(id);
    std::ostringstream out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        switch (id) {
            case 1: res.pass = crit_exact_r2(out); break;
            case 2: res.pass = crit_method_agreement(out); break;
            case 3: res.pass = crit_mc_oracle(out); break;
            case 4: res.pass = crit_irwin_hall(out); break;
            case 5: res.pass = crit_continuum_rate(out); break;
            case 6: res.pass = crit_shape_invariants(out); break;
            case 7: res.pass = crit_saw_defect(out); break;
            case 8: res.pass = crit_triangle(out); break;
            case 9: res.pass = crit_cp_limit(out); break;
            case 10: res.pass = crit_ghost_calibration(out); break;
            case 11: res.pass = crit_op_exploratory(out); break;
            default: throw std::invalid_argument("criterion id out of range");
        }
    } catch (const std::exception& e) {
        res.pass = false;
        out << " [exception: " << e.what() << "]";
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.detail = out.str();
    return res;
}

std::vector<int> suite_fast() { return {1, 2, 4, 6, 8, 9}; }

std::vector<int> suite_full() {
    std::vector<int> all(criterion_count());
    for (int i = 0; i < criterion_count(); ++i) all[i] = i + 1;
    return all;
}

bool suite_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (r.gating && !r.pass) return false;
    return true;
}

}  // namespace spreadout
