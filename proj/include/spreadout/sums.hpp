#pragma once

// Random-walk loop sums and the leading-order critical-point predictions
//   p_c = 1 + C(D) + O(beta^2)
// with the model-dependent loop correction C(D):
//   SAW, contact process:    sum_{n>=2} r_n
//   oriented percolation:    (1/2) sum_{n>=2} r_{2n}
//   unoriented percolation:  r_2 + (1/2) sum_{n>=3} (n+1) r_n
// plus the triangle diagram sum_{n>=2} C(n,2) r_n (finite only for d > 6) and
// the continuum versions with beta * v_n^d in place of r_n.

#include <span>
#include <string>
#include <vector>

#include "spreadout/continuum.hpp"
#include "spreadout/returns.hpp"

namespace spreadout {

enum class Model { SAW, Percolation, OrientedPercolation, ContactProcess };

const char* model_name(Model m);
Model model_from_string(const std::string& s);

struct LoopSums {
    int d = 0;
    int L = 0;
    int N = 0;  // even truncation index; tails cover n > N
    double beta = 0.0;
    double gauss_constant = 0.0;

    // Totals include the tail value when the tail is valid (invalid tails
    // contribute 0 and are flagged).
    double S_all = 0.0;       // sum_{n>=2} r_n
    double S_even = 0.0;      // sum_{n>=2} r_{2n}
    double S_weighted = 0.0;  // r_2 + (1/2) sum_{n>=3} (n+1) r_n
    TailEstimate tail_all, tail_even, tail_weighted;

    bool has_triangle = false;  // requires d > 6 (or forced)
    double triangle = 0.0;      // sum_{n>=2} n(n-1)/2 r_n
    TailEstimate tail_triangle;
};

LoopSums loop_sums(const ReturnSeries& series, bool force_triangle = false);

struct Prediction {
    Model model = Model::SAW;
    int d = 0;
    int L = 0;
    double beta = 0.0;
    double correction_term = 0.0;  // C(D) (or beta-scaled continuum sum)
    double p_c_leading = 0.0;      // 1 + correction_term
    double error_scale = 0.0;      // beta^2 (discrete) or beta/L (continuum)
    std::string error_scale_kind;  // "beta^2" | "beta/L"
    int truncation_N = 0;
    bool tail_valid = false;
    bool gate_overridden = false;
    double sum_truncated = 0.0;  // correction without the tail contribution
    double tail_value = 0.0;
    double gauss_constant = 0.0;
    SeriesMethod method = SeriesMethod::IntegerExact;
};

// Dimension gates: d > 4 for SAW/OP/CP, d > 6 for percolation; pass
// allow_low_d to compute anyway (gate_overridden is then set).
Prediction predict_pc(Model m, const Kernel& k, double tol = 1e-10,
                      bool allow_low_d = false);
Prediction predict_pc_continuum(Model m, int d, int L, double tol = 1e-10,
                                bool allow_low_d = false);

// f(eps) = 2 eps sum_{n>=0} (D*D*q^{*2n})(o) at p = 1 for the discretized
// one-step distribution; f(eps) -> sum_{n>=2} r_n as eps -> 0 and
// f(1) = 2 (r_2 + r_4 + ...).  Beyond the computed series the r_j are
// extended by the geometric tail model so truncation bias stays below tol.
double cp_epsilon_sum(const ReturnSeries& series, double eps, double tol = 1e-10);

enum class CompareVariant { AllFrom3, WeightedFrom3, EvenFrom2 };

struct CompareRow {
    int L = 0;
    double discrete = 0.0;           // lattice loop sum
    double continuum = 0.0;          // continuum loop sum (unscaled)
    double scaled_continuum = 0.0;   // beta * continuum
    double delta = 0.0;              // |discrete - scaled_continuum|
    double ratio = 0.0;              // delta / (beta / L)
    bool tails_valid = false;
};

// Discrete loop sums against their beta-scaled continuum limits; the ratio
// column should stay bounded as L grows (the discrepancy is O(beta/L)).
std::vector<CompareRow> compare_discrete_continuum(int d, std::span<const int> Ls,
                                                   CompareVariant variant,
                                                   double tol = 1e-10);

}  // namespace spreadout
