#pragma once

// Return probabilities r_n = D^{*n}(o) of the spread-out step distribution,
// by several independent routes (exact integer counting, dense convolution,
// Fourier-grid quadrature), plus geometric tail estimates and the discretized
// one-step distribution q = (1-eps) delta + eps p D at p = 1.

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

#include "spreadout/kernels.hpp"

namespace spreadout {

enum class SeriesMethod { IntegerExact, DenseConvolution, FourierQuadrature, ContinuumClosedForm };
enum class TailWeight { Unit, NPlus1, EvenOnly };

const char* series_method_name(SeriesMethod m);
SeriesMethod series_method_from_string(const std::string& s);

struct TailEstimate {
    double value = 0.0;   // estimated sum over n > from; 0 when invalid
    double lambda = 0.0;  // fitted even-step ratio r_from / r_{from-2}
    bool valid = false;
    int from = 0;
};

struct ReturnSeries {
    int d = 0;
    int L = 0;  // 0 for continuum-limit series
    double beta = 0.0;
    SeriesMethod method = SeriesMethod::IntegerExact;
    std::vector<double> r;         // r[n] for n = 0..max_n(); r[0] = 1, r[1] = 0
    std::vector<mpq_class> exact;  // populated by the integer route, else empty
    double gauss_constant = 0.0;   // max_{1<=n<=N} r_n n^{d/2} / beta
    bool monotone_even = true;     // r_{2n+2} <= r_{2n} held for all 1 <= n, 2n+2 <= N

    int max_n() const { return static_cast<int>(r.size()) - 1; }
};

// 1-D full-box step counts N_j and punctured-box closed-walk counts
// W_n = sum_j C(n,j) (-1)^{n-j} N_j^d, all exact.
struct IntegerCounts {
    std::vector<mpz_class> axis_counts;  // N_j, j = 0..N
    std::vector<mpz_class> closed_walks;  // W_n, n = 0..N
    mpz_class steps;                      // M - 1
};
IntegerCounts return_counts_integer(const Kernel& k, int N);

ReturnSeries return_series_integer(const Kernel& k, int N);

// Iterated dense convolution on the exact support [-nL, nL]^d, no wraparound.
// Throws std::range_error naming the limit if the grid exceeds mem_budget bytes.
ReturnSeries return_series_dense(const Kernel& k, int N,
                                 std::size_t mem_budget = std::size_t{2} << 30,
                                 bool parallel = true);

// Dispatcher: integer route for uniform kernels, dense otherwise.
ReturnSeries return_series(const Kernel& k, int N);

// Truncation policy: first even N with r_N < tol * beta and a valid unit-weight
// tail, capped at n_cap.
ReturnSeries compute_series(const Kernel& k, double tol = 1e-10, int n_cap = 200);

// r_n = (2pi)^-d int D_hat(k)^n dk by tensor-grid quadrature; the grid beats
// the trigonometric degree n*L, so the rule is exact up to rounding.
double fourier_quadrature_return(const Kernel& k, int n, bool parallel = true);

// q^{*n}(o) at p = 1 for q = (1-eps) delta_o + eps D, via the binomial
// expansion over the r_j; needs n <= series.max_n().
double discretized_return(const ReturnSeries& series, double eps, int n);

// Geometric tail over indices n > from with ratio lambda = r_from/r_{from-2}:
// even terms extrapolate r_from, odd terms r_{from-1}.  Valid only when
// lambda < 1, even-monotonicity held, and the random walk is transient enough
// for the requested weight (unit/even d > 2, linear weights d > 4,
// quadratic weights d > 6); invalid estimates carry value 0.
TailEstimate tail_bound(const ReturnSeries& series, int from, TailWeight weight);

// Weight w(n) = c0 + c1 n + c2 n^2, optionally restricted to even n.
TailEstimate tail_geometric_poly(std::span<const double> r, int d, int from,
                                 double c0, double c1, double c2, bool even_only);

void export_series_csv(const ReturnSeries& series, std::ostream& out,
                       bool include_rational = false);

// Recompute gauss_constant and the even-monotonicity flag from r.
void finalize_series_stats(ReturnSeries& series);

}  // namespace spreadout
