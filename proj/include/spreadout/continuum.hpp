#pragma once

// Continuum (L -> infinity) counterpart: U = 2^-d on the unit box, whose
// n-fold self-convolution at the origin is v_n^d with v_n the center density
// of a sum of n iid Uniform[-1,1] variables (Irwin-Hall type closed form,
// evaluated in exact rational arithmetic; the alternating sum cancels too
// violently for doubles).

#include <gmpxx.h>

#include <vector>

namespace spreadout {

struct ContinuumReturns {
    int d = 0;
    std::vector<double> v;         // v[n], n = 0..N; v[0] = 0 sentinel, v[1] = 1/2
    std::vector<double> u;         // u[n] = v[n]^d = U^{*n}(o)
    std::vector<mpq_class> v_exact;
    double gauss_constant = 0.0;   // max_{1<=n<=N} u_n n^{d/2}
    bool monotone_even = true;     // u_{2n+2} <= u_{2n} for n >= 1

    int max_n() const { return static_cast<int>(u.size()) - 1; }
};

// v_n = 2^-n / (n-1)! * sum_{k<=n/2} (-1)^k C(n,k) (n-2k)^{n-1}, n >= 1.
mpq_class continuum_center_density_exact(int n);
double continuum_center_density(int n);

ContinuumReturns continuum_series(int d, int N = 200);

}  // namespace spreadout
