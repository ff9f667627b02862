#include <cmath>
#include <stdexcept>

#include "spreadout/continuum.hpp"
#include "spreadout/gmp_util.hpp"

namespace spreadout {

mpq_class continuum_center_density_exact(int n) {
    if (n < 1) throw std::invalid_argument("continuum_center_density_exact: n < 1");
    // Irwin-Hall at the midpoint, rescaled from [0,1] steps to [-1,1]:
    // v_n = 2^-n / (n-1)! * sum_{2k <= n} (-1)^k C(n,k) (n-2k)^{n-1}.
    mpz_class num = 0;
    for (int k = 0; 2 * k <= n; ++k) {
        mpz_class term = binomial(n, k) * pow_ui(mpz_class(n - 2 * k), n - 1);
        if (k % 2)
            num -= term;
        else
            num += term;
    }
    mpz_class den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), n);
    for (int j = 2; j < n; ++j) den *= j;
    return make_rational(num, den);
}

double continuum_center_density(int n) { return to_double(continuum_center_density_exact(n)); }

ContinuumReturns continuum_series(int d, int N) {
    if (d < 1) throw std::invalid_argument("continuum_series: d < 1");
    if (N < 1) throw std::invalid_argument("continuum_series: N < 1");
    ContinuumReturns c;
    c.d = d;
    c.v.assign(N + 1, 0.0);
    c.u.assign(N + 1, 0.0);
    c.v_exact.assign(N + 1, mpq_class(0));
    for (int n = 1; n <= N; ++n) {
        c.v_exact[n] = continuum_center_density_exact(n);
        c.v[n] = to_double(c.v_exact[n]);
        // u_n = v_n^d evaluated rationally, so large d stays exact until the
        // final rounding.
        mpq_class un = make_rational(pow_ui(mpz_class(c.v_exact[n].get_num()), d),
                                     pow_ui(mpz_class(c.v_exact[n].get_den()), d));
        c.u[n] = to_double(un);
    }
    c.gauss_constant = 0.0;
    for (int n = 1; n <= N; ++n)
        c.gauss_constant =
            std::max(c.gauss_constant, c.u[n] * std::pow(static_cast<double>(n), 0.5 * d));
    c.monotone_even = true;
    for (int m = 2; m + 2 <= N; m += 2)
        if (c.u[m + 2] > c.u[m] * (1.0 + 1e-13)) c.monotone_even = false;
    return c;
}

}  // namespace spreadout
