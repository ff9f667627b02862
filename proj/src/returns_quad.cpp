#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spreadout/returns.hpp"

namespace spreadout {

namespace {

double ipow(double base, int n) {
    double acc = 1.0, b = base;
    for (int e = n; e > 0; e >>= 1) {
        if (e & 1) acc *= b;
        b *= b;
    }
    return acc;
}

}  // namespace

// Midpoint-rule value of r_n = (2pi)^-d Int D-hat(k)^n dk on [-pi,pi]^d.
// D-hat^n is a trigonometric polynomial of per-axis degree n*L, and the
// midpoint rule on a full period integrates e^{imk} exactly whenever
// 0 < m < Q, so Q = n*L + 8 points per axis makes the rule exact up to
// rounding.  Partial sums are accumulated in fixed 4096-point blocks and
// the blocks combined in index order, so the result is bitwise identical
// for any thread count.
double fourier_quadrature_return(const Kernel& k, int n, bool parallel) {
    if (n < 0) throw std::invalid_argument("fourier_quadrature_return: n < 0");
    if (n == 0) return 1.0;
    const int d = k.d;
    const std::int64_t Q = static_cast<std::int64_t>(n) * k.L + 8;
    double tot_d = 1.0;
    for (int j = 0; j < d; ++j) tot_d *= static_cast<double>(Q);
    if (tot_d > 2e8)
        throw std::range_error("fourier_quadrature_return: " + std::to_string(Q) + "^" +
                               std::to_string(d) + " grid points exceed the 2e8 budget");
    const std::int64_t tot = static_cast<std::int64_t>(tot_d);

    const double step = 2.0 * std::numbers::pi / static_cast<double>(Q);
    std::vector<double> kgrid(Q);
    for (std::int64_t i = 0; i < Q; ++i)
        kgrid[i] = -std::numbers::pi + (static_cast<double>(i) + 0.5) * step;

    const bool uniform = k.profile == Profile::UniformBox;
    std::vector<double> axis;  // per-axis full-box transform at the grid points
    double Mf = 0.0;
    if (uniform) {
        AxisFactorization fac = axis_factorization(k);
        Mf = static_cast<double>(fac.M);
        axis.resize(Q);
        for (std::int64_t i = 0; i < Q; ++i) axis[i] = fac.axis_fourier(kgrid[i]);
    }

    const std::int64_t block = 4096;
    const std::int64_t nblocks = (tot + block - 1) / block;
    std::vector<double> bsum(nblocks, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const std::int64_t lo = b * block, hi = std::min(tot, lo + block);
        double acc = 0.0;
        double kvec[16];
        for (std::int64_t f = lo; f < hi; ++f) {
            std::int64_t rem = f;
            double val;
            if (uniform) {
                double prod = 1.0;
                for (int j = 0; j < d; ++j) {
                    prod *= axis[rem % Q];
                    rem /= Q;
                }
                val = (Mf * prod - 1.0) / (Mf - 1.0);
            } else {
                for (int j = 0; j < d; ++j) {
                    kvec[j] = kgrid[rem % Q];
                    rem /= Q;
                }
                val = fourier_eval(k, std::span<const double>(kvec, d));
            }
            acc += ipow(val, n);
        }
        bsum[b] = acc;
    }

    double sum = 0.0;
    for (std::int64_t b = 0; b < nblocks; ++b) sum += bsum[b];
    return sum / tot_d;
}

}  // namespace spreadout
