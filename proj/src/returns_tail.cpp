#include <cmath>
#include <stdexcept>
#include <string>

#include "spreadout/returns.hpp"

namespace spreadout {

// Geometric-ratio tail for sums of poly(n) * r_n past a truncation point.
//
// Model: beyond n = from, same-parity terms decay by a constant ratio
// lambda = r_from / r_{from-2}, so
//   r_{from+2k}   ~ r_from   * lambda^k      (k >= 1)
//   r_{from+1+2k} ~ r_{from-1} * lambda^{k+1} (k >= 0)
// and poly(n) = c0 + c1 n + c2 n^2 is resummed exactly against the
// geometric series.  The estimate is only trusted when lambda < 1, the
// even subsequence is non-increasing, and the dimension is high enough
// for the weighted series to converge at the random-walk decay rate
// r_n ~ n^{-d/2} (degree 0 needs d > 2, degree 1 needs d > 4, degree 2
// needs d > 6).  Otherwise valid=false and the value is pinned to 0 so
// callers never fold an untrusted number into a reported sum.
TailEstimate tail_geometric_poly(std::span<const double> r, int d, int from,
                                 double c0, double c1, double c2, bool even_only) {
    if (from < 2) throw std::invalid_argument("tail_geometric_poly: from < 2");
    if (from % 2 != 0) throw std::invalid_argument("tail_geometric_poly: from must be even");
    if (static_cast<std::size_t>(from) >= r.size())
        throw std::invalid_argument("tail_geometric_poly: from=" + std::to_string(from) +
                                    " is past the end of the series");

    TailEstimate t;
    t.from = from;
    t.value = 0.0;
    t.lambda = 0.0;
    t.valid = false;

    const double rN = r[from];
    const double rNm2 = r[from - 2];
    if (!(rNm2 > 0.0) || rN < 0.0) return t;
    const double lam = rN / rNm2;
    t.lambda = lam;
    if (!(lam < 1.0)) return t;

    // Even subsequence must be non-increasing up to the cut.
    for (int n = 2; n + 2 <= from; n += 2)
        if (r[n + 2] > r[n] * (1.0 + 1e-13)) return t;

    int degree = 0;
    if (c1 != 0.0) degree = 1;
    if (c2 != 0.0) degree = 2;
    if (d <= 2 * (degree + 1)) return t;

    const double om = 1.0 - lam;
    const double s0 = lam / om;                          // sum_{k>=1} lam^k
    const double s1 = lam / (om * om);                   // sum_{k>=1} k lam^k
    const double s2 = lam * (1.0 + lam) / (om * om * om);  // sum_{k>=1} k^2 lam^k

    const double N = static_cast<double>(from);
    double value = rN * ((c0 + c1 * N + c2 * N * N) * s0 + (2 * c1 + 4 * c2 * N) * s1 +
                         4 * c2 * s2);

    if (!even_only) {
        const double rNm1 = r[from - 1];
        if (rNm1 < 0.0) return t;
        const double M = N + 1.0;
        // sum_{k>=0} (A' + B' k + C' k^2) lam^{k+1}
        value += rNm1 * lam *
                 ((c0 + c1 * M + c2 * M * M) / om + (2 * c1 + 4 * c2 * M) * s1 +
                  4 * c2 * s2);
    }

    t.value = value;
    t.valid = true;
    return t;
}

TailEstimate tail_bound(const ReturnSeries& s, int from, TailWeight weight) {
    switch (weight) {
        case TailWeight::Unit:
            return tail_geometric_poly(s.r, s.d, from, 1.0, 0.0, 0.0, false);
        case TailWeight::NPlus1:
            return tail_geometric_poly(s.r, s.d, from, 1.0, 1.0, 0.0, false);
        case TailWeight::EvenOnly:
            return tail_geometric_poly(s.r, s.d, from, 1.0, 0.0, 0.0, true);
    }
    throw std::invalid_argument("tail_bound: unknown weight");
}

}  // namespace spreadout
