#pragma once

// Lace-expansion-style loop quantities: the weight of self-avoiding returning
// loops per length (the leading expansion coefficient keeps exactly these),
// and the bound (sum_n n r_n)(sum_n r_n) on the self-intersecting remainder.

#include <gmpxx.h>

#include <vector>

#include "spreadout/kernels.hpp"
#include "spreadout/returns.hpp"

namespace spreadout {

enum class EnumerationRoute { DirectEnumeration, PartitionCount };

struct LoopEnumeration {
    int d = 0;
    int L = 0;
    int nmax = 0;
    EnumerationRoute route = EnumerationRoute::DirectEnumeration;
    std::vector<double> all_weight;  // index n: total returning-walk weight r_n
    std::vector<double> saw_weight;  // index n: self-avoiding returning loops only
    std::vector<mpq_class> saw_exact;  // populated for uniform kernels
    double pi1_truncated = 0.0;        // sum_{n=2}^{nmax} saw_weight[n]
    mpq_class pi1_exact;               // same, exact when available
};

// Direct depth-first enumeration is used when (M-1)^nmax <= 1e9; uniform
// kernels beyond that budget switch to an exact partition-lattice count
// (Moebius inversion over coincidence patterns of the loop's vertices, each
// pattern evaluated as an axis-factorized 1-D frontier DP).
LoopEnumeration saw_loop_sum(const Kernel& k, int nmax);

// Force one route (cross-validation, benchmarks); the partition route needs a
// uniform kernel.
LoopEnumeration saw_loop_sum_route(const Kernel& k, int nmax, EnumerationRoute route);

struct SawBound {
    double value = 0.0;  // (sum_{n>=1} n r_n) * (sum_{n>=2} r_n)
    double walks_weighted = 0.0;
    double walks_total = 0.0;
    bool tails_valid = false;
};
SawBound saw_correction_bound(const ReturnSeries& series);

void export_loops_csv(const LoopEnumeration& loops, std::ostream& out);

}  // namespace spreadout
