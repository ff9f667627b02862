#pragma once

// Spread-out step distributions D on Z^d with range L: the uniform punctured
// box D(x) = 1{0 < |x|_inf <= L} / ((2L+1)^d - 1), stored implicitly, and
// explicit tables symmetrized over the hyperoctahedral group.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spreadout/errors.hpp"

namespace spreadout {

enum class Profile { UniformBox, ExplicitTable };

struct Kernel {
    int d = 0;
    int L = 0;
    Profile profile = Profile::UniformBox;
    std::int64_t M = 0;   // (2L+1)^d
    double beta = 0.0;    // L^{-d}
    double sup_bound = 0.0;  // sup_x D(x) * L^d, < some C uniformly in L
    bool input_was_asymmetric = false;

    // Explicit table, offsets lexicographically sorted; empty for UniformBox.
    std::vector<std::int32_t> offsets;  // entries() * d ints
    std::vector<double> masses;

    std::size_t entries() const { return masses.size(); }
    std::span<const std::int32_t> offset(std::size_t i) const {
        return {offsets.data() + i * static_cast<std::size_t>(d),
                static_cast<std::size_t>(d)};
    }
    double mass(std::span<const std::int32_t> x) const;
    double max_mass() const;
};

// 1-D face density u = 1/(2L+1) on {-L..L} with the puncture folded in:
// D_hat(k) = (M * prod_j u_hat(k_j) - 1) / (M - 1) for the uniform box.
struct AxisFactorization {
    int d = 0;
    int L = 0;
    std::int64_t M = 0;
    double axis_mass = 0.0;  // 1/(2L+1)

    double axis_fourier(double kj) const;
    double fourier(std::span<const double> k) const;
};

Kernel make_uniform(int d, int L);
Kernel make_explicit(int d, int L, const std::vector<std::int32_t>& offs,
                     const std::vector<double>& masses);

AxisFactorization axis_factorization(const Kernel& k);

// Characteristic function D_hat(k) for k in [-pi, pi]^d (real by symmetry).
double fourier_eval(const Kernel& k, std::span<const double> kvec);

// U_hat(k) = prod_j sin(k_j)/k_j for the continuum block U = 2^-d 1{|x|_inf<=1},
// with a Taylor branch near k_j = 0.
double continuum_fourier(std::span<const double> kvec);

// Materialized support (offset list + per-offset mass).  For UniformBox this
// expands the punctured box; gated by a size budget.
struct SupportTable {
    int d = 0;
    std::vector<std::int32_t> offsets;
    std::vector<double> masses;
    std::size_t size() const { return masses.size(); }
};
SupportTable support_table(const Kernel& k, std::size_t max_entries = 20'000'000);

// Text format: header "d=<int> L=<int> profile=<uniform|table>", then for
// tables one "x1 .. xd mass" line per offset; '#' starts a comment.
Kernel load_kernel(const std::string& path);
void save_kernel(const Kernel& k, const std::string& path);

}  // namespace spreadout
