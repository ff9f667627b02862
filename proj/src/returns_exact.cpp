#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "spreadout/gmp_util.hpp"
#include "spreadout/returns.hpp"

namespace spreadout {

const char* series_method_name(SeriesMethod m) {
    switch (m) {
        case SeriesMethod::IntegerExact: return "integer";
        case SeriesMethod::DenseConvolution: return "dense";
        case SeriesMethod::FourierQuadrature: return "quadrature";
        case SeriesMethod::ContinuumClosedForm: return "continuum";
    }
    return "?";
}

SeriesMethod series_method_from_string(const std::string& s) {
    if (s == "integer") return SeriesMethod::IntegerExact;
    if (s == "dense") return SeriesMethod::DenseConvolution;
    if (s == "quadrature") return SeriesMethod::FourierQuadrature;
    if (s == "continuum") return SeriesMethod::ContinuumClosedForm;
    throw std::invalid_argument("unknown series method: " + s);
}

void finalize_series_stats(ReturnSeries& s) {
    const int N = s.max_n();
    s.gauss_constant = 0.0;
    for (int n = 1; n <= N; ++n)
        s.gauss_constant = std::max(
            s.gauss_constant, s.r[n] * std::pow(static_cast<double>(n), 0.5 * s.d) / s.beta);
    s.monotone_even = true;
    for (int m = 2; m + 2 <= N; m += 2)
        if (s.r[m + 2] > s.r[m] * (1.0 + 1e-13)) s.monotone_even = false;
}

IntegerCounts return_counts_integer(const Kernel& k, int N) {
    if (k.profile != Profile::UniformBox)
        throw std::invalid_argument("return_counts_integer: needs a uniform-box kernel");
    if (N < 0) throw std::invalid_argument("return_counts_integer: N < 0");
    const int L = k.L, d = k.d;

    IntegerCounts out;
    out.steps = pow_ui(mpz_class(2 * L + 1), d) - 1;
    out.axis_counts.assign(N + 1, 0);
    out.closed_walks.assign(N + 1, 0);
    out.axis_counts[0] = 1;

    // 1-D full-box counts by convolving with the all-ones window of width
    // 2L+1; prefix sums turn each step into a sliding-window difference.
    std::vector<mpz_class> cur(1, mpz_class(1));  // j = 0: delta at x = 0
    std::vector<mpz_class> pref, nxt;
    for (int j = 1; j <= N; ++j) {
        const int rp = (j - 1) * L, rn = j * L;
        pref.assign(cur.size() + 1, mpz_class(0));
        for (std::size_t i = 0; i < cur.size(); ++i) pref[i + 1] = pref[i] + cur[i];
        nxt.assign(2 * rn + 1, mpz_class(0));
        for (int x = -rn; x <= rn; ++x) {
            const int lo = std::max(x - L, -rp), hi = std::min(x + L, rp);
            if (lo <= hi) nxt[x + rn] = pref[hi + rp + 1] - pref[lo + rp];
        }
        cur.swap(nxt);
        out.axis_counts[j] = cur[rn];
    }

    // Punctured box by inclusion-exclusion over the zero steps:
    // W_n = sum_j C(n,j) (-1)^{n-j} N_j^d.
    std::vector<mpz_class> axis_pow(N + 1);
    for (int j = 0; j <= N; ++j) axis_pow[j] = pow_ui(out.axis_counts[j], d);
    for (int n = 0; n <= N; ++n) {
        mpz_class w = 0;
        for (int j = 0; j <= n; ++j) {
            mpz_class term = binomial(n, j) * axis_pow[j];
            if ((n - j) % 2)
                w -= term;
            else
                w += term;
        }
        out.closed_walks[n] = w;
    }
    return out;
}

ReturnSeries return_series_integer(const Kernel& k, int N) {
    IntegerCounts c = return_counts_integer(k, N);
    ReturnSeries s;
    s.d = k.d;
    s.L = k.L;
    s.beta = k.beta;
    s.method = SeriesMethod::IntegerExact;
    s.r.resize(N + 1);
    s.exact.resize(N + 1);
    mpz_class den = 1;
    for (int n = 0; n <= N; ++n) {
        s.exact[n] = make_rational(c.closed_walks[n], den);
        s.r[n] = to_double(s.exact[n]);
        den *= c.steps;
    }
    finalize_series_stats(s);
    return s;
}

ReturnSeries return_series(const Kernel& k, int N) {
    if (k.profile == Profile::UniformBox) return return_series_integer(k, N);
    return return_series_dense(k, N);
}

ReturnSeries compute_series(const Kernel& k, double tol, int n_cap) {
    if (n_cap < 4) throw std::invalid_argument("compute_series: cap below 4");
    int cap = n_cap;
    if (k.profile == Profile::ExplicitTable) {
        // Keep the dense grid within its memory budget.
        const std::size_t budget = std::size_t{2} << 30;
        while (cap > 4) {
            const double side = 2.0 * k.L * cap + 1.0;
            if (16.0 * std::pow(side, k.d) <= static_cast<double>(budget)) break;
            cap -= 2;
        }
    }
    ReturnSeries s = return_series(k, cap);
    for (int N = 4; N <= s.max_n(); N += 2) {
        if (s.r[N] < tol * s.beta &&
            tail_geometric_poly(std::span<const double>(s.r.data(), N + 1), s.d, N, 1, 0, 0,
                                false)
                .valid) {
            s.r.resize(N + 1);
            if (!s.exact.empty()) s.exact.resize(N + 1);
            finalize_series_stats(s);
            return s;
        }
    }
    return s;
}

double discretized_return(const ReturnSeries& series, double eps, int n) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("discretized_return: eps outside [0, 1]");
    if (n < 0 || n > series.max_n())
        throw std::invalid_argument("discretized_return: n outside the computed series");
    if (n == 0) return 1.0;
    if (eps == 0.0) return 1.0;  // q = delta, stays at the origin
    if (eps == 1.0) return series.r[n];

    // Binomial(n, eps) pmf by ratio recursion from the mode (robust against
    // underflow of (1-eps)^n for eps near 1).
    const int mode = std::clamp(static_cast<int>((n + 1) * eps), 0, n);
    auto lchoose = [](int a, int b) {
        return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
    };
    const double lp = std::log(eps), lq = std::log1p(-eps);
    std::vector<double> pmf(n + 1, 0.0);
    pmf[mode] = std::exp(lchoose(n, mode) + mode * lp + (n - mode) * lq);
    const double odds = eps / (1.0 - eps);
    for (int j = mode; j < n; ++j)
        pmf[j + 1] = pmf[j] * (static_cast<double>(n - j) / (j + 1)) * odds;
    for (int j = mode; j > 0; --j)
        pmf[j - 1] = pmf[j] * (static_cast<double>(j) / (n - j + 1)) / odds;

    double acc = 0.0;
    for (int j = 0; j <= n; ++j) acc += pmf[j] * series.r[j];
    return acc;
}

void export_series_csv(const ReturnSeries& s, std::ostream& out, bool include_rational) {
    const bool rat = include_rational && !s.exact.empty();
    out << "n,r_n,method,d,L" << (rat ? ",rational" : "") << "\n";
    char buf[40];
    for (int n = 0; n <= s.max_n(); ++n) {
        std::snprintf(buf, sizeof buf, "%.17g", s.r[n]);
        out << n << ',' << buf << ',' << series_method_name(s.method) << ',' << s.d << ',' << s.L;
        if (rat) out << ',' << rational_string(s.exact[n]);
        out << "\n";
    }
}

}  // namespace spreadout
