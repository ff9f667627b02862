#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spreadout/returns.hpp"

namespace spreadout {

namespace {

// One sliding-window pass along axis `a`: g <- sum of g over a (2L+1)-window.
// Input is supported on [-ep, ep] along `a`; output fills [-e, e], e = ep + L.
// Axes before `a` already have extent e, axes after it still ep (exts[] says
// which).  Each line is summed serially from its own prefix array, so results
// are bitwise identical for any thread count; lines split across threads.
void axis_window_pass(std::vector<double>& g, int d, int a, std::int64_t L,
                      std::int64_t ep, std::int64_t half,
                      const std::vector<std::size_t>& stride,
                      const std::vector<std::int64_t>& exts, bool parallel) {
    const std::int64_t e = ep + L;
    std::int64_t nlines = 1;
    for (int j = 0; j < d; ++j)
        if (j != a) nlines *= 2 * exts[j] + 1;
    const std::size_t sa = stride[a];

#ifndef _OPENMP
    (void)parallel;
#endif
#ifdef _OPENMP
#pragma omp parallel if (parallel)
#endif
    {
        std::vector<double> pref(static_cast<std::size_t>(2 * ep + 2));
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (std::int64_t lf = 0; lf < nlines; ++lf) {
            std::int64_t rem = lf;
            std::size_t base = 0;
            for (int j = d - 1; j >= 0; --j) {
                if (j == a) continue;
                const std::int64_t w = 2 * exts[j] + 1;
                base += static_cast<std::size_t>(rem % w + half - exts[j]) * stride[j];
                rem /= w;
            }
            pref[0] = 0.0;
            for (std::int64_t s = -ep; s <= ep; ++s)
                pref[s + ep + 1] =
                    pref[s + ep] + g[base + static_cast<std::size_t>(s + half) * sa];
            for (std::int64_t i = -e; i <= e; ++i) {
                const std::int64_t hi = std::min(i + L, ep);
                const std::int64_t lo = std::max(i - L, -ep);
                g[base + static_cast<std::size_t>(i + half) * sa] =
                    pref[hi + ep + 1] - pref[lo + ep];
            }
        }
    }
}

}  // namespace

ReturnSeries return_series_dense(const Kernel& k, int N, std::size_t mem_budget,
                                 bool parallel) {
    if (N < 0) throw std::invalid_argument("return_series_dense: N < 0");
    const int d = k.d, L = k.L;
    if (d > 16) throw std::invalid_argument("return_series_dense: d > 16");
    const std::int64_t side = 2 * static_cast<std::int64_t>(L) * N + 1;
    double cells_d = 1.0;
    for (int j = 0; j < d; ++j) cells_d *= static_cast<double>(side);
    if (16.0 * cells_d > static_cast<double>(mem_budget))
        throw std::range_error(
            "return_series_dense: grid of " + std::to_string(side) + "^" + std::to_string(d) +
            " doubles (two copies) exceeds the memory budget of " +
            std::to_string(mem_budget) + " bytes");
    const std::size_t cells = static_cast<std::size_t>(cells_d);

    const bool uniform = k.profile == Profile::UniformBox;
    SupportTable sup;  // only needed for explicit tables
    if (!uniform) sup = support_table(k);
    const std::size_t nsup = sup.size();

    std::vector<std::size_t> stride(d);
    stride[d - 1] = 1;
    for (int j = d - 2; j >= 0; --j)
        stride[j] = stride[j + 1] * static_cast<std::size_t>(side);
    const std::int64_t half = static_cast<std::int64_t>(L) * N;
    std::size_t center = 0;
    for (int j = 0; j < d; ++j) center += static_cast<std::size_t>(half) * stride[j];

    std::vector<double> cur(cells, 0.0), nxt(cells, 0.0);
    cur[center] = 1.0;

    ReturnSeries s;
    s.d = d;
    s.L = k.L;
    s.beta = k.beta;
    s.method = SeriesMethod::DenseConvolution;
    s.r.assign(N + 1, 0.0);
    s.r[0] = 1.0;

    const double inv_m = uniform ? 1.0 / static_cast<double>(k.M - 1) : 0.0;
    std::vector<std::int64_t> exts(d);
    for (int n = 1; n <= N; ++n) {
        const std::int64_t ext = static_cast<std::int64_t>(L) * n;
        const std::int64_t ext_prev = ext - L;

        if (uniform) {
            // D = (box - delta_0)/(M-1), so one step is d separable window
            // passes (the full box) followed by subtracting the input.
            nxt = cur;
            for (int a = 0; a < d; ++a) {
                for (int j = 0; j < d; ++j) exts[j] = j < a ? ext : ext_prev;
                axis_window_pass(nxt, d, a, L, ext_prev, half, stride, exts, parallel);
            }
            std::int64_t box = 1;
            for (int j = 0; j < d; ++j) box *= 2 * ext + 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
            for (std::int64_t f = 0; f < box; ++f) {
                std::int64_t rem = f;
                std::size_t idx = 0;
                for (int j = d - 1; j >= 0; --j) {
                    idx += static_cast<std::size_t>(rem % (2 * ext + 1) + half - ext) * stride[j];
                    rem /= 2 * ext + 1;
                }
                nxt[idx] = (nxt[idx] - cur[idx]) * inv_m;
            }
        } else {
            // Direct support loop; explicit tables are small so this is fine.
            std::int64_t box = 1;
            for (int j = 0; j < d; ++j) box *= 2 * ext + 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
            for (std::int64_t f = 0; f < box; ++f) {
                std::int64_t rem = f;
                std::int64_t x[16];
                for (int j = d - 1; j >= 0; --j) {
                    x[j] = rem % (2 * ext + 1) - ext;
                    rem /= 2 * ext + 1;
                }
                double acc = 0.0;
                for (std::size_t i = 0; i < nsup; ++i) {
                    const std::int32_t* o = sup.offsets.data() + i * d;
                    std::size_t idx = 0;
                    bool inside = true;
                    for (int j = 0; j < d; ++j) {
                        const std::int64_t y = x[j] - o[j];
                        if (y < -ext_prev || y > ext_prev) {
                            inside = false;
                            break;
                        }
                        idx += static_cast<std::size_t>(y + half) * stride[j];
                    }
                    if (inside) acc += cur[idx] * sup.masses[i];
                }
                std::size_t out_idx = 0;
                for (int j = 0; j < d; ++j)
                    out_idx += static_cast<std::size_t>(x[j] + half) * stride[j];
                nxt[out_idx] = acc;
            }
        }
        cur.swap(nxt);
        s.r[n] = cur[center];

        // Mass conservation check over the current extent (Kahan).
        double sum = 0.0, comp = 0.0;
        std::int64_t rows = 1;
        for (int j = 0; j < d - 1; ++j) rows *= 2 * ext + 1;
        for (std::int64_t rwf = 0; rwf < rows; ++rwf) {
            std::int64_t rem = rwf;
            std::size_t base = 0;
            for (int j = d - 2; j >= 0; --j) {
                const std::int64_t c = rem % (2 * ext + 1) - ext;
                rem /= 2 * ext + 1;
                base += static_cast<std::size_t>(c + half) * stride[j];
            }
            for (std::int64_t c = -ext; c <= ext; ++c) {
                const double val = cur[base + static_cast<std::size_t>(c + half)];
                const double y = val - comp;
                const double t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::runtime_error("return_series_dense: convolution lost normalization at n=" +
                                     std::to_string(n));
    }
    finalize_series_stats(s);
    return s;
}

}  // namespace spreadout
