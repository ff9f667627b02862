#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "spreadout/diagrams.hpp"
#include "spreadout/gmp_util.hpp"

namespace spreadout {

namespace {

// ---------------------------------------------------------------------------
// Direct route: depth-first walk enumeration with on-path pruning.

struct DirectCtx {
    const SupportTable* sup = nullptr;
    int d = 0;
    int nmax = 0;
    bool integer = false;                 // uniform kernel: unit step weights
    std::vector<std::int64_t> counts;     // per length, integer route
    std::vector<double> weights;          // per length, explicit route
    std::vector<std::int32_t> path;       // visited vertices, flat d-tuples
};

bool on_path(const DirectCtx& c, const std::int32_t* p) {
    const std::size_t m = c.path.size() / c.d;
    for (std::size_t i = 0; i < m; ++i)
        if (std::memcmp(c.path.data() + i * c.d, p, sizeof(std::int32_t) * c.d) == 0)
            return true;
    return false;
}

void dfs(DirectCtx& c, const std::int32_t* pos, int depth, double w) {
    const std::size_t nsup = c.sup->size();
    std::int32_t np[16];
    for (std::size_t i = 0; i < nsup; ++i) {
        const std::int32_t* o = c.sup->offsets.data() + i * c.d;
        bool zero = true;
        for (int j = 0; j < c.d; ++j) {
            np[j] = pos[j] + o[j];
            if (np[j] != 0) zero = false;
        }
        if (zero) {
            if (c.integer)
                ++c.counts[depth + 1];
            else
                c.weights[depth + 1] += w * c.sup->masses[i];
            continue;
        }
        if (depth + 1 >= c.nmax) continue;
        if (on_path(c, np)) continue;
        c.path.insert(c.path.end(), np, np + c.d);
        dfs(c, np, depth + 1, c.integer ? 1.0 : w * c.sup->masses[i]);
        c.path.resize(c.path.size() - c.d);
    }
}

// ---------------------------------------------------------------------------
// Partition route: Moebius inversion over coincidence partitions of the loop
// times 0..n-1.  For a partition P, T(P) = #{returning walks whose co-blocked
// times share a position}; expanding each punctured-box step indicator as
// (full box) - (zero step) turns T(P) into a signed sum over edge subsets of
// window-only counts on coarser partitions, and those factorize over the d
// axes into 1-D frontier DPs.

// 1-D count of maps z: blocks(rgs) -> Z with z_{block(0)} = 0 and
// |z_{block(t+1)} - z_{block(t)}| <= L around the length-n cycle.
std::int64_t window_cycle_count(const std::vector<std::uint8_t>& rgs, int L) {
    const int n = static_cast<int>(rgs.size());
    int nb = 0;
    for (int t = 0; t < n; ++t) nb = std::max(nb, rgs[t] + 1);
    std::vector<int> first(nb, n), last(nb, -1);
    for (int t = 0; t < n; ++t) {
        first[rgs[t]] = std::min(first[rgs[t]], t);
        last[rgs[t]] = t;
    }

    // Live blocks (excluding the pinned block 0) after each time step.
    auto live_after = [&](int t) {
        std::vector<int> v;
        for (int b = 1; b < nb; ++b)
            if (first[b] <= t && (last[b] > t || rgs[t] == b)) v.push_back(b);
        return v;
    };

    std::map<std::vector<int>, std::int64_t> states;
    states[{}] = 1;  // after time 0: only the pinned block is placed
    std::vector<int> live_prev = live_after(0);
    // live_after(0) is empty or {rgs[0]} = {}, since rgs[0] = 0.

    for (int t = 1; t < n; ++t) {
        const int b = rgs[t];
        const int bprev = rgs[t - 1];
        const std::vector<int> live_cur = live_after(t);
        const std::int64_t R = static_cast<std::int64_t>(L) * std::min(t, n - t);
        std::map<std::vector<int>, std::int64_t> next;

        for (const auto& [st, cnt] : states) {
            auto pos_of = [&](int blk) -> std::int64_t {
                if (blk == 0) return 0;
                const auto it = std::lower_bound(live_prev.begin(), live_prev.end(), blk);
                return st[static_cast<std::size_t>(it - live_prev.begin())];
            };
            const std::int64_t zp = pos_of(bprev);

            auto emit = [&](std::int64_t znew) {
                std::vector<int> ns;
                ns.reserve(live_cur.size());
                for (int blk : live_cur)
                    ns.push_back(static_cast<int>(blk == b && first[b] == t ? znew
                                                                            : pos_of(blk)));
                next[ns] += cnt;
            };

            if (b == 0 || first[b] < t) {
                const std::int64_t z = (b == 0) ? 0 : pos_of(b);
                if (std::llabs(z - zp) <= L) emit(z);
            } else {
                for (std::int64_t z = std::max(zp - L, -R); z <= std::min(zp + L, R); ++z)
                    emit(z);
            }
        }
        states.swap(next);
        live_prev = live_cur;
    }

    // Closing edge (n-1, 0).
    std::int64_t total = 0;
    for (const auto& [st, cnt] : states) {
        const int b = rgs[n - 1];
        std::int64_t z = 0;
        if (b != 0) {
            const auto it = std::lower_bound(live_prev.begin(), live_prev.end(), b);
            z = st[static_cast<std::size_t>(it - live_prev.begin())];
        }
        if (std::llabs(z) <= L) total += cnt;
    }
    return total;
}

__int128 ipow128(std::int64_t base, int e) {
    __int128 r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

const double kBellLog2[17] = {0,     0,     1,     2.32,  3.91,  5.70,  7.67, 9.78,
                              12.02, 14.37, 16.82, 19.37, 22.01, 24.72, 27.51, 30.36,
                              33.29};

// Exact count of self-avoiding returning n-loops on the punctured box.
__int128 partition_loop_count(int n, int L, int d) {
    if (n > 16)
        throw std::range_error("partition route: loop length " + std::to_string(n) +
                               " > 16 unsupported");
    // The first block is pinned at 0 and every later block has at most 2L+1
    // placements, so any axis count is < (2L+1)^(n-1).
    const double lg_axis = (n - 1) * std::log2(2.0 * L + 1.0);
    double lg_fact = 0.0;
    for (int j = 2; j < n; ++j) lg_fact += std::log2(static_cast<double>(j));
    if (lg_axis > 62.0 || d * lg_axis + n + kBellLog2[n] + lg_fact > 120.0)
        throw std::range_error(
            "partition route: counts for n=" + std::to_string(n) + ", L=" + std::to_string(L) +
            ", d=" + std::to_string(d) + " would overflow 128-bit accumulation");

    std::unordered_map<std::string, std::int64_t> memo;
    auto h1 = [&](const std::vector<std::uint8_t>& rgs) {
        std::string key(rgs.begin(), rgs.end());
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const std::int64_t v = window_cycle_count(rgs, L);
        memo.emplace(std::move(key), v);
        return v;
    };

    __int128 total = 0;
    std::vector<std::uint8_t> a(n, 0), mx(n, 0);
    std::vector<int> parent, size_of;
    std::vector<std::uint8_t> merged(n), relabel;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    for (;;) {
        // Skip partitions with a cyclically adjacent co-blocked pair: the
        // forced zero step makes T(P) vanish on the punctured support.
        bool adjacent = false;
        for (int t = 0; t < n && !adjacent; ++t) adjacent = a[t] == a[(t + 1) % n];
        if (!adjacent) {
            const int nb = mx[n - 1] + 1;
            size_of.assign(nb, 0);
            for (int t = 0; t < n; ++t) ++size_of[a[t]];
            std::int64_t mu = 1;
            for (int b = 0; b < nb; ++b) {
                std::int64_t f = 1;
                for (int j = 2; j < size_of[b]; ++j) f *= j;
                mu *= (size_of[b] % 2 == 0) ? -f : f;
            }

            __int128 kp = 0;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                parent.assign(nb, 0);
                for (int b = 0; b < nb; ++b) parent[b] = b;
                for (int e = 0; e < n; ++e)
                    if (mask & (1u << e)) {
                        int ra = find(a[e]), rb = find(a[(e + 1) % n]);
                        if (ra != rb) parent[ra] = rb;
                    }
                relabel.assign(nb, 255);
                std::uint8_t nxt = 0;
                for (int t = 0; t < n; ++t) {
                    const int r = find(a[t]);
                    if (relabel[r] == 255) relabel[r] = nxt++;
                    merged[t] = relabel[r];
                }
                const __int128 term = ipow128(h1(merged), d);
                if (__builtin_popcount(mask) % 2)
                    kp -= term;
                else
                    kp += term;
            }
            total += static_cast<__int128>(mu) * kp;
        }

        // Next restricted growth string.
        int i = n - 1;
        while (i > 0 && a[i] > mx[i - 1]) --i;
        if (i == 0) break;
        ++a[i];
        mx[i] = std::max<std::uint8_t>(mx[i - 1], a[i]);
        for (int j = i + 1; j < n; ++j) {
            a[j] = 0;
            mx[j] = mx[i];
        }
    }
    return total;
}

}  // namespace

LoopEnumeration saw_loop_sum_route(const Kernel& k, int nmax, EnumerationRoute route) {
    if (nmax < 2) throw std::invalid_argument("saw_loop_sum: nmax < 2");
    LoopEnumeration out;
    out.d = k.d;
    out.L = k.L;
    out.nmax = nmax;
    out.route = route;
    out.saw_weight.assign(nmax + 1, 0.0);
    out.pi1_exact = 0;

    const bool uniform = k.profile == Profile::UniformBox;
    mpz_class steps = uniform ? mpz_class(k.M - 1) : mpz_class(0);

    if (route == EnumerationRoute::DirectEnumeration) {
        DirectCtx c;
        SupportTable sup = support_table(k);
        if (std::pow(static_cast<double>(sup.size()), nmax) > 1e9)
            throw std::range_error(
                "saw_loop_sum: direct enumeration over " + std::to_string(sup.size()) + "^" +
                std::to_string(nmax) + " walks exceeds the 1e9 budget");
        c.sup = &sup;
        c.d = k.d;
        c.nmax = nmax;
        c.integer = uniform;
        c.counts.assign(nmax + 1, 0);
        c.weights.assign(nmax + 1, 0.0);
        const std::int32_t origin[16] = {0};
        dfs(c, origin, 0, 1.0);
        if (uniform) {
            out.saw_exact.assign(nmax + 1, mpq_class(0));
            mpz_class den = 1;
            for (int n = 0; n <= nmax; ++n) {
                out.saw_exact[n] = make_rational(mpz_class(static_cast<long>(c.counts[n])), den);
                out.saw_weight[n] = to_double(out.saw_exact[n]);
                den *= steps;
            }
        } else {
            for (int n = 0; n <= nmax; ++n) out.saw_weight[n] = c.weights[n];
        }
    } else {
        if (!uniform)
            throw std::range_error(
                "saw_loop_sum: the partition route needs a uniform-box kernel");
        out.saw_exact.assign(nmax + 1, mpq_class(0));
        mpz_class den = steps * steps;
        for (int n = 2; n <= nmax; ++n) {
            const __int128 cnt = partition_loop_count(n, k.L, k.d);
            out.saw_exact[n] = make_rational(from_int128(cnt), den);
            out.saw_weight[n] = to_double(out.saw_exact[n]);
            den *= steps;
        }
    }

    ReturnSeries all = return_series(k, nmax);
    out.all_weight = all.r;
    for (int n = 2; n <= nmax; ++n) {
        out.pi1_truncated += out.saw_weight[n];
        if (!out.saw_exact.empty()) out.pi1_exact += out.saw_exact[n];
    }
    return out;
}

LoopEnumeration saw_loop_sum(const Kernel& k, int nmax) {
    const double branch = k.profile == Profile::UniformBox
                              ? static_cast<double>(k.M - 1)
                              : static_cast<double>(k.entries());
    const bool direct = std::pow(branch, nmax) <= 1e9;
    if (!direct && k.profile != Profile::UniformBox)
        throw std::range_error("saw_loop_sum: explicit kernel too large for direct enumeration");
    return saw_loop_sum_route(
        k, nmax,
        direct ? EnumerationRoute::DirectEnumeration : EnumerationRoute::PartitionCount);
}

SawBound saw_correction_bound(const ReturnSeries& series) {
    if (series.max_n() < 4)
        throw std::invalid_argument("saw_correction_bound: series must reach n = 4");
    const int N = series.max_n() & ~1;
    SawBound b;
    for (int n = 1; n <= N; ++n) b.walks_weighted += n * series.r[n];
    for (int n = 2; n <= N; ++n) b.walks_total += series.r[n];
    TailEstimate tw = tail_geometric_poly(series.r, series.d, N, 0.0, 1.0, 0.0, false);
    TailEstimate tt = tail_bound(series, N, TailWeight::Unit);
    b.walks_weighted += tw.value;
    b.walks_total += tt.value;
    b.tails_valid = tw.valid && tt.valid;
    b.value = b.walks_weighted * b.walks_total;
    return b;
}

void export_loops_csv(const LoopEnumeration& loops, std::ostream& out) {
    const bool rat = !loops.saw_exact.empty();
    out << "n,all_loops_weight,saw_loops_weight" << (rat ? ",saw_rational" : "") << "\n";
    char buf[40];
    for (int n = 2; n <= loops.nmax; ++n) {
        out << n << ',';
        std::snprintf(buf, sizeof buf, "%.17g", loops.all_weight[n]);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", loops.saw_weight[n]);
        out << buf;
        if (rat) out << ',' << rational_string(loops.saw_exact[n]);
        out << "\n";
    }
}

}  // namespace spreadout
