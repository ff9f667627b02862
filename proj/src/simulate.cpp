#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spreadout/rng.hpp"
#include "spreadout/simulate.hpp"

namespace spreadout {

namespace {

// Stream tags; p is deliberately absent from every key so that re-running at
// a different bond strength replays the same underlying uniforms (CRN).
constexpr std::uint64_t kTagReturn = 1;
constexpr std::uint64_t kTagSurvival = 2;
constexpr std::uint64_t kTagDouble = 3;

ThreefryBlock chain(ThreefryBlock k, std::uint64_t a, std::uint64_t b) {
    k = threefry2x32(k.x0, k.x1, static_cast<std::uint32_t>(a),
                     static_cast<std::uint32_t>(a >> 32));
    k = threefry2x32(k.x0, k.x1, static_cast<std::uint32_t>(b),
                     static_cast<std::uint32_t>(b >> 32));
    return k;
}

// Smallest k with P(Bin(m, q) <= k) > u, by pmf ratio recursion from 0.
// Nondecreasing in q for fixed u, which carries the CRN monotonicity.
std::int64_t binom_inv(std::int64_t m, double q, double u) {
    if (q <= 0.0) return 0;
    if (q >= 1.0) return m;
    double pmf = std::pow(1.0 - q, static_cast<double>(m));
    double cum = pmf;
    std::int64_t k = 0;
    const double odds = q / (1.0 - q);
    while (u >= cum && k < m) {
        ++k;
        pmf *= static_cast<double>(m - k + 1) / static_cast<double>(k) * odds;
        cum += pmf;
        if (pmf < 1e-300) break;
    }
    return k;
}

std::int64_t poisson_inv(double lambda, double u) {
    double pmf = std::exp(-lambda);
    double cum = pmf;
    std::int64_t k = 0;
    while (u >= cum) {
        ++k;
        pmf *= lambda / static_cast<double>(k);
        cum += pmf;
        if (pmf < 1e-300) break;
    }
    return k;
}

void decode_uniform_offset(const Kernel& k, std::uint64_t idx, std::int32_t* out) {
    // idx in [0, M-2]; the origin sits at the centre of the lexicographic box
    if (idx >= static_cast<std::uint64_t>((k.M - 1) / 2)) ++idx;
    const std::uint64_t side = 2 * static_cast<std::uint64_t>(k.L) + 1;
    for (int a = k.d - 1; a >= 0; --a) {
        out[a] = static_cast<std::int32_t>(idx % side) - k.L;
        idx /= side;
    }
}

void validate(const Kernel& k, double p, const SimConfig& cfg) {
    // 100 trials is the floor for quoting an estimate with a standard error.
    if (cfg.trials < 100) throw std::invalid_argument("simulate: trials < 100");
    if (cfg.horizon < 0) throw std::invalid_argument("simulate: horizon < 0");
    if (cfg.max_active < 1) throw std::invalid_argument("simulate: max_active < 1");
    if (!(p >= 0.0)) throw std::invalid_argument("simulate: p < 0");
    if (p * k.max_mass() > 1.0 + 1e-12)
        throw std::invalid_argument("simulate: p D(x) exceeds 1 at the heaviest offset");
    if (k.profile == Profile::UniformBox && static_cast<std::uint64_t>(k.M - 1) > UINT32_MAX)
        throw std::invalid_argument("simulate: kernel support too large to sample");
    if (cfg.poisson_offspring && !cfg.ignore_collisions)
        throw std::invalid_argument("simulate: poisson_offspring needs ignore_collisions");
}

// Children of one parent as offset tuples appended to `out` (d ints each).
// One content-keyed stream per parent: a Binomial(M-1, p/(M-1)) count followed
// by that many distinct uniform offsets for the uniform kernel (the drawn set
// for a smaller count is a prefix subset of the set for a larger one), or a
// per-entry Bernoulli sweep for explicit tables.
void sample_children(const Kernel& k, double p, RngStream& st,
                     std::vector<std::int32_t>& out) {
    if (k.profile == Profile::UniformBox) {
        const std::int64_t m = k.M - 1;
        const std::int64_t cnt = binom_inv(m, p / static_cast<double>(m), st.next_unit());
        std::int32_t buf[16];
        std::vector<std::uint32_t> picked;
        picked.reserve(cnt);
        for (std::int64_t i = 0; i < cnt; ++i) {
            std::uint32_t idx;
            do {
                idx = st.next_below(static_cast<std::uint32_t>(m));
            } while (std::find(picked.begin(), picked.end(), idx) != picked.end());
            picked.push_back(idx);
            decode_uniform_offset(k, idx, buf);
            out.insert(out.end(), buf, buf + k.d);
        }
    } else {
        for (std::size_t i = 0; i < k.entries(); ++i) {
            if (st.next_unit() < p * k.masses[i]) {
                auto o = k.offset(i);
                out.insert(out.end(), o.begin(), o.end());
            }
        }
    }
}

std::int64_t ghost_offspring(const Kernel& k, double p, bool poisson, RngStream& st) {
    if (poisson) return poisson_inv(p, st.next_unit());
    if (k.profile == Profile::UniformBox) {
        const std::int64_t m = k.M - 1;
        return binom_inv(m, p / static_cast<double>(m), st.next_unit());
    }
    std::int64_t c = 0;
    for (std::size_t i = 0; i < k.entries(); ++i)
        if (st.next_unit() < p * k.masses[i]) ++c;
    return c;
}

bool ghost_trial(const Kernel& k, double p, const SimConfig& cfg, ThreefryBlock tkey,
                 bool& flagged) {
    std::int64_t z = 1;
    for (int t = 0; t < cfg.horizon; ++t) {
        std::int64_t nz = 0;
        for (std::int64_t i = 0; i < z; ++i) {
            ThreefryBlock b =
                chain(tkey, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i));
            RngStream st(b.x0, b.x1);
            nz += ghost_offspring(k, p, cfg.poisson_offspring, st);
        }
        if (nz == 0) return false;
        if (nz > cfg.max_active) {
            flagged = true;
            return true;
        }
        z = nz;
    }
    return true;
}

bool collision_trial(const Kernel& k, double p, const SimConfig& cfg, ThreefryBlock tkey,
                     bool& flagged) {
    const int d = k.d;
    std::vector<std::int32_t> cur(d, 0);  // flat list of occupied sites
    std::vector<std::int32_t> nxt, kid;
    for (int t = 0; t < cfg.horizon; ++t) {
        nxt.clear();
        const std::size_t nsites = cur.size() / d;
        for (std::size_t s = 0; s < nsites; ++s) {
            const std::int32_t* x = cur.data() + s * d;
            ThreefryBlock b = chain(tkey, static_cast<std::uint64_t>(t),
                                    site_hash(std::span<const std::int32_t>(x, d)));
            RngStream st(b.x0, b.x1);
            kid.clear();
            sample_children(k, p, st, kid);
            for (std::size_t c = 0; c * d < kid.size(); ++c)
                for (int j = 0; j < d; ++j) nxt.push_back(x[j] + kid[c * d + j]);
        }
        // Dedup occupied children.
        const std::size_t nkids = nxt.size() / d;
        std::vector<std::size_t> order(nkids);
        for (std::size_t i = 0; i < nkids; ++i) order[i] = i;
        auto less = [&](std::size_t a2, std::size_t b2) {
            return std::lexicographical_compare(nxt.begin() + a2 * d, nxt.begin() + (a2 + 1) * d,
                                                nxt.begin() + b2 * d, nxt.begin() + (b2 + 1) * d);
        };
        auto eq = [&](std::size_t a2, std::size_t b2) {
            return std::equal(nxt.begin() + a2 * d, nxt.begin() + (a2 + 1) * d,
                              nxt.begin() + b2 * d);
        };
        std::sort(order.begin(), order.end(), less);
        cur.clear();
        for (std::size_t i = 0; i < nkids; ++i) {
            if (i > 0 && eq(order[i], order[i - 1])) continue;
            cur.insert(cur.end(), nxt.begin() + order[i] * d, nxt.begin() + (order[i] + 1) * d);
        }
        if (cur.empty()) return false;
        if (static_cast<std::int64_t>(cur.size() / d) > cfg.max_active) {
            flagged = true;
            return true;
        }
    }
    return true;
}

struct SurvivalCounts {
    std::int64_t survivors = 0;
    std::int64_t flagged = 0;
};

SurvivalCounts survival_eval(const Kernel& k, double p, const SimConfig& cfg,
                             std::uint8_t* survived_out) {
    validate(k, p, cfg);
    const int W = resolve_workers(cfg.workers);
    std::int64_t survivors = 0, flagged = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(W) reduction(+ : survivors, flagged)
#else
    (void)W;
#endif
    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
        ThreefryBlock tkey = derive_key(cfg.seed, kTagSurvival, static_cast<std::uint64_t>(trial));
        bool flag = false;
        const bool alive = cfg.ignore_collisions ? ghost_trial(k, p, cfg, tkey, flag)
                                                 : collision_trial(k, p, cfg, tkey, flag);
        if (alive) ++survivors;
        if (flag) ++flagged;
        if (survived_out) survived_out[trial] = alive ? 1 : 0;
    }
    return {survivors, flagged};
}

}  // namespace

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPREADOUT_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

SimEstimate mc_return(const Kernel& k, int n, const SimConfig& cfg) {
    if (n < 0) throw std::invalid_argument("mc_return: n < 0");
    validate(k, 1.0, cfg);
    const int d = k.d, L = k.L;

    std::vector<double> cum;  // explicit-table cdf
    if (k.profile == Profile::ExplicitTable) {
        cum.resize(k.entries());
        double acc = 0.0;
        for (std::size_t i = 0; i < k.entries(); ++i) {
            acc += k.masses[i];
            cum[i] = acc;
        }
    }

    const int W = resolve_workers(cfg.workers);
    std::int64_t hits = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(W) reduction(+ : hits)
#else
    (void)W;
#endif
    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
        ThreefryBlock key = derive_key(cfg.seed, kTagReturn | (static_cast<std::uint64_t>(n) << 8),
                                       static_cast<std::uint64_t>(trial));
        RngStream st(key.x0, key.x1);
        std::int64_t pos[16] = {0};
        for (int step = 0; step < n; ++step) {
            if (k.profile == Profile::UniformBox) {
                std::int32_t delta[16];
                bool zero = true;
                do {
                    zero = true;
                    for (int j = 0; j < d; ++j) {
                        delta[j] = static_cast<std::int32_t>(st.next_below(2 * L + 1)) - L;
                        if (delta[j] != 0) zero = false;
                    }
                } while (zero);
                for (int j = 0; j < d; ++j) pos[j] += delta[j];
            } else {
                const double u = st.next_unit();
                std::size_t i =
                    std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
                if (i >= k.entries()) i = k.entries() - 1;
                auto o = k.offset(i);
                for (int j = 0; j < d; ++j) pos[j] += o[j];
            }
        }
        bool at_origin = true;
        for (int j = 0; j < d; ++j)
            if (pos[j] != 0) at_origin = false;
        if (at_origin) ++hits;
    }

    SimEstimate e;
    e.trials = cfg.trials;
    e.seed = cfg.seed;
    e.value = static_cast<double>(hits) / static_cast<double>(cfg.trials);
    e.std_error = std::sqrt(std::max(e.value * (1.0 - e.value), 0.0) /
                            static_cast<double>(cfg.trials));
    return e;
}

SimEstimate mc_return_serial(const Kernel& k, int n, const SimConfig& cfg) {
    SimConfig c = cfg;
    c.workers = 1;
    return mc_return(k, n, c);
}

SimEstimate op_survival(const Kernel& k, double p, const SimConfig& cfg) {
    SurvivalCounts c = survival_eval(k, p, cfg, nullptr);
    SimEstimate e;
    e.trials = cfg.trials;
    e.seed = cfg.seed;
    e.flagged_trials = c.flagged;
    e.value = static_cast<double>(c.survivors) / static_cast<double>(cfg.trials);
    e.std_error = std::sqrt(std::max(e.value * (1.0 - e.value), 0.0) /
                            static_cast<double>(cfg.trials));
    return e;
}

PcEstimate op_pc_estimate(const Kernel& k, const SimConfig& cfg) {
    if (!(cfg.survival_threshold > 0.0 && cfg.survival_threshold < 1.0))
        throw std::invalid_argument("op_pc_estimate: survival_threshold outside (0, 1)");
    if (!(cfg.bisect_tol > 0.0) || !(cfg.p_lo < cfg.p_hi))
        throw std::invalid_argument("op_pc_estimate: bad bracket or tolerance");
    validate(k, cfg.p_hi, cfg);

    struct Eval {
        double p;
        double s;
        std::vector<std::uint8_t> alive;
    };
    std::vector<Eval> evals;
    auto run = [&](double p) -> const Eval& {
        Eval e;
        e.p = p;
        e.alive.assign(cfg.trials, 0);
        SurvivalCounts c = survival_eval(k, p, cfg, e.alive.data());
        e.s = static_cast<double>(c.survivors) / static_cast<double>(cfg.trials);
        evals.push_back(std::move(e));
        return evals.back();
    };

    const double theta = cfg.survival_threshold;
    double lo = cfg.p_lo, hi = cfg.p_hi;
    double s_lo = run(lo).s, s_hi = run(hi).s;
    if (!(s_lo < theta && s_hi >= theta))
        throw std::invalid_argument(
            "op_pc_estimate: bracket does not straddle the threshold (survival " +
            std::to_string(s_lo) + " at p_lo, " + std::to_string(s_hi) +
            " at p_hi, threshold " + std::to_string(theta) + ")");

    while (hi - lo > cfg.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        const double s = run(mid).s;
        if (s >= theta) {
            hi = mid;
            s_hi = s;
        } else {
            lo = mid;
            s_lo = s;
        }
    }

    PcEstimate out;
    out.p_c = 0.5 * (lo + hi);
    out.survival_at_pc = run(out.p_c).s;
    out.slope = (s_hi - s_lo) / (hi - lo);
    out.evaluations = static_cast<int>(evals.size());
    out.trials = cfg.trials;
    out.seed = cfg.seed;
    const double se_s = std::sqrt(
        std::max(out.survival_at_pc * (1.0 - out.survival_at_pc), theta * (1.0 - theta)) /
        static_cast<double>(cfg.trials));
    const double half_tol = 0.5 * cfg.bisect_tol;
    out.std_error = out.slope > 0.0
                        ? std::sqrt(se_s / out.slope * (se_s / out.slope) + half_tol * half_tol)
                        : half_tol;

    // CRN coupling: each trial's survival indicator must be nondecreasing in p.
    std::sort(evals.begin(), evals.end(), [](const Eval& a, const Eval& b) { return a.p < b.p; });
    out.monotone_ok = true;
    for (std::size_t i = 1; i < evals.size(); ++i)
        for (std::int64_t t = 0; t < cfg.trials; ++t)
            if (evals[i - 1].alive[t] > evals[i].alive[t]) out.monotone_ok = false;
    return out;
}

SimEstimate op_double_connection_sum(const Kernel& k, const SimConfig& cfg) {
    validate(k, cfg.p, cfg);
    // Cluster + maxflow cost per trial grows quickly with the horizon; the
    // comparison target (a short even-return sum) only needs small T anyway.
    if (cfg.horizon > 20)
        throw std::invalid_argument("op_double_connection_sum: horizon > 20");
    const int d = k.d;
    const int W = resolve_workers(cfg.workers);
    std::int64_t sum = 0, sum2 = 0, dropped = 0;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(W) reduction(+ : sum, sum2, dropped)
#else
    (void)W;
#endif
    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
        ThreefryBlock tkey = derive_key(cfg.seed, kTagDouble, static_cast<std::uint64_t>(trial));

        // Grow the occupied cluster, recording every open bond as an edge.
        std::vector<std::vector<std::int32_t>> coords = {std::vector<std::int32_t>(d, 0)};
        std::vector<std::array<int, 2>> edges;
        std::vector<int> frontier = {0};
        bool drop = false;
        std::vector<std::int32_t> kid;
        for (int t = 0; t < cfg.horizon && !frontier.empty(); ++t) {
            std::map<std::vector<std::int32_t>, int> next_ids;
            std::vector<int> next_frontier;
            for (int u : frontier) {
                const std::int32_t* x = coords[u].data();
                ThreefryBlock b = chain(tkey, static_cast<std::uint64_t>(t),
                                        site_hash(std::span<const std::int32_t>(x, d)));
                RngStream st(b.x0, b.x1);
                kid.clear();
                sample_children(k, cfg.p, st, kid);
                for (std::size_t c = 0; c * d < kid.size(); ++c) {
                    std::vector<std::int32_t> child(d);
                    for (int j = 0; j < d; ++j) child[j] = x[j] + kid[c * d + j];
                    auto [it, fresh] = next_ids.try_emplace(child, 0);
                    if (fresh) {
                        it->second = static_cast<int>(coords.size());
                        coords.push_back(child);
                        next_frontier.push_back(it->second);
                    }
                    edges.push_back({u, it->second});
                }
            }
            if (static_cast<std::int64_t>(next_frontier.size()) > cfg.max_active) {
                drop = true;
                break;
            }
            frontier.swap(next_frontier);
        }
        if (drop) {
            ++dropped;
            continue;
        }

        // Count sites with two bond-disjoint paths from the origin: max flow
        // at unit edge capacities, two BFS augmentations on the residual.
        const int nn = static_cast<int>(coords.size());
        std::vector<std::vector<int>> out_e(nn), in_e(nn);
        for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
            out_e[edges[e][0]].push_back(e);
            in_e[edges[e][1]].push_back(e);
        }
        std::vector<char> used(edges.size());
        std::vector<int> pe(nn), q;
        std::vector<signed char> pd(nn);
        std::vector<char> vis(nn);
        auto augment = [&](int dst) {
            std::fill(vis.begin(), vis.end(), 0);
            q.clear();
            q.push_back(0);
            vis[0] = 1;
            for (std::size_t head = 0; head < q.size() && !vis[dst]; ++head) {
                const int u = q[head];
                for (int e : out_e[u])
                    if (!used[e] && !vis[edges[e][1]]) {
                        vis[edges[e][1]] = 1;
                        pe[edges[e][1]] = e;
                        pd[edges[e][1]] = 1;
                        q.push_back(edges[e][1]);
                    }
                for (int e : in_e[u])
                    if (used[e] && !vis[edges[e][0]]) {
                        vis[edges[e][0]] = 1;
                        pe[edges[e][0]] = e;
                        pd[edges[e][0]] = -1;
                        q.push_back(edges[e][0]);
                    }
            }
            if (!vis[dst]) return false;
            for (int v = dst; v != 0;) {
                const int e = pe[v];
                if (pd[v] > 0) {
                    used[e] = 1;
                    v = edges[e][0];
                } else {
                    used[e] = 0;
                    v = edges[e][1];
                }
            }
            return true;
        };

        std::int64_t count = 0;
        for (int v = 1; v < nn; ++v) {
            std::fill(used.begin(), used.end(), 0);
            if (augment(v) && augment(v)) ++count;
        }
        sum += count;
        sum2 += count * count;
    }

    SimEstimate e;
    e.seed = cfg.seed;
    e.dropped_trials = dropped;
    e.trials = cfg.trials - dropped;
    if (e.trials > 0) {
        const double n = static_cast<double>(e.trials);
        e.value = static_cast<double>(sum) / n;
        if (e.trials > 1) {
            const double var =
                (static_cast<double>(sum2) - static_cast<double>(sum) * e.value) / (n - 1.0);
            e.std_error = std::sqrt(std::max(var, 0.0) / n);
        }
    }
    return e;
}

}  // namespace spreadout
