#include "spreadout/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace spreadout {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::int64_t checked_box_count(int d, int L) {
    if (d < 1 || L < 1) throw std::invalid_argument("kernel: need d >= 1 and L >= 1");
    const __int128 side = 2 * static_cast<__int128>(L) + 1;
    __int128 m = 1;
    for (int i = 0; i < d; ++i) {
        m *= side;
        if (m > INT64_MAX)
            throw std::range_error("kernel: (2L+1)^d overflows 64-bit");
    }
    return static_cast<std::int64_t>(m);
}

void check_k_domain(int d, std::span<const double> kvec) {
    if (static_cast<int>(kvec.size()) != d)
        throw std::invalid_argument("fourier_eval: k has wrong dimension");
    for (double kj : kvec)
        if (!(std::abs(kj) <= kPi + 1e-9))
            throw std::invalid_argument("fourier_eval: k outside [-pi, pi]^d");
}

// All hyperoctahedral images of one representative offset: distinct coordinate
// permutations times sign choices on nonzero coordinates.
void expand_orbit(const std::vector<std::int32_t>& rep,
                  std::vector<std::vector<std::int32_t>>& out) {
    out.clear();
    std::vector<std::int32_t> p = rep;
    std::sort(p.begin(), p.end());
    do {
        std::vector<int> nz;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] != 0) nz.push_back(static_cast<int>(i));
        const std::size_t flips = std::size_t{1} << nz.size();
        for (std::size_t mask = 0; mask < flips; ++mask) {
            std::vector<std::int32_t> v = p;
            for (std::size_t b = 0; b < nz.size(); ++b)
                if (mask & (std::size_t{1} << b)) v[nz[b]] = -v[nz[b]];
            out.push_back(std::move(v));
        }
    } while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace

double Kernel::mass(std::span<const std::int32_t> x) const {
    if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument("Kernel::mass: wrong dimension");
    if (profile == Profile::UniformBox) {
        std::int32_t norm = 0;
        for (auto c : x) norm = std::max(norm, static_cast<std::int32_t>(std::abs(c)));
        if (norm == 0 || norm > L) return 0.0;
        return 1.0 / static_cast<double>(M - 1);
    }
    // Binary search in the sorted table.
    const std::size_t n = entries();
    std::size_t lo = 0, hi = n;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        auto o = offset(mid);
        const bool less = std::lexicographical_compare(o.begin(), o.end(), x.begin(), x.end());
        if (less)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < n) {
        auto o = offset(lo);
        if (std::equal(o.begin(), o.end(), x.begin())) return masses[lo];
    }
    return 0.0;
}

double Kernel::max_mass() const {
    if (profile == Profile::UniformBox) return 1.0 / static_cast<double>(M - 1);
    double m = 0.0;
    for (double v : masses) m = std::max(m, v);
    return m;
}

Kernel make_uniform(int d, int L) {
    Kernel k;
    k.d = d;
    k.L = L;
    k.profile = Profile::UniformBox;
    k.M = checked_box_count(d, L);
    if (k.M < 2) throw std::invalid_argument("make_uniform: empty support");
    k.beta = std::pow(static_cast<double>(L), -d);
    k.sup_bound = std::pow(static_cast<double>(L), d) / static_cast<double>(k.M - 1);
    return k;
}

Kernel make_explicit(int d, int L, const std::vector<std::int32_t>& offs,
                     const std::vector<double>& masses) {
    checked_box_count(d, L);
    if (d > 16) throw std::invalid_argument("make_explicit: d too large for explicit tables");
    if (offs.size() != masses.size() * static_cast<std::size_t>(d) || masses.empty())
        throw std::invalid_argument("make_explicit: offsets/masses size mismatch");

    std::map<std::vector<std::int32_t>, double> input;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        std::vector<std::int32_t> x(offs.begin() + i * d, offs.begin() + (i + 1) * d);
        std::int32_t norm = 0;
        for (auto c : x) norm = std::max(norm, static_cast<std::int32_t>(std::abs(c)));
        if (norm == 0) throw std::invalid_argument("make_explicit: mass at the origin");
        if (norm > L) throw std::invalid_argument("make_explicit: offset outside the range-L box");
        if (!(masses[i] >= 0.0) || !std::isfinite(masses[i]))
            throw std::invalid_argument("make_explicit: masses must be finite and >= 0");
        input[std::move(x)] += masses[i];
    }

    // Group by canonical representative (absolute values sorted descending).
    std::map<std::vector<std::int32_t>, double> class_total;
    for (const auto& [x, m] : input) {
        std::vector<std::int32_t> rep(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) rep[i] = std::abs(x[i]);
        std::sort(rep.begin(), rep.end(), std::greater<>());
        class_total[std::move(rep)] += m;
    }

    Kernel k;
    k.d = d;
    k.L = L;
    k.profile = Profile::ExplicitTable;
    k.M = checked_box_count(d, L);
    k.beta = std::pow(static_cast<double>(L), -d);

    std::map<std::vector<std::int32_t>, double> table;
    std::vector<std::vector<std::int32_t>> orbit;
    double total = 0.0;
    std::size_t covered = 0;
    bool asymmetric = false;
    for (const auto& [rep, cls_mass] : class_total) {
        expand_orbit(rep, orbit);
        const double mean = cls_mass / static_cast<double>(orbit.size());
        for (auto& y : orbit) {
            auto it = input.find(y);
            if (it == input.end()) {
                asymmetric = true;
            } else {
                ++covered;
                if (std::abs(it->second - mean) > 1e-12 * std::max(1.0, std::abs(mean)))
                    asymmetric = true;
            }
            table[std::move(y)] = mean;
        }
        total += cls_mass;
        if (table.size() > 10'000'000)
            throw std::invalid_argument("make_explicit: symmetrized table exceeds 1e7 entries");
    }
    if (covered != input.size()) asymmetric = true;  // defensive; cannot trigger
    if (!(total > 0.0)) throw std::invalid_argument("make_explicit: zero total mass");

    k.input_was_asymmetric = asymmetric;
    k.offsets.reserve(table.size() * d);
    k.masses.reserve(table.size());
    for (const auto& [x, m] : table) {
        k.offsets.insert(k.offsets.end(), x.begin(), x.end());
        k.masses.push_back(m / total);
    }
    k.sup_bound = k.max_mass() * std::pow(static_cast<double>(L), d);
    return k;
}

double AxisFactorization::axis_fourier(double kj) const {
    // Dirichlet kernel as an explicit cosine sum: exact at kj = 0, no 0/0.
    double s = 1.0;
    for (int m = 1; m <= L; ++m) s += 2.0 * std::cos(m * kj);
    return s * axis_mass;
}

double AxisFactorization::fourier(std::span<const double> k) const {
    check_k_domain(d, k);
    double prod = 1.0;
    for (double kj : k) prod *= axis_fourier(kj);
    return (static_cast<double>(M) * prod - 1.0) / static_cast<double>(M - 1);
}

AxisFactorization axis_factorization(const Kernel& k) {
    if (k.profile != Profile::UniformBox)
        throw std::invalid_argument("axis_factorization: only uniform-box kernels factorize");
    AxisFactorization a;
    a.d = k.d;
    a.L = k.L;
    a.M = k.M;
    a.axis_mass = 1.0 / static_cast<double>(2 * k.L + 1);
    return a;
}

double fourier_eval(const Kernel& k, std::span<const double> kvec) {
    check_k_domain(k.d, kvec);
    if (k.profile == Profile::UniformBox) return axis_factorization(k).fourier(kvec);
    double s = 0.0;
    for (std::size_t i = 0; i < k.entries(); ++i) {
        auto x = k.offset(i);
        double dot = 0.0;
        for (int j = 0; j < k.d; ++j) dot += kvec[j] * x[j];
        s += k.masses[i] * std::cos(dot);
    }
    return s;
}

double continuum_fourier(std::span<const double> kvec) {
    double prod = 1.0;
    for (double kj : kvec) {
        const double a = std::abs(kj);
        if (a < 1e-4) {
            const double k2 = kj * kj;
            prod *= 1.0 - k2 / 6.0 + k2 * k2 / 120.0;
        } else {
            prod *= std::sin(kj) / kj;
        }
    }
    return prod;
}

SupportTable support_table(const Kernel& k, std::size_t max_entries) {
    SupportTable t;
    t.d = k.d;
    if (k.profile == Profile::ExplicitTable) {
        t.offsets = k.offsets;
        t.masses = k.masses;
        return t;
    }
    const std::size_t count = static_cast<std::size_t>(k.M - 1);
    if (count > max_entries)
        throw std::range_error("support_table: uniform box support exceeds entry budget (" +
                               std::to_string(max_entries) + " entries)");
    t.offsets.reserve(count * k.d);
    t.masses.assign(count, 1.0 / static_cast<double>(k.M - 1));
    std::vector<std::int32_t> x(k.d, -k.L);
    for (;;) {
        bool origin = std::all_of(x.begin(), x.end(), [](auto c) { return c == 0; });
        if (!origin) t.offsets.insert(t.offsets.end(), x.begin(), x.end());
        int j = k.d - 1;
        while (j >= 0 && x[j] == k.L) x[j--] = -k.L;
        if (j < 0) break;
        ++x[j];
    }
    return t;
}

Kernel load_kernel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open kernel file: " + path);
    auto strip = [](std::string s) {
        auto h = s.find('#');
        if (h != std::string::npos) s.erase(h);
        return s;
    };
    std::string line;
    int d = -1, L = -1;
    std::string profile;
    // Header: first non-empty line.
    while (std::getline(in, line)) {
        std::istringstream ls(strip(line));
        std::string tok;
        bool any = false;
        while (ls >> tok) {
            any = true;
            auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("kernel file: malformed header token '" + tok + "'");
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            try {
                if (key == "d")
                    d = std::stoi(val);
                else if (key == "L")
                    L = std::stoi(val);
                else if (key == "profile")
                    profile = val;
                else
                    throw std::invalid_argument("kernel file: unknown header key '" + key + "'");
            } catch (const std::logic_error&) {
                throw std::invalid_argument("kernel file: bad header value '" + tok + "'");
            }
        }
        if (any) break;
    }
    if (d < 1 || L < 1 || profile.empty())
        throw std::invalid_argument("kernel file: header must set d, L and profile");
    if (profile == "uniform") return make_uniform(d, L);
    if (profile != "table")
        throw std::invalid_argument("kernel file: profile must be 'uniform' or 'table'");

    std::vector<std::int32_t> offs;
    std::vector<double> ms;
    while (std::getline(in, line)) {
        std::istringstream ls(strip(line));
        std::vector<double> vals;
        double v;
        while (ls >> v) vals.push_back(v);
        if (vals.empty()) continue;
        if (vals.size() != static_cast<std::size_t>(d) + 1)
            throw std::invalid_argument("kernel file: offset line needs d coordinates and a mass");
        for (int j = 0; j < d; ++j) {
            if (vals[j] != std::floor(vals[j]) || std::abs(vals[j]) > 1e9)
                throw std::invalid_argument("kernel file: non-integer offset coordinate");
            offs.push_back(static_cast<std::int32_t>(vals[j]));
        }
        ms.push_back(vals[d]);
    }
    if (in.bad()) throw IoError("read failure on kernel file: " + path);
    return make_explicit(d, L, offs, ms);
}

void save_kernel(const Kernel& k, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open kernel file for write: " + path);
    out << "d=" << k.d << " L=" << k.L << " profile="
        << (k.profile == Profile::UniformBox ? "uniform" : "table") << "\n";
    if (k.profile == Profile::ExplicitTable) {
        char buf[64];
        for (std::size_t i = 0; i < k.entries(); ++i) {
            auto x = k.offset(i);
            for (int j = 0; j < k.d; ++j) out << x[j] << ' ';
            std::snprintf(buf, sizeof buf, "%.17g", k.masses[i]);
            out << buf << "\n";
        }
    }
    if (!out) throw IoError("write failure on kernel file: " + path);
}

}  // namespace spreadout
