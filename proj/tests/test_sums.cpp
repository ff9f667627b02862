#include <doctest.h>
#include <spreadout/sums.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace spreadout;

static ReturnSeries synthetic_series(int d, std::vector<double> r) {
    ReturnSeries s;
    s.d = d;
    s.L = 1;
    s.beta = 1.0;
    s.r = std::move(r);
    finalize_series_stats(s);
    return s;
}

TEST_CASE("loop sums on a short synthetic series") {
    // d=2 keeps every tail invalid (transience gate), so the totals are the
    // plain truncated sums.
    ReturnSeries s = synthetic_series(2, {1, 0, 0.1, 0.05, 0.02});
    LoopSums ls = loop_sums(s);
    CHECK(ls.N == 4);
    CHECK(ls.S_all == doctest::Approx(0.17).epsilon(1e-14));
    CHECK(ls.S_even == doctest::Approx(0.02).epsilon(1e-14));
    // r_2 + (1/2)(4 r_3 + 5 r_4) = 0.1 + 0.5*(0.2 + 0.1) = 0.25.
    CHECK(ls.S_weighted == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(!ls.tail_all.valid);
    CHECK(!ls.tail_even.valid);
    CHECK(!ls.tail_weighted.valid);
    CHECK(!ls.has_triangle);
}

TEST_CASE("loop sums fold in valid tails in high dimension") {
    ReturnSeries s = synthetic_series(7, {1, 0, 0.1, 0.02, 0.04, 0.008, 0.016});
    LoopSums ls = loop_sums(s);
    REQUIRE(ls.tail_all.valid);
    REQUIRE(ls.tail_even.valid);
    REQUIRE(ls.tail_weighted.valid);
    double head_all = 0.1 + 0.02 + 0.04 + 0.008 + 0.016;
    CHECK(ls.S_all == doctest::Approx(head_all + ls.tail_all.value).epsilon(1e-13));
    // lambda = r6/r4 = 0.4; direct 600-term continuation of the model.
    double lam = 0.4, direct_all = 0.0, direct_even = 0.0, direct_w = 0.0;
    std::vector<double> ext(600, 0.0);
    for (int n = 0; n < int(ext.size()); ++n) {
        if (n <= 6) { ext[n] = s.r[n]; continue; }
        ext[n] = ext[n - 2] * lam;
    }
    for (int n = 2; n < int(ext.size()); ++n) {
        direct_all += ext[n];
        if (n >= 4 && n % 2 == 0) direct_even += ext[n];
        direct_w += (n == 2) ? ext[2] : 0.5 * (n + 1) * ext[n];
    }
    CHECK(ls.S_all == doctest::Approx(direct_all).epsilon(1e-10));
    CHECK(ls.S_even == doctest::Approx(direct_even).epsilon(1e-10));
    CHECK(ls.S_weighted == doctest::Approx(direct_w).epsilon(1e-10));
    CHECK(ls.has_triangle);
    double direct_tri = 0.0;
    for (int n = 2; n < int(ext.size()); ++n)
        direct_tri += 0.5 * n * (n - 1) * ext[n];
    CHECK(ls.triangle == doctest::Approx(direct_tri).epsilon(1e-9));
}

TEST_CASE("loop_sums requires at least four computed orders") {
    ReturnSeries s = synthetic_series(5, {1, 0, 0.1, 0.05});
    CHECK_THROWS_AS(loop_sums(s), std::invalid_argument);
}

TEST_CASE("contact-process discretization coefficients converge per order") {
    // For q = (1-eps) delta + eps D at p = 1, the weight multiplying r_m in
    // 2 eps sum_n (D*D*q^{2n})(o) is
    //   c_m(eps) = 2 eps sum_{n} C(2n, m-2) (1-eps)^{2n-m+2} eps^{m-2}
    // and resums to 1 - (-t)^{m-1} with t = eps/(2-eps).
    for (double eps : {0.3, 0.618, 1.0}) {
        double t = eps / (2.0 - eps);
        for (int m : {2, 3, 4, 5, 8, 13}) {
            double coeff = 0.0;
            for (int n = 0; n <= 4000; ++n) {
                int top = 2 * n, bot = m - 2;
                if (bot > top) continue;
                // C(2n, m-2) in doubles via a running product.
                double binom = 1.0;
                for (int i = 0; i < bot; ++i)
                    binom *= double(top - i) / double(bot - i);
                coeff += binom * std::pow(1.0 - eps, top - bot) *
                         std::pow(eps, bot);
            }
            coeff *= 2.0 * eps;
            double closed = 1.0 - std::pow(-t, m - 1);
            CHECK(std::fabs(coeff - closed) <= 1e-10);
        }
    }
}

TEST_CASE("cp_epsilon_sum matches a hand sum on a tail-free series") {
    // Final even order is zero, so the fitted tail ratio is zero and no
    // extension terms are generated: the function must equal the plain
    // weighted sum over the stored orders.
    ReturnSeries s = synthetic_series(5, {1, 0, 0.2, 0.1, 0.05, 0.02, 0.0});
    for (double eps : {0.1, 0.5, 1.0}) {
        double t = eps / (2.0 - eps);
        double hand = 0.0;
        for (int m = 2; m <= 6; ++m)
            hand += (1.0 - std::pow(-t, m - 1)) * s.r[m];
        CHECK(cp_epsilon_sum(s, eps) == doctest::Approx(hand).epsilon(1e-12));
    }
    // At eps = 1 the closed form collapses to twice the even sum.
    double evens = 2.0 * (s.r[2] + s.r[4] + s.r[6]);
    CHECK(cp_epsilon_sum(s, 1.0) == doctest::Approx(evens).epsilon(1e-12));
}

TEST_CASE("cp_epsilon_sum r_2-only series has the closed form 2a/(2-eps)") {
    // With only r_2 = a nonzero, sum_m c_m r_m = (1 + t) a = 2a/(2-eps).
    // Trailing zeros make the fitted tail unusable (0/0 ratio), the extension
    // is skipped, and the truncated sum is the exact closed form.
    const double a = 1e-4;
    ReturnSeries s = synthetic_series(5, {1, 0, a, 0, 0, 0, 0});
    for (double eps : {0.25, 0.75, 1.0}) {
        double expect = 2.0 * a / (2.0 - eps);
        CHECK(cp_epsilon_sum(s, eps) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("cp_epsilon_sum at eps=1 equals twice the even-step sum") {
    // S_even excludes r_2 (it is the n >= 2 part of sum r_{2n}), so the
    // eps = 1 collapse reads f(1) = 2 (r_2 + S_even).
    Kernel k = make_uniform(5, 4);
    ReturnSeries s = compute_series(k);
    LoopSums ls = loop_sums(s);
    double f1 = cp_epsilon_sum(s, 1.0);
    CHECK(std::fabs(f1 - 2.0 * (s.r[2] + ls.S_even)) <= 1e-9);
}

TEST_CASE("predict_pc applies the dimension gates") {
    CHECK_THROWS_AS(predict_pc(Model::Percolation, make_uniform(3, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(predict_pc(Model::SAW, make_uniform(3, 1)),
                    std::invalid_argument);
    Prediction p = predict_pc(Model::SAW, make_uniform(3, 1), 1e-10, true);
    CHECK(p.gate_overridden);
    Prediction q = predict_pc(Model::SAW, make_uniform(5, 1));
    CHECK(!q.gate_overridden);
}

TEST_CASE("predict_pc assembles 1 + C(D) per model") {
    Kernel k = make_uniform(5, 1);
    ReturnSeries s = compute_series(k);
    LoopSums ls = loop_sums(s);
    Prediction saw = predict_pc(Model::SAW, k);
    Prediction cp = predict_pc(Model::ContactProcess, k);
    Prediction op = predict_pc(Model::OrientedPercolation, k);
    CHECK(saw.correction_term == doctest::Approx(ls.S_all).epsilon(1e-12));
    CHECK(saw.p_c_leading == doctest::Approx(1.0 + ls.S_all).epsilon(1e-12));
    CHECK(cp.correction_term == doctest::Approx(ls.S_all).epsilon(1e-12));
    CHECK(op.correction_term == doctest::Approx(0.5 * ls.S_even).epsilon(1e-12));
    CHECK(saw.error_scale_kind == "beta^2");
    CHECK(saw.error_scale == doctest::Approx(k.beta * k.beta).epsilon(1e-14));
    CHECK(saw.tail_valid);
    Prediction perc = predict_pc(Model::Percolation, make_uniform(7, 1));
    ReturnSeries s7 = compute_series(make_uniform(7, 1));
    LoopSums ls7 = loop_sums(s7);
    CHECK(perc.correction_term == doctest::Approx(ls7.S_weighted).epsilon(1e-12));
}

TEST_CASE("continuum prediction uses the beta/L error scale") {
    Prediction p = predict_pc_continuum(Model::SAW, 5, 8);
    CHECK(p.error_scale_kind == "beta/L");
    double beta = std::pow(8.0, -5.0);
    CHECK(p.beta == doctest::Approx(beta).epsilon(1e-14));
    CHECK(p.error_scale == doctest::Approx(beta / 8.0).epsilon(1e-12));
    CHECK(p.p_c_leading == doctest::Approx(1.0 + p.correction_term).epsilon(1e-14));
    // The continuum correction must sit close to the lattice one at this L.
    Prediction lattice = predict_pc(Model::SAW, make_uniform(5, 8));
    CHECK(std::fabs(p.correction_term - lattice.correction_term) <
          20.0 * lattice.beta / 8.0);
}

TEST_CASE("discrete-continuum comparison rows are internally consistent") {
    std::vector<int> Ls = {2, 4};
    auto rows = compare_discrete_continuum(5, Ls, CompareVariant::EvenFrom2);
    REQUIRE(rows.size() == 2u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        CHECK(row.L == Ls[i]);
        double beta = std::pow(double(row.L), -5.0);
        CHECK(row.scaled_continuum == doctest::Approx(beta * row.continuum).epsilon(1e-13));
        CHECK(row.delta == doctest::Approx(std::fabs(row.discrete - row.scaled_continuum))
                               .epsilon(1e-13));
        CHECK(row.ratio == doctest::Approx(row.delta * row.L / beta).epsilon(1e-12));
        CHECK(row.tails_valid);
        CHECK(row.discrete > 0.0);
    }
    // Tighter L should not give a wildly different ratio (bounded constant).
    CHECK(rows[1].ratio < 10.0 * rows[0].ratio + 1.0);
}

TEST_CASE("model names round trip") {
    for (Model m : {Model::SAW, Model::Percolation, Model::OrientedPercolation,
                    Model::ContactProcess})
        CHECK(model_from_string(model_name(m)) == m);
    CHECK_THROWS_AS(model_from_string("ising"), std::invalid_argument);
}
