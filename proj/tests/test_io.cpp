#include <doctest.h>
#include <spreadout/io_json.hpp>

#include <cstdio>
#include <string>

using namespace spreadout;

TEST_CASE("return series JSON round trip keeps the rationals") {
    Kernel k = make_uniform(2, 1);
    ReturnSeries s = return_series_integer(k, 6);
    Json j = s;
    ReturnSeries back = j.get<ReturnSeries>();
    CHECK(back.d == s.d);
    CHECK(back.L == s.L);
    CHECK(back.method == s.method);
    REQUIRE(back.r.size() == s.r.size());
    for (std::size_t i = 0; i < s.r.size(); ++i) CHECK(back.r[i] == s.r[i]);
    REQUIRE(back.exact.size() == s.exact.size());
    for (std::size_t i = 0; i < s.exact.size(); ++i) CHECK(back.exact[i] == s.exact[i]);
    CHECK(j.at("rational")[2].get<std::string>() == "1/8");
}

TEST_CASE("prediction JSON round trip") {
    Prediction p = predict_pc(Model::OrientedPercolation, make_uniform(5, 2));
    Json j = p;
    Prediction back = j.get<Prediction>();
    CHECK(back.model == p.model);
    CHECK(back.correction_term == p.correction_term);
    CHECK(back.p_c_leading == p.p_c_leading);
    CHECK(back.error_scale == p.error_scale);
    CHECK(back.error_scale_kind == p.error_scale_kind);
    CHECK(back.truncation_N == p.truncation_N);
    CHECK(back.tail_valid == p.tail_valid);
    CHECK(back.sum_truncated == p.sum_truncated);
    CHECK(back.tail_value == p.tail_value);
    CHECK(back.method == p.method);
    CHECK(j.at("model").get<std::string>() == "op");
}

TEST_CASE("loop sums JSON round trip") {
    ReturnSeries s = compute_series(make_uniform(7, 1));
    LoopSums ls = loop_sums(s);
    Json j = ls;
    LoopSums back = j.get<LoopSums>();
    CHECK(back.S_all == ls.S_all);
    CHECK(back.S_even == ls.S_even);
    CHECK(back.S_weighted == ls.S_weighted);
    CHECK(back.triangle == ls.triangle);
    CHECK(back.has_triangle == ls.has_triangle);
    CHECK(back.tail_all.value == ls.tail_all.value);
    CHECK(back.tail_all.valid == ls.tail_all.valid);
    CHECK(back.tail_triangle.lambda == ls.tail_triangle.lambda);
}

TEST_CASE("sim estimate JSON uses the stderr key") {
    SimEstimate e;
    e.value = 0.25;
    e.std_error = 0.003;
    e.trials = 1000;
    e.seed = 42;
    Json j = e;
    CHECK(j.at("stderr").get<double>() == 0.003);
    SimEstimate back = j.get<SimEstimate>();
    CHECK(back.std_error == e.std_error);
    CHECK(back.value == e.value);
    CHECK(back.trials == e.trials);
    CHECK(back.seed == e.seed);
}

TEST_CASE("pc estimate JSON round trip") {
    PcEstimate e;
    e.p_c = 1.05;
    e.std_error = 0.004;
    e.survival_at_pc = 0.021;
    e.slope = 0.8;
    e.evaluations = 12;
    e.trials = 5000;
    e.monotone_ok = true;
    e.seed = 7;
    Json j = e;
    PcEstimate back = j.get<PcEstimate>();
    CHECK(back.p_c == e.p_c);
    CHECK(back.std_error == e.std_error);
    CHECK(back.survival_at_pc == e.survival_at_pc);
    CHECK(back.slope == e.slope);
    CHECK(back.evaluations == e.evaluations);
    CHECK(back.monotone_ok == e.monotone_ok);
}

TEST_CASE("loop enumeration JSON round trip") {
    LoopEnumeration e = saw_loop_sum(make_uniform(2, 1), 5);
    Json j = e;
    LoopEnumeration back = j.get<LoopEnumeration>();
    CHECK(back.route == e.route);
    CHECK(back.nmax == e.nmax);
    REQUIRE(back.saw_exact.size() == e.saw_exact.size());
    for (std::size_t i = 0; i < e.saw_exact.size(); ++i)
        CHECK(back.saw_exact[i] == e.saw_exact[i]);
    CHECK(back.pi1_exact == e.pi1_exact);
    CHECK(back.pi1_truncated == e.pi1_truncated);
}

TEST_CASE("continuum, compare, bound, cp-limit and criterion JSON round trips") {
    ContinuumReturns c = continuum_series(5, 12);
    Json jc = c;
    ContinuumReturns cb = jc.get<ContinuumReturns>();
    CHECK(cb.v == c.v);
    CHECK(cb.u == c.u);
    CHECK(cb.v_exact[4] == c.v_exact[4]);

    CompareRow row;
    row.L = 4;
    row.discrete = 1e-3;
    row.continuum = 0.05;
    row.scaled_continuum = 9.7e-4;
    row.delta = 3e-5;
    row.ratio = 0.12;
    row.tails_valid = true;
    Json jr = row;
    CompareRow rb = jr.get<CompareRow>();
    CHECK(rb.L == row.L);
    CHECK(rb.delta == row.delta);
    CHECK(rb.tails_valid == row.tails_valid);

    SawBound b;
    b.value = 0.05;
    b.walks_weighted = 0.5;
    b.walks_total = 0.1;
    b.tails_valid = true;
    Json jb = b;
    SawBound bb = jb.get<SawBound>();
    CHECK(bb.value == b.value);
    CHECK(bb.walks_weighted == b.walks_weighted);

    CpLimitRow cl{0.25, 0.051, 0.050, 0.001};
    Json jl = cl;
    CpLimitRow clb = jl.get<CpLimitRow>();
    CHECK(clb.eps == cl.eps);
    CHECK(clb.gap == cl.gap);

    CriterionResult cr;
    cr.id = 3;
    cr.name = "mc-return-oracle";
    cr.pass = true;
    cr.gating = true;
    cr.detail = "max z = 1.2";
    cr.seconds = 4.5;
    Json jcr = cr;
    CriterionResult crb = jcr.get<CriterionResult>();
    CHECK(crb.id == cr.id);
    CHECK(crb.name == cr.name);
    CHECK(crb.pass == cr.pass);
    CHECK(crb.detail == cr.detail);
}

TEST_CASE("envelope carries schema, kind and optional meta") {
    Json data{{"x", 1}};
    Json with = envelope("series", data, true);
    CHECK(with.at("schema").get<int>() == 1);
    CHECK(with.at("kind").get<std::string>() == "series");
    CHECK(with.at("data").at("x").get<int>() == 1);
    REQUIRE(with.contains("meta"));
    CHECK(with.at("meta").at("tool").get<std::string>() == "spreadout");
    CHECK(with.at("meta").at("version").get<std::string>() == kToolVersion);
    CHECK(with.at("meta").contains("generated_at"));

    Json without = envelope("series", data, false);
    CHECK(!without.contains("meta"));
    // Reruns without meta are byte-identical.
    CHECK(envelope("series", data, false).dump(2) == without.dump(2));
}

TEST_CASE("text file round trip and error paths") {
    const std::string path = "tmp_io_roundtrip.json";
    const std::string content = "{\"a\": [1, 2, 3]}\n";
    write_text_file(path, content);
    CHECK(read_text_file(path) == content);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_text_file(path), IoError);
    CHECK_THROWS_AS(write_text_file("no_such_dir_xyz/out.json", "x"), IoError);
}
