#include <ctime>
#include <fstream>
#include <sstream>

#include "spreadout/errors.hpp"
#include "spreadout/gmp_util.hpp"
#include "spreadout/io_json.hpp"

namespace spreadout {

namespace {

std::vector<std::string> rationals_out(const std::vector<mpq_class>& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(rational_string(q));
    return out;
}

std::vector<mpq_class> rationals_in(const Json& j) {
    std::vector<mpq_class> out;
    out.reserve(j.size());
    for (const auto& s : j) {
        mpq_class q(s.get<std::string>());
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

const char* route_name(EnumerationRoute r) {
    return r == EnumerationRoute::DirectEnumeration ? "direct" : "partition";
}

EnumerationRoute route_from_string(const std::string& s) {
    if (s == "direct") return EnumerationRoute::DirectEnumeration;
    if (s == "partition") return EnumerationRoute::PartitionCount;
    throw std::invalid_argument("unknown enumeration route: " + s);
}

}  // namespace

void to_json(Json& j, const TailEstimate& t) {
    j = Json{{"value", t.value}, {"lambda", t.lambda}, {"valid", t.valid}, {"from", t.from}};
}

void from_json(const Json& j, TailEstimate& t) {
    j.at("value").get_to(t.value);
    j.at("lambda").get_to(t.lambda);
    j.at("valid").get_to(t.valid);
    j.at("from").get_to(t.from);
}

void to_json(Json& j, const ReturnSeries& s) {
    j = Json{{"d", s.d},
             {"L", s.L},
             {"beta", s.beta},
             {"method", series_method_name(s.method)},
             {"r", s.r},
             {"gauss_constant", s.gauss_constant},
             {"monotone_even", s.monotone_even}};
    if (!s.exact.empty()) j["rational"] = rationals_out(s.exact);
}

void from_json(const Json& j, ReturnSeries& s) {
    j.at("d").get_to(s.d);
    j.at("L").get_to(s.L);
    j.at("beta").get_to(s.beta);
    s.method = series_method_from_string(j.at("method").get<std::string>());
    j.at("r").get_to(s.r);
    j.at("gauss_constant").get_to(s.gauss_constant);
    j.at("monotone_even").get_to(s.monotone_even);
    s.exact = j.contains("rational") ? rationals_in(j.at("rational")) : std::vector<mpq_class>{};
}

void to_json(Json& j, const ContinuumReturns& c) {
    j = Json{{"d", c.d},
             {"v", c.v},
             {"u", c.u},
             {"v_rational", rationals_out(c.v_exact)},
             {"gauss_constant", c.gauss_constant},
             {"monotone_even", c.monotone_even}};
}

void from_json(const Json& j, ContinuumReturns& c) {
    j.at("d").get_to(c.d);
    j.at("v").get_to(c.v);
    j.at("u").get_to(c.u);
    c.v_exact = rationals_in(j.at("v_rational"));
    j.at("gauss_constant").get_to(c.gauss_constant);
    j.at("monotone_even").get_to(c.monotone_even);
}

void to_json(Json& j, const LoopSums& s) {
    j = Json{{"d", s.d},
             {"L", s.L},
             {"N", s.N},
             {"beta", s.beta},
             {"gauss_constant", s.gauss_constant},
             {"S_all", s.S_all},
             {"S_even", s.S_even},
             {"S_weighted", s.S_weighted},
             {"tail_all", s.tail_all},
             {"tail_even", s.tail_even},
             {"tail_weighted", s.tail_weighted},
             {"has_triangle", s.has_triangle},
             {"triangle", s.triangle},
             {"tail_triangle", s.tail_triangle}};
}

void from_json(const Json& j, LoopSums& s) {
    j.at("d").get_to(s.d);
    j.at("L").get_to(s.L);
    j.at("N").get_to(s.N);
    j.at("beta").get_to(s.beta);
    j.at("gauss_constant").get_to(s.gauss_constant);
    j.at("S_all").get_to(s.S_all);
    j.at("S_even").get_to(s.S_even);
    j.at("S_weighted").get_to(s.S_weighted);
    j.at("tail_all").get_to(s.tail_all);
    j.at("tail_even").get_to(s.tail_even);
    j.at("tail_weighted").get_to(s.tail_weighted);
    j.at("has_triangle").get_to(s.has_triangle);
    j.at("triangle").get_to(s.triangle);
    j.at("tail_triangle").get_to(s.tail_triangle);
}

void to_json(Json& j, const Prediction& p) {
    j = Json{{"model", model_name(p.model)},
             {"d", p.d},
             {"L", p.L},
             {"beta", p.beta},
             {"correction_term", p.correction_term},
             {"p_c_leading", p.p_c_leading},
             {"error_scale", p.error_scale},
             {"error_scale_kind", p.error_scale_kind},
             {"truncation_N", p.truncation_N},
             {"tail_valid", p.tail_valid},
             {"components", Json{{"sum_truncated", p.sum_truncated},
                                 {"tail_value", p.tail_value},
                                 {"gauss_constant", p.gauss_constant},
                                 {"method", series_method_name(p.method)},
                                 {"gate_overridden", p.gate_overridden}}}};
}

void from_json(const Json& j, Prediction& p) {
    p.model = model_from_string(j.at("model").get<std::string>());
    j.at("d").get_to(p.d);
    j.at("L").get_to(p.L);
    j.at("beta").get_to(p.beta);
    j.at("correction_term").get_to(p.correction_term);
    j.at("p_c_leading").get_to(p.p_c_leading);
    j.at("error_scale").get_to(p.error_scale);
    j.at("error_scale_kind").get_to(p.error_scale_kind);
    j.at("truncation_N").get_to(p.truncation_N);
    j.at("tail_valid").get_to(p.tail_valid);
    const Json& c = j.at("components");
    c.at("sum_truncated").get_to(p.sum_truncated);
    c.at("tail_value").get_to(p.tail_value);
    c.at("gauss_constant").get_to(p.gauss_constant);
    p.method = series_method_from_string(c.at("method").get<std::string>());
    c.at("gate_overridden").get_to(p.gate_overridden);
}

void to_json(Json& j, const CompareRow& r) {
    j = Json{{"L", r.L},
             {"discrete", r.discrete},
             {"continuum", r.continuum},
             {"scaled_continuum", r.scaled_continuum},
             {"delta", r.delta},
             {"ratio", r.ratio},
             {"tails_valid", r.tails_valid}};
}

void from_json(const Json& j, CompareRow& r) {
    j.at("L").get_to(r.L);
    j.at("discrete").get_to(r.discrete);
    j.at("continuum").get_to(r.continuum);
    j.at("scaled_continuum").get_to(r.scaled_continuum);
    j.at("delta").get_to(r.delta);
    j.at("ratio").get_to(r.ratio);
    j.at("tails_valid").get_to(r.tails_valid);
}

void to_json(Json& j, const LoopEnumeration& e) {
    j = Json{{"d", e.d},
             {"L", e.L},
             {"nmax", e.nmax},
             {"route", route_name(e.route)},
             {"all_weight", e.all_weight},
             {"saw_weight", e.saw_weight},
             {"pi1_truncated", e.pi1_truncated}};
    if (!e.saw_exact.empty()) {
        j["saw_rational"] = rationals_out(e.saw_exact);
        j["pi1_rational"] = rational_string(e.pi1_exact);
    }
}

void from_json(const Json& j, LoopEnumeration& e) {
    j.at("d").get_to(e.d);
    j.at("L").get_to(e.L);
    j.at("nmax").get_to(e.nmax);
    e.route = route_from_string(j.at("route").get<std::string>());
    j.at("all_weight").get_to(e.all_weight);
    j.at("saw_weight").get_to(e.saw_weight);
    j.at("pi1_truncated").get_to(e.pi1_truncated);
    e.saw_exact.clear();
    e.pi1_exact = 0;
    if (j.contains("saw_rational")) {
        e.saw_exact = rationals_in(j.at("saw_rational"));
        mpq_class q(j.at("pi1_rational").get<std::string>());
        q.canonicalize();
        e.pi1_exact = q;
    }
}

void to_json(Json& j, const SawBound& b) {
    j = Json{{"value", b.value},
             {"walks_weighted", b.walks_weighted},
             {"walks_total", b.walks_total},
             {"tails_valid", b.tails_valid}};
}

void from_json(const Json& j, SawBound& b) {
    j.at("value").get_to(b.value);
    j.at("walks_weighted").get_to(b.walks_weighted);
    j.at("walks_total").get_to(b.walks_total);
    j.at("tails_valid").get_to(b.tails_valid);
}

void to_json(Json& j, const SimEstimate& e) {
    j = Json{{"value", e.value},
             {"stderr", e.std_error},
             {"trials", e.trials},
             {"dropped_trials", e.dropped_trials},
             {"flagged_trials", e.flagged_trials},
             {"seed", e.seed}};
}

void from_json(const Json& j, SimEstimate& e) {
    j.at("value").get_to(e.value);
    j.at("stderr").get_to(e.std_error);
    j.at("trials").get_to(e.trials);
    j.at("dropped_trials").get_to(e.dropped_trials);
    j.at("flagged_trials").get_to(e.flagged_trials);
    j.at("seed").get_to(e.seed);
}

void to_json(Json& j, const PcEstimate& e) {
    j = Json{{"p_c", e.p_c},
             {"stderr", e.std_error},
             {"survival_at_pc", e.survival_at_pc},
             {"slope", e.slope},
             {"evaluations", e.evaluations},
             {"trials", e.trials},
             {"monotone_ok", e.monotone_ok},
             {"seed", e.seed}};
}

void from_json(const Json& j, PcEstimate& e) {
    j.at("p_c").get_to(e.p_c);
    j.at("stderr").get_to(e.std_error);
    j.at("survival_at_pc").get_to(e.survival_at_pc);
    j.at("slope").get_to(e.slope);
    j.at("evaluations").get_to(e.evaluations);
    j.at("trials").get_to(e.trials);
    j.at("monotone_ok").get_to(e.monotone_ok);
    j.at("seed").get_to(e.seed);
}

void to_json(Json& j, const CriterionResult& r) {
    j = Json{{"id", r.id},         {"name", r.name},     {"pass", r.pass},
             {"gating", r.gating}, {"detail", r.detail}, {"seconds", r.seconds}};
}

void from_json(const Json& j, CriterionResult& r) {
    j.at("id").get_to(r.id);
    j.at("name").get_to(r.name);
    j.at("pass").get_to(r.pass);
    j.at("gating").get_to(r.gating);
    j.at("detail").get_to(r.detail);
    j.at("seconds").get_to(r.seconds);
}

void to_json(Json& j, const CpLimitRow& r) {
    j = Json{{"eps", r.eps}, {"f", r.f}, {"s_all", r.s_all}, {"gap", r.gap}};
}

void from_json(const Json& j, CpLimitRow& r) {
    j.at("eps").get_to(r.eps);
    j.at("f").get_to(r.f);
    j.at("s_all").get_to(r.s_all);
    j.at("gap").get_to(r.gap);
}

Json envelope(const std::string& kind, Json data, bool with_meta) {
    Json j{{"schema", 1}, {"kind", kind}, {"data", std::move(data)}};
    if (with_meta) {
        char stamp[32] = "unknown";
        std::time_t now = std::time(nullptr);
        if (std::tm tm{}; gmtime_r(&now, &tm) != nullptr)
            std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
        j["meta"] = Json{{"tool", "spreadout"}, {"version", kToolVersion}, {"generated_at", stamp}};
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return ss.str();
}

}  // namespace spreadout
