// Command-line front end: expansions, loop sums, continuum limits and the
// simulation cross-checks, with json/csv/text output.  Exit codes: 0 ok,
// 1 failed self-checks, 2 invalid arguments, 3 flagged-invalid under --strict,
// 4 I/O failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spreadout/continuum.hpp"
#include "spreadout/diagrams.hpp"
#include "spreadout/errors.hpp"
#include "spreadout/gmp_util.hpp"
#include "spreadout/io_json.hpp"
#include "spreadout/kernels.hpp"
#include "spreadout/returns.hpp"
#include "spreadout/simulate.hpp"
#include "spreadout/sums.hpp"
#include "spreadout/verify.hpp"

namespace {

using namespace spreadout;

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

struct Options {
    // output
    std::string format = "json";
    std::string output;
    std::string config_file;
    bool no_meta = false;
    bool strict = false;

    // kernel
    int d = 0;
    int L = 0;
    std::string kernel_file;

    // series / sums
    int nmax = 0;  // 0 = tolerance-driven policy
    double tol = 1e-10;
    std::string method = "auto";
    bool rational = false;
    bool force_triangle = false;
    bool allow_low_d = false;
    bool continuum_limit = false;
    std::string model = "saw";
    std::vector<int> L_sweep;
    std::vector<double> eps = {1.0, 0.5, 0.25, 0.125};
    std::string variant = "all";

    // simulation
    std::string task = "survival";
    SimConfig sim;
    int n_steps = -1;

    // verify
    std::string suite = "fast";
    int criterion = 0;
};

void emit(const Options& opt, const std::string& kind, const Json& data,
          const std::string& text_or_csv) {
    std::string payload;
    if (opt.format == "json")
        payload = envelope(kind, data, !opt.no_meta).dump(2) + "\n";
    else
        payload = text_or_csv;
    if (opt.output.empty())
        std::cout << payload;
    else
        write_text_file(opt.output, payload);
}

// CLI11 2.4 only processes a config file registered on the root command, and
// ours travels with each subcommand, so the file is applied by hand: every
// key fills the matching option unless the command line already set it.
void apply_config(CLI::App* sub, const std::string& path) {
    auto trim = [](const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    std::istringstream in(read_text_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(where + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || key == "config")
            throw std::invalid_argument(where + ": bad key");
        CLI::Option* o = sub->get_option_no_throw("--" + key);
        if (o == nullptr)
            throw std::invalid_argument(where + ": no option --" + key + " on " +
                                        sub->get_name());
        if (o->count() > 0) continue;  // the command line wins
        o->add_result(val);
        o->run_callback();
    }
}

Kernel resolve_kernel(const Options& opt) {
    if (!opt.kernel_file.empty()) return load_kernel(opt.kernel_file);
    if (opt.d <= 0 || opt.L <= 0)
        throw std::invalid_argument("need --d and --L (or --kernel FILE)");
    return make_uniform(opt.d, opt.L);
}

ReturnSeries series_for(const Options& opt, const Kernel& k) {
    if (opt.method == "auto" || opt.method.empty())
        return opt.nmax > 0 ? return_series(k, opt.nmax) : compute_series(k, opt.tol);
    if (opt.nmax <= 0)
        throw std::invalid_argument("--method " + opt.method + " needs --nmax");
    if (opt.method == "integer") return return_series_integer(k, opt.nmax);
    if (opt.method == "dense") return return_series_dense(k, opt.nmax);
    if (opt.method == "quadrature") {
        ReturnSeries s;
        s.d = k.d;
        s.L = k.L;
        s.beta = k.beta;
        s.method = SeriesMethod::FourierQuadrature;
        s.r.resize(opt.nmax + 1);
        for (int n = 0; n <= opt.nmax; ++n) s.r[n] = fourier_quadrature_return(k, n);
        finalize_series_stats(s);
        return s;
    }
    throw std::invalid_argument("unknown --method " + opt.method);
}

std::string prediction_text(const Prediction& p) {
    std::ostringstream t;
    t << model_name(p.model) << " on Z^" << p.d << ", L = " << p.L << " (beta = " << p.beta
      << ")\n";
    t << "  p_c = 1 + C(D) + O(" << p.error_scale_kind << ")\n";
    t << "      = 1 + " << fmtg(p.correction_term) << " + O(" << fmtg(p.error_scale) << ")\n";
    t << "      = " << fmtg(p.p_c_leading) << "\n";
    t << "  series: N = " << p.truncation_N << " (" << series_method_name(p.method)
      << "), truncated sum " << fmtg(p.sum_truncated) << ", tail " << fmtg(p.tail_value)
      << (p.tail_valid ? "" : " [tail model invalid: tail set to 0]") << "\n";
    t << "  gauss constant " << fmtg(p.gauss_constant)
      << (p.gate_overridden ? "  [dimension gate overridden]" : "") << "\n";
    return t.str();
}

const char* kPredictCsvHeader =
    "model,d,L,beta,correction_term,p_c_leading,error_scale,error_scale_kind,"
    "truncation_N,tail_valid\n";

std::string prediction_csv_row(const Prediction& p) {
    std::ostringstream t;
    t << model_name(p.model) << ',' << p.d << ',' << p.L << ',' << fmtg(p.beta) << ','
      << fmtg(p.correction_term) << ',' << fmtg(p.p_c_leading) << ',' << fmtg(p.error_scale)
      << ',' << p.error_scale_kind << ',' << p.truncation_N << ',' << (p.tail_valid ? 1 : 0)
      << "\n";
    return t.str();
}

int cmd_predict(const Options& opt) {
    Model m = model_from_string(opt.model);
    std::vector<Prediction> preds;
    if (!opt.L_sweep.empty()) {
        if (!opt.kernel_file.empty())
            throw std::invalid_argument("--L-sweep and --kernel are mutually exclusive");
        if (opt.d <= 0) throw std::invalid_argument("--L-sweep needs --d");
        for (int L : opt.L_sweep)
            preds.push_back(opt.continuum_limit
                                ? predict_pc_continuum(m, opt.d, L, opt.tol, opt.allow_low_d)
                                : predict_pc(m, make_uniform(opt.d, L), opt.tol,
                                             opt.allow_low_d));
    } else if (opt.continuum_limit) {
        if (opt.d <= 0 || opt.L <= 0)
            throw std::invalid_argument("--continuum needs --d and --L");
        preds.push_back(predict_pc_continuum(m, opt.d, opt.L, opt.tol, opt.allow_low_d));
    } else {
        preds.push_back(predict_pc(m, resolve_kernel(opt), opt.tol, opt.allow_low_d));
    }

    std::string alt;
    if (opt.format == "csv") {
        alt = kPredictCsvHeader;
        for (const auto& p : preds) alt += prediction_csv_row(p);
    } else if (opt.format == "text") {
        for (const auto& p : preds) alt += prediction_text(p);
    }
    Json data = preds.size() == 1 ? Json(preds[0]) : Json(preds);
    emit(opt, "predict", data, alt);
    for (const auto& p : preds)
        if (opt.strict && !p.tail_valid) return 3;
    return 0;
}

int cmd_series(const Options& opt) {
    Kernel k = resolve_kernel(opt);
    ReturnSeries s = series_for(opt, k);
    std::string alt;
    if (opt.format == "csv") {
        std::ostringstream t;
        export_series_csv(s, t, opt.rational && !s.exact.empty());
        alt = t.str();
    } else if (opt.format == "text") {
        std::ostringstream t;
        t << "return probabilities r_n = D^{*n}(o), d = " << s.d << ", L = " << s.L
          << ", method " << series_method_name(s.method) << "\n";
        for (int n = 0; n <= s.max_n(); ++n) {
            t << "  n = " << n << ": " << fmtg(s.r[n]);
            if (!s.exact.empty() && opt.rational) t << " = " << rational_string(s.exact[n]);
            t << "\n";
        }
        t << "gauss constant " << fmtg(s.gauss_constant) << ", even-monotone "
          << (s.monotone_even ? "yes" : "no") << "\n";
        alt = t.str();
    }
    Json data = s;
    if (!opt.rational) data.erase("rational");
    emit(opt, "series", data, alt);
    return 0;
}

std::string sums_text(const LoopSums& ls) {
    std::ostringstream t;
    t << "loop sums, d = " << ls.d << ", L = " << ls.L << ", N = " << ls.N
      << " (beta = " << ls.beta << ")\n";
    auto tail_str = [](const TailEstimate& te) {
        std::ostringstream u;
        if (te.valid)
            u << "tail " << fmtg(te.value) << " (lambda = " << te.lambda << ")";
        else
            u << "tail invalid (set to 0)";
        return u.str();
    };
    t << "  sum r_n (n>=2)            = " << fmtg(ls.S_all) << "  " << tail_str(ls.tail_all)
      << "\n";
    t << "  sum r_2n (n>=2)           = " << fmtg(ls.S_even) << "  " << tail_str(ls.tail_even)
      << "\n";
    t << "  r_2 + sum (n+1)/2 r_n     = " << fmtg(ls.S_weighted) << "  "
      << tail_str(ls.tail_weighted) << "\n";
    if (ls.has_triangle)
        t << "  triangle sum C(n,2) r_n   = " << fmtg(ls.triangle) << "  "
          << tail_str(ls.tail_triangle) << "\n";
    t << "  gauss constant " << fmtg(ls.gauss_constant) << "\n";
    return t.str();
}

int cmd_sums(const Options& opt) {
    Kernel k = resolve_kernel(opt);
    ReturnSeries s = series_for(opt, k);
    LoopSums ls = loop_sums(s, opt.force_triangle);
    std::string alt;
    if (opt.format == "csv") {
        std::ostringstream t;
        t << "d,L,N,beta,S_all,S_even,S_weighted,gauss_constant,tail_all_valid,"
             "tail_even_valid,tail_weighted_valid,has_triangle,triangle,tail_triangle_valid\n";
        t << ls.d << ',' << ls.L << ',' << ls.N << ',' << fmtg(ls.beta) << ',' << fmtg(ls.S_all)
          << ',' << fmtg(ls.S_even) << ',' << fmtg(ls.S_weighted) << ','
          << fmtg(ls.gauss_constant) << ',' << ls.tail_all.valid << ',' << ls.tail_even.valid
          << ',' << ls.tail_weighted.valid << ',' << ls.has_triangle << ','
          << fmtg(ls.triangle) << ',' << ls.tail_triangle.valid << "\n";
        alt = t.str();
    } else if (opt.format == "text") {
        alt = sums_text(ls);
    }
    emit(opt, "sums", Json(ls), alt);
    const bool flagged = !ls.tail_all.valid || !ls.tail_even.valid || !ls.tail_weighted.valid ||
                         (ls.has_triangle && !ls.tail_triangle.valid);
    return opt.strict && flagged ? 3 : 0;
}

int cmd_continuum(const Options& opt) {
    if (opt.d <= 0) throw std::invalid_argument("continuum needs --d");
    ContinuumReturns c = continuum_series(opt.d, opt.nmax > 0 ? opt.nmax : 60);
    std::string alt;
    if (opt.format == "csv") {
        std::ostringstream t;
        t << "n,v_n,u_n\n";
        for (std::size_t n = 1; n < c.v.size(); ++n)
            t << n << ',' << fmtg(c.v[n]) << ',' << fmtg(c.u[n]) << "\n";
        alt = t.str();
    } else if (opt.format == "text") {
        std::ostringstream t;
        t << "continuum limit (L -> infinity), d = " << c.d
          << ": center densities v_n of n-fold uniform[-1,1] means and u_n = v_n^d\n";
        for (std::size_t n = 1; n < std::min<std::size_t>(c.v.size(), 13); ++n)
            t << "  n = " << n << ": v = " << fmtg(c.v[n]) << " = "
              << rational_string(c.v_exact[n]) << ", u = " << fmtg(c.u[n]) << "\n";
        if (c.v.size() > 13) t << "  ... (" << c.v.size() - 1 << " terms total)\n";
        t << "  gauss constant " << fmtg(c.gauss_constant) << ", even-monotone "
          << (c.monotone_even ? "yes" : "no") << "\n";
        alt = t.str();
    }
    emit(opt, "continuum", Json(c), alt);
    return 0;
}

int cmd_compare(const Options& opt) {
    if (opt.d <= 0) throw std::invalid_argument("compare needs --d");
    if (opt.L_sweep.empty()) throw std::invalid_argument("compare needs --L-sweep");
    CompareVariant v = CompareVariant::AllFrom3;
    if (opt.variant == "weighted")
        v = CompareVariant::WeightedFrom3;
    else if (opt.variant == "even")
        v = CompareVariant::EvenFrom2;
    else if (opt.variant != "all")
        throw std::invalid_argument("unknown --variant " + opt.variant);
    auto rows = compare_discrete_continuum(opt.d, opt.L_sweep, v, opt.tol);
    std::string alt;
    if (opt.format == "csv") {
        std::ostringstream t;
        t << "L,discrete,continuum,scaled_continuum,delta,ratio,tails_valid\n";
        for (const auto& r : rows)
            t << r.L << ',' << fmtg(r.discrete) << ',' << fmtg(r.continuum) << ','
              << fmtg(r.scaled_continuum) << ',' << fmtg(r.delta) << ',' << fmtg(r.ratio)
              << ',' << r.tails_valid << "\n";
        alt = t.str();
    } else if (opt.format == "text") {
        std::ostringstream t;
        t << "lattice loop sums vs beta-scaled continuum (" << opt.variant << " variant), d = "
          << opt.d << "\n";
        t << "  the ratio delta * L / beta should stay bounded as L grows\n";
        for (const auto& r : rows)
            t << "  L = " << r.L << ": discrete " << fmtg(r.discrete) << ", beta*continuum "
              << fmtg(r.scaled_continuum) << ", delta " << fmtg(r.delta) << ", ratio "
              << fmtg(r.ratio) << (r.tails_valid ? "" : " [tails invalid]") << "\n";
        alt = t.str();
    }
    emit(opt, "compare", Json(rows), alt);
    bool flagged = false;
    for (const auto& r : rows) flagged = flagged || !r.tails_valid;
    return opt.strict && flagged ? 3 : 0;
}

int cmd_saw_enum(const Options& opt) {
    Kernel k = resolve_kernel(opt);
    if (opt.nmax < 2) throw std::invalid_argument("saw-enum needs --nmax >= 2");
    LoopEnumeration loops;
    if (opt.method == "auto" || opt.method.empty())
        loops = saw_loop_sum(k, opt.nmax);
    else if (opt.method == "direct")
        loops = saw_loop_sum_route(k, opt.nmax, EnumerationRoute::DirectEnumeration);
    else if (opt.method == "partition")
        loops = saw_loop_sum_route(k, opt.nmax, EnumerationRoute::PartitionCount);
    else
        throw std::invalid_argument("unknown --route " + opt.method);
    std::string alt;
    if (opt.format == "csv") {
        std::ostringstream t;
        export_loops_csv(loops, t);
        alt = t.str();
    } else if (opt.format == "text") {
        std::ostringstream t;
        t << "self-avoiding returning loops, d = " << loops.d << ", L = " << loops.L
          << ", route "
          << (loops.route == EnumerationRoute::DirectEnumeration ? "direct" : "partition")
          << "\n";
        for (int n = 2; n <= loops.nmax; ++n)
            t << "  n = " << n << ": all loops " << fmtg(loops.all_weight[n]) << ", non-repeating "
              << fmtg(loops.saw_weight[n]) << "\n";
        t << "  leading expansion coefficient (truncated): " << fmtg(loops.pi1_truncated);
        if (!loops.saw_exact.empty()) t << " = " << rational_string(loops.pi1_exact);
        t << "\n";
        alt = t.str();
    }
    emit(opt, "saw-enum", Json(loops), alt);
    return 0;
}

int cmd_triangle(const Options& opt) {
    std::vector<int> Ls = opt.L_sweep;
    if (Ls.empty()) {
        if (opt.L <= 0) throw std::invalid_argument("triangle needs --L or --L-sweep");
        Ls.push_back(opt.L);
    }
    if (opt.d <= 0) throw std::invalid_argument("triangle needs --d");
    std::vector<LoopSums> rows;
    for (int L : Ls) {
        Kernel k = make_uniform(opt.d, L);
        ReturnSeries s = opt.nmax > 0 ? return_series(k, opt.nmax) : compute_series(k, opt.tol);
        rows.push_back(loop_sums(s, opt.force_triangle));
    }
    std::string alt;
    if (opt.format == "csv") {
        std::ostringstream t;
        t << "d,L,beta,triangle,triangle_scaled,tail_valid\n";
        for (const auto& ls : rows)
            t << ls.d << ',' << ls.L << ',' << fmtg(ls.beta) << ',' << fmtg(ls.triangle) << ','
              << fmtg(ls.triangle / ls.beta) << ',' << ls.tail_triangle.valid << "\n";
        alt = t.str();
    } else if (opt.format == "text") {
        std::ostringstream t;
        t << "triangle diagram sum C(n,2) r_n, d = " << opt.d
          << " (finite only for d > 6; scaled column is triangle / beta)\n";
        for (const auto& ls : rows)
            t << "  L = " << ls.L << ": " << fmtg(ls.triangle) << ", scaled "
              << fmtg(ls.triangle / ls.beta)
              << (ls.tail_triangle.valid ? "" : " [tail invalid]") << "\n";
        alt = t.str();
    }
    emit(opt, "triangle", Json(rows), alt);
    bool flagged = false;
    for (const auto& ls : rows) flagged = flagged || !ls.tail_triangle.valid;
    return opt.strict && flagged ? 3 : 0;
}

int cmd_cp_limit(const Options& opt) {
    Kernel k = resolve_kernel(opt);
    ReturnSeries s = opt.nmax > 0 ? return_series(k, opt.nmax) : compute_series(k, opt.tol);
    LoopSums ls = loop_sums(s);
    std::vector<CpLimitRow> rows;
    for (double e : opt.eps) {
        if (!(e > 0.0 && e <= 1.0))
            throw std::invalid_argument("cp-limit: eps must be in (0, 1]");
        CpLimitRow row;
        row.eps = e;
        row.f = cp_epsilon_sum(s, e, opt.tol);
        row.s_all = ls.S_all;
        row.gap = std::abs(row.f - row.s_all);
        rows.push_back(row);
    }
    std::string alt;
    if (opt.format == "csv") {
        std::ostringstream t;
        t << "eps,f,s_all,gap\n";
        for (const auto& r : rows)
            t << fmtg(r.eps) << ',' << fmtg(r.f) << ',' << fmtg(r.s_all) << ',' << fmtg(r.gap)
              << "\n";
        alt = t.str();
    } else if (opt.format == "text") {
        std::ostringstream t;
        t << "contact-process discretization f(eps) -> sum r_n as eps -> 0, d = " << s.d
          << ", L = " << s.L << "\n";
        t << "  target sum r_n (n>=2) = " << fmtg(ls.S_all) << "\n";
        for (const auto& r : rows)
            t << "  eps = " << fmtg(r.eps) << ": f = " << fmtg(r.f) << ", gap " << fmtg(r.gap)
              << " (gap/eps = " << fmtg(r.gap / r.eps) << ")\n";
        alt = t.str();
    }
    emit(opt, "cp-limit", Json(rows), alt);
    return opt.strict && !ls.tail_all.valid ? 3 : 0;
}

Json sim_config_json(const SimConfig& c) {
    return Json{{"seed", c.seed},
                {"trials", c.trials},
                {"horizon", c.horizon},
                {"p", c.p},
                {"ignore_collisions", c.ignore_collisions},
                {"poisson_offspring", c.poisson_offspring},
                {"max_active", c.max_active},
                {"survival_threshold", c.survival_threshold},
                {"bisect_tol", c.bisect_tol},
                {"p_lo", c.p_lo},
                {"p_hi", c.p_hi},
                {"workers", c.workers}};
}

int cmd_simulate(const Options& opt) {
    Kernel k = resolve_kernel(opt);
    const SimConfig& cfg = opt.sim;
    std::cerr << "# simulate-op task=" << opt.task << " d=" << k.d << " L=" << k.L
              << " trials=" << cfg.trials << " horizon=" << cfg.horizon << " seed=" << cfg.seed
              << (cfg.ignore_collisions ? " (ghost mode)" : "") << "\n";
    const auto t0 = std::chrono::steady_clock::now();

    Json data;
    std::string alt;
    bool flagged = false;
    if (opt.task == "pc") {
        PcEstimate est = op_pc_estimate(k, cfg);
        data = est;
        flagged = !est.monotone_ok;
        if (opt.format == "csv") {
            std::ostringstream t;
            t << "p_c,stderr,survival_at_pc,slope,evaluations,trials,monotone_ok,seed\n"
              << fmtg(est.p_c) << ',' << fmtg(est.std_error) << ',' << fmtg(est.survival_at_pc)
              << ',' << fmtg(est.slope) << ',' << est.evaluations << ',' << est.trials << ','
              << est.monotone_ok << ',' << est.seed << "\n";
            alt = t.str();
        } else if (opt.format == "text") {
            std::ostringstream t;
            t << "bisection estimate of the survival threshold, d = " << k.d << ", L = " << k.L
              << "\n  p_c ~ " << fmtg(est.p_c) << " +- " << fmtg(est.std_error) << " ("
              << est.evaluations << " evaluations x " << est.trials << " trials)\n"
              << "  survival at the estimate: " << fmtg(est.survival_at_pc) << ", local slope "
              << fmtg(est.slope) << "\n  CRN coupling monotone: "
              << (est.monotone_ok ? "yes" : "VIOLATED") << "\n";
            alt = t.str();
        }
    } else {
        SimEstimate est;
        const char* what = nullptr;
        if (opt.task == "survival") {
            est = op_survival(k, cfg.p, cfg);
            what = "survival probability to the horizon";
        } else if (opt.task == "double-connection") {
            est = op_double_connection_sum(k, cfg);
            what = "doubly-connected pair count";
        } else if (opt.task == "return") {
            if (opt.n_steps < 0) throw std::invalid_argument("--task return needs --n");
            est = mc_return(k, opt.n_steps, cfg);
            what = "n-step return frequency";
        } else {
            throw std::invalid_argument("unknown --task " + opt.task);
        }
        data = est;
        flagged = est.flagged_trials > 0;
        if (opt.format == "csv") {
            std::ostringstream t;
            t << "value,stderr,trials,dropped_trials,flagged_trials,seed\n"
              << fmtg(est.value) << ',' << fmtg(est.std_error) << ',' << est.trials << ','
              << est.dropped_trials << ',' << est.flagged_trials << ',' << est.seed << "\n";
            alt = t.str();
        } else if (opt.format == "text") {
            std::ostringstream t;
            t << what << ", d = " << k.d << ", L = " << k.L << ", p = " << fmtg(cfg.p)
              << "\n  estimate " << fmtg(est.value) << " +- " << fmtg(est.std_error) << " ("
              << est.trials << " trials, " << est.dropped_trials << " dropped, "
              << est.flagged_trials << " flagged)\n";
            alt = t.str();
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "# done in " << secs << " s\n";
    data["config"] = sim_config_json(cfg);
    data["wall_seconds"] = secs;
    emit(opt, "simulate-op", data, alt);
    return opt.strict && flagged ? 3 : 0;
}

int cmd_verify(const Options& opt) {
    std::vector<int> ids;
    if (opt.criterion > 0)
        ids.push_back(opt.criterion);
    else
        ids = opt.suite == "full" ? suite_full() : suite_fast();
    std::vector<CriterionResult> results;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::cerr << "# [" << i + 1 << "/" << ids.size() << "] running " << ids[i] << " "
                  << criterion_name(ids[i]) << " ...\n";
        results.push_back(run_criterion(ids[i]));
        const auto& r = results.back();
        std::cerr << "#   " << (r.pass ? "PASS" : "FAIL") << " (" << r.seconds << " s)\n";
    }
    std::string alt;
    if (opt.format == "csv") {
        std::ostringstream t;
        t << "id,name,pass,gating,seconds,detail\n";
        for (const auto& r : results)
            t << r.id << ',' << r.name << ',' << r.pass << ',' << r.gating << ','
              << fmtg(r.seconds) << ',' << csv_quote(r.detail) << "\n";
        alt = t.str();
    } else if (opt.format == "text") {
        std::ostringstream t;
        for (const auto& r : results)
            t << (r.pass ? "PASS" : (r.gating ? "FAIL" : "soft-fail")) << "  " << r.id << " "
              << r.name << "  (" << r.seconds << " s)\n      " << r.detail << "\n";
        t << (suite_passed(results) ? "all gating checks passed" : "GATING CHECKS FAILED")
          << "\n";
        alt = t.str();
    }
    emit(opt, "verify", Json(results), alt);
    return suite_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spread-out critical point expansions: p_c = 1 + C(D) + O(beta^2)"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    Options opt;

    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--format", opt.format, "json | csv | text")
            ->check(CLI::IsMember({"json", "csv", "text"}));
        sub->add_option("--output", opt.output, "write to file instead of stdout");
        sub->add_flag("--no-meta", opt.no_meta, "omit the meta block for byte-stable output");
        sub->add_flag("--strict", opt.strict, "exit 3 when results carry invalid-tail flags");
        sub->add_option("--config", opt.config_file,
                        "key=value file, '#' comments; flags take precedence");
    };
    auto add_kernel = [&](CLI::App* sub) {
        sub->add_option("--d", opt.d, "dimension");
        sub->add_option("--L", opt.L, "spread-out range");
        sub->add_option("--kernel", opt.kernel_file, "kernel file (overrides --d/--L)");
    };
    auto add_series = [&](CLI::App* sub) {
        sub->add_option("--nmax", opt.nmax, "series length (0 = tolerance-driven)");
        sub->add_option("--tol", opt.tol, "tail tolerance for the automatic truncation");
    };

    CLI::App* predict = app.add_subcommand("predict", "leading-order critical point");
    predict->add_option("--model", opt.model, "saw | perc | op | cp")->required();
    predict->add_flag("--allow-low-d", opt.allow_low_d, "compute below the dimension gate");
    predict->add_flag("--continuum", opt.continuum_limit, "use the continuum loop sums");
    predict->add_option("--L-sweep", opt.L_sweep, "comma list of L values")->delimiter(',');
    add_kernel(predict);
    add_series(predict);
    add_output(predict);

    CLI::App* series = app.add_subcommand("series", "return probabilities r_n");
    series->add_option("--method", opt.method, "auto | integer | dense | quadrature");
    series->add_flag("--rational", opt.rational, "include exact rationals when available");
    add_kernel(series);
    add_series(series);
    add_output(series);

    CLI::App* sums = app.add_subcommand("sums", "loop sums and tails");
    sums->add_flag("--force-triangle", opt.force_triangle,
                   "compute the triangle sum below d = 7");
    add_kernel(sums);
    add_series(sums);
    add_output(sums);

    CLI::App* cont = app.add_subcommand("continuum", "L -> infinity limit series");
    cont->add_option("--d", opt.d, "dimension");
    cont->add_option("--nmax", opt.nmax, "series length (default 60)");
    add_output(cont);

    CLI::App* compare = app.add_subcommand("compare", "lattice sums vs continuum limits");
    compare->add_option("--d", opt.d, "dimension");
    compare->add_option("--L-sweep", opt.L_sweep, "comma list of L values")->delimiter(',');
    compare->add_option("--variant", opt.variant, "all | weighted | even");
    compare->add_option("--tol", opt.tol, "tail tolerance");
    add_output(compare);

    CLI::App* sawe = app.add_subcommand("saw-enum", "self-avoiding returning loops");
    sawe->add_option("--nmax", opt.nmax, "maximum loop length")->required();
    sawe->add_option("--route", opt.method, "auto | direct | partition");
    add_kernel(sawe);
    add_output(sawe);

    CLI::App* tri = app.add_subcommand("triangle", "triangle diagram across L");
    tri->add_option("--d", opt.d, "dimension");
    tri->add_option("--L", opt.L, "single L");
    tri->add_option("--L-sweep", opt.L_sweep, "comma list of L values")->delimiter(',');
    tri->add_flag("--force-triangle", opt.force_triangle, "compute below d = 7");
    add_series(tri);
    add_output(tri);

    CLI::App* cpl = app.add_subcommand("cp-limit", "contact-process discretization limit");
    cpl->add_option("--eps", opt.eps, "comma list of time steps in (0, 1]")->delimiter(',');
    add_kernel(cpl);
    add_series(cpl);
    add_output(cpl);

    CLI::App* sim = app.add_subcommand("simulate-op", "Monte Carlo cross-checks");
    sim->add_option("--task", opt.task, "survival | pc | double-connection | return");
    sim->add_option("--n", opt.n_steps, "walk length for --task return");
    sim->add_option("--p", opt.sim.p, "bond strength multiplier");
    sim->add_option("--seed", opt.sim.seed, "RNG seed");
    sim->add_option("--trials", opt.sim.trials, "trials (>= 100)");
    sim->add_option("--horizon", opt.sim.horizon, "generations T");
    sim->add_flag("--ghost", opt.sim.ignore_collisions, "ignore collisions (branching process)");
    sim->add_flag("--poisson", opt.sim.poisson_offspring, "Poisson offspring (ghost mode only)");
    sim->add_option("--max-active", opt.sim.max_active, "per-trial active-site cap");
    sim->add_option("--threshold", opt.sim.survival_threshold, "bisection survival threshold");
    sim->add_option("--bisect-tol", opt.sim.bisect_tol, "bisection width target");
    sim->add_option("--p-lo", opt.sim.p_lo, "bisection bracket low");
    sim->add_option("--p-hi", opt.sim.p_hi, "bisection bracket high");
    sim->add_option("--workers", opt.sim.workers, "worker threads (0 = default)");
    add_kernel(sim);
    add_output(sim);

    CLI::App* verify = app.add_subcommand("verify", "run the self-check battery");
    verify->add_option("--suite", opt.suite, "fast | full")
        ->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--criterion", opt.criterion, "run one numbered check");
    add_output(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!opt.config_file.empty())
            for (CLI::App* sub : app.get_subcommands()) apply_config(sub, opt.config_file);
        if (app.got_subcommand(predict)) return cmd_predict(opt);
        if (app.got_subcommand(series)) return cmd_series(opt);
        if (app.got_subcommand(sums)) return cmd_sums(opt);
        if (app.got_subcommand(cont)) return cmd_continuum(opt);
        if (app.got_subcommand(compare)) return cmd_compare(opt);
        if (app.got_subcommand(sawe)) return cmd_saw_enum(opt);
        if (app.got_subcommand(tri)) return cmd_triangle(opt);
        if (app.got_subcommand(cpl)) return cmd_cp_limit(opt);
        if (app.got_subcommand(sim)) return cmd_simulate(opt);
        if (app.got_subcommand(verify)) return cmd_verify(opt);
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::range_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
