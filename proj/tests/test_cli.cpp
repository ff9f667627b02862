#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks against the installed binary (path injected by the build).
#ifndef SPREADOUT_CLI_PATH
#error "SPREADOUT_CLI_PATH must point at the CLI binary"
#endif

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string tmp = "tmp_cli_out_" + std::to_string(counter++) + ".txt";
    const std::string cmd =
        std::string("\"") + SPREADOUT_CLI_PATH + "\" " + args + " > " + tmp + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    if (status != -1 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
    r.out = slurp(tmp);
    std::remove(tmp.c_str());
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("series csv lists the simple random walk returns") {
    RunResult r = run_cli("series --d 1 --L 1 --nmax 4 --format csv");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "n,r_n,method,d,L"));
    CHECK(contains(r.out, "0,1,integer,1,1"));
    CHECK(contains(r.out, "1,0,integer,1,1"));
    CHECK(contains(r.out, "2,0.5,integer,1,1"));
    CHECK(contains(r.out, "3,0,integer,1,1"));
    CHECK(contains(r.out, "4,0.375,integer,1,1"));
}

TEST_CASE("series json envelope parses and carries the requested rationals") {
    RunResult r = run_cli("series --d 2 --L 1 --nmax 4 --rational");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("schema").get<int>() == 1);
    CHECK(j.at("kind").get<std::string>() == "series");
    CHECK(j.contains("meta"));
    CHECK(j.at("data").at("rational")[2].get<std::string>() == "1/8");
    CHECK(j.at("data").at("r")[2].get<double>() == doctest::Approx(0.125));

    RunResult bare = run_cli("series --d 2 --L 1 --nmax 4");
    auto jb = nlohmann::json::parse(bare.out);
    CHECK(!jb.at("data").contains("rational"));
}

TEST_CASE("percolation prediction below the dimension gate exits 2") {
    RunResult r = run_cli("predict --model perc --d 3 --L 4");
    CHECK(r.code == 2);
}

TEST_CASE("prediction with override runs and flags the gate") {
    RunResult r = run_cli("predict --model perc --d 3 --L 4 --allow-low-d");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("data").at("components").at("gate_overridden").get<bool>());
}

TEST_CASE("prediction csv has the documented header") {
    RunResult r = run_cli("predict --model op --d 5 --L 1 --format csv");
    CHECK(r.code == 0);
    CHECK(contains(r.out,
                   "model,d,L,beta,correction_term,p_c_leading,error_scale,"
                   "error_scale_kind,truncation_N,tail_valid"));
    CHECK(contains(r.out, "op,5,1,1,"));
}

TEST_CASE("unknown verify suite and missing subcommand exit 2") {
    CHECK(run_cli("verify --suite bogus").code == 2);
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("no-meta output is byte stable across runs") {
    RunResult a = run_cli("sums --d 7 --L 1 --nmax 20 --no-meta");
    RunResult b = run_cli("sums --d 7 --L 1 --nmax 20 --no-meta");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto j = nlohmann::json::parse(a.out);
    CHECK(!j.contains("meta"));
}

TEST_CASE("strict mode exits 3 when tails are invalid") {
    // d=2 is recurrent: every geometric tail is rejected there.
    CHECK(run_cli("sums --d 2 --L 1 --nmax 8 --strict").code == 3);
    CHECK(run_cli("sums --d 2 --L 1 --nmax 8").code == 0);
    CHECK(run_cli("sums --d 7 --L 1 --nmax 20 --strict").code == 0);
}

TEST_CASE("output file and bad output directory") {
    const std::string path = "tmp_cli_series.json";
    RunResult r = run_cli("series --d 1 --L 1 --nmax 4 --output " + path);
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(slurp(path));
    CHECK(j.at("kind").get<std::string>() == "series");
    std::remove(path.c_str());
    CHECK(run_cli("series --d 1 --L 1 --nmax 4 --output no_such_dir_abc/x.json").code == 4);
}

TEST_CASE("continuum csv exposes the exact small-n densities") {
    RunResult r = run_cli("continuum --d 5 --nmax 10 --format csv");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "n,v_n,u_n"));
    CHECK(contains(r.out, "2,0.5,"));
    CHECK(contains(r.out, "4,0.33333333333333331,"));
}

TEST_CASE("saw-enum text shows the exact leading coefficient") {
    RunResult r = run_cli("saw-enum --d 1 --L 1 --nmax 4 --format text");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "route direct"));
    CHECK(contains(r.out, "= 1/2"));
}

TEST_CASE("config file supplies defaults and flags win") {
    const std::string cfg = "tmp_cli_config.ini";
    {
        std::ofstream out(cfg);
        out << "# kernel under test\n";
        out << "d=1\n";
        out << "L=1\n";
        out << "nmax=4\n";
        out << "format=csv\n";
    }
    RunResult from_cfg = run_cli("series --config " + cfg);
    CHECK(from_cfg.code == 0);
    CHECK(contains(from_cfg.out, "4,0.375,integer,1,1"));
    // A flag on the command line overrides the config value.
    RunResult overridden = run_cli("series --config " + cfg + " --nmax 2");
    CHECK(overridden.code == 0);
    CHECK(contains(overridden.out, "2,0.5,integer,1,1"));
    CHECK(!contains(overridden.out, "4,0.375"));
    std::remove(cfg.c_str());
}

TEST_CASE("cp-limit csv narrows toward the loop sum") {
    RunResult r = run_cli("cp-limit --d 5 --L 2 --nmax 40 --eps 1,0.5 --format csv");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "eps,f,s_all,gap"));
    // Two data rows.
    int rows = 0;
    for (char c : r.out)
        if (c == '\n') ++rows;
    CHECK(rows == 3);
}

TEST_CASE("version flag prints the tool version") {
    RunResult r = run_cli("--version");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "0.1.0"));
}

TEST_CASE("simulate-op return task matches the exact value loosely") {
    RunResult r = run_cli(
        "simulate-op --task return --n 2 --d 1 --L 1 --trials 2000 --seed 5 --no-meta");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    const double v = j.at("data").at("value").get<double>();
    CHECK(v > 0.4);
    CHECK(v < 0.6);
    CHECK(j.at("data").at("config").at("trials").get<int>() == 2000);
    CHECK(j.at("data").contains("wall_seconds"));
}
