// Acceptance gate runner.  Prints one PASS/FAIL line per criterion and exits
// nonzero iff a gating criterion failed.  Usage:
//   spreadout_acceptance [--criterion N | --suite fast|full]
#include <spreadout/verify.hpp>

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

using namespace spreadout;

static int report(const std::vector<CriterionResult>& results) {
    bool ok = true;
    for (const auto& r : results) {
        const char* tag = r.pass ? "PASS" : (r.gating ? "FAIL" : "soft-fail");
        std::printf("%-9s %2d %-26s (%6.2f s)  %s\n", tag, r.id, r.name.c_str(),
                    r.seconds, r.detail.c_str());
        if (r.gating && !r.pass) ok = false;
    }
    std::printf("%s\n", ok ? "acceptance: all gating criteria passed"
                           : "acceptance: gating failure");
    return ok ? 0 : 1;
}

int main(int argc, char** argv) {
    int criterion = 0;
    std::string suite = "full";
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
            criterion = std::atoi(argv[++i]);
        } else if (!std::strcmp(argv[i], "--suite") && i + 1 < argc) {
            suite = argv[++i];
        } else {
            std::fprintf(stderr,
                         "usage: %s [--criterion N | --suite fast|full]\n",
                         argv[0]);
            return 2;
        }
    }

    std::vector<int> ids;
    if (criterion > 0) {
        if (criterion > criterion_count()) {
            std::fprintf(stderr, "no such criterion: %d\n", criterion);
            return 2;
        }
        ids = {criterion};
    } else if (suite == "fast") {
        ids = suite_fast();
    } else if (suite == "full") {
        ids = suite_full();
    } else {
        std::fprintf(stderr, "unknown suite: %s\n", suite.c_str());
        return 2;
    }

    std::vector<CriterionResult> results;
    results.reserve(ids.size());
    for (int id : ids) results.push_back(run_criterion(id));
    return report(results);
}
