#pragma once

// Self-check battery: each numbered check recomputes one headline claim two
// independent ways (exact vs floating, series vs quadrature, simulation vs
// closed form) and compares under a pinned tolerance.  The "fast" suite is the
// deterministic subset; "full" adds the Monte Carlo checks.

#include <string>
#include <vector>

namespace spreadout {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool gating = true;  // non-gating checks report but never fail a suite
    std::string detail;
    double seconds = 0.0;
};

int criterion_count();
const char* criterion_name(int id);
bool criterion_gating(int id);

CriterionResult run_criterion(int id);

std::vector<int> suite_fast();
std::vector<int> suite_full();

// True when every gating result passed.
bool suite_passed(const std::vector<CriterionResult>& results);

}  // namespace spreadout
