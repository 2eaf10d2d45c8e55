// Acceptance suite: runs every verification criterion and prints one
// pass/fail line each. Exits nonzero if anything fails.

#include <cstdio>

#include "kcv/check.hpp"

int main() {
    int failed = 0;
    for (const kcv::check::CriterionResult& r : kcv::check::run_all()) {
        std::printf("criterion %2d [%s] %s: %s (%.2f s)\n", r.id, r.passed ? "PASS" : "FAIL",
                    r.name.c_str(), r.details.c_str(), r.seconds);
        std::fflush(stdout);
        if (!r.passed) ++failed;
    }
    if (failed == 0)
        std::printf("ALL PASS\n");
    else
        std::printf("FAILURES: %d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
