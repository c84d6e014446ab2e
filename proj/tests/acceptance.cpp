// Acceptance gate: runs every verification suite at its pinned sizes,
// seeds and thresholds, enforces the runtime budgets, and prints one
// pass/fail line per criterion. Exit code 0 iff everything passes.

#include <cstdio>

#include "jdpp/suites.hpp"

namespace {

struct Criterion {
  int number;
  const char* suite;
  double budget_seconds;  // 0 = no budget
};

constexpr Criterion kCriteria[] = {
    {1, "car", 30.0},
    {2, "rho-algebra", 60.0},
    {3, "wick", 120.0},
    {4, "moment-routes", 600.0},
    {5, "moment-identity", 0.0},
    {6, "pushforward", 0.0},
    {7, "nonnegativity", 0.0},
    {8, "worked-example", 0.0},
    {9, "growth-bounds", 0.0},
    {10, "quasifree-forms", 0.0},
    {11, "sampler", 0.0},
};

}  // namespace

int main() {
  const jdpp::SuiteContext ctx;  // pinned instances only
  bool all_pass = true;

  for (const Criterion& c : kCriteria) {
    jdpp::SuiteResult res;
    bool threw = false;
    std::string what;
    try {
      res = jdpp::run_suite(c.suite, ctx);
    } catch (const std::exception& e) {
      threw = true;
      what = e.what();
    }
    const bool in_budget = c.budget_seconds == 0.0 || res.runtime_seconds < c.budget_seconds;
    const bool ok = !threw && res.pass && in_budget;
    all_pass = all_pass && ok;

    if (threw) {
      std::printf("[FAIL] criterion-%02d %-34s error: %s\n", c.number, c.suite, what.c_str());
      continue;
    }
    std::printf("[%s] criterion-%02d %-34s max_disc=%.3e thr=%.1e runtime=%.1fs", ok ? "PASS" : "FAIL",
                c.number, res.exercises.c_str(), res.max_discrepancy, res.threshold,
                res.runtime_seconds);
    if (c.budget_seconds > 0.0) std::printf(" (budget %.0fs)", c.budget_seconds);
    if (!in_budget) std::printf(" OVER BUDGET");
    std::printf("\n");
  }

  std::printf("%s\n", all_pass ? "acceptance: all criteria pass" : "acceptance: FAILURES");
  return all_pass ? 0 : 1;
}
