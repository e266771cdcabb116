#pragma once

#include <functional>
#include <string>
#include <vector>

namespace wlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult()> run;
};

/// The acceptance suite: every tolerance pinned in code. Used by both the
/// ctest acceptance binary and the CLI verify-all command.
std::vector<Criterion> acceptance_criteria();

/// Runs all criteria, printing one pass/fail line per criterion to the given
/// stream. Returns the number of failures.
int run_acceptance(std::ostream& out);

}  // namespace wlab
