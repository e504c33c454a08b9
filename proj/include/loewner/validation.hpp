#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/parallel.hpp"
#include "loewner/reverse_solver.hpp"

namespace loewner {

/// One acceptance check: a measured value against its tolerance within a wall-time budget.
struct CheckResult {
  int id = 0;
  std::string key;    // short name used by --only
  std::string title;
  double value = 0.0;
  double tolerance = 0.0;
  bool at_least = false;  // value must be >= tolerance instead of <=
  bool value_ok = false;
  double seconds = 0.0;
  double budget = 0.0;
  nlohmann::json detail;
  std::string message;  // set when the check threw

  bool pass() const { return value_ok && seconds <= budget; }
};

struct ValidationOptions {
  std::set<std::string> only;  // empty: everything
  SolverConfig solver;         // used by every reverse solve the checks make
  Exec exec = Exec::parallel;
  int grid_points = 256;
  /// Grid sizes of the incremental timing fit.
  std::vector<int> scaling_sizes{512, 1024, 2048};
};

struct CheckInfo {
  int id;
  std::string key;
  std::string title;
};
const std::vector<CheckInfo>& validation_checks();

/// Runs the selected checks in id order. Unknown keys in `only` throw DomainError.
std::vector<CheckResult> run_validation(const ValidationOptions& opts = {});

/// "PASS [ 4] roundtrip  value=... tol=... time=.../...s  title" style line.
std::string format_result(const CheckResult& r);

nlohmann::json to_json(const CheckResult& r);

}  // namespace loewner
