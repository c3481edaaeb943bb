#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adwords/instance.hpp"

namespace adwords {

enum class Scale { kSmoke, kFull };

Scale scale_from_string(const std::string& name);
std::string to_string(Scale scale);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  Scale scale = Scale::kFull;
  int jobs = 1;
  std::uint64_t seed = 20240601;
  // Called after each criterion finishes, e.g. to print progress.
  std::function<void(const CriterionResult&)> on_result;
};

// Runs criteria 1..10 in order. Smoke scale lowers the Monte-Carlo trial
// counts; tolerances are the same at both scales.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

// One "PASS"/"FAIL" line per criterion.
std::string format_result(const CriterionResult& result);

// Exhaustive maxima over every query -> bidder assignment that respects match
// caps (OBM, SINGLE_VALUED) or budgets (GENERAL). Exponential; meant for
// n <= 8.
Money brute_force_optimum(const Instance& instance);

}  // namespace adwords
