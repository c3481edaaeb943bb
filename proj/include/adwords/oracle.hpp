#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adwords/instance.hpp"

namespace adwords {

enum class OptimumKind { kExact, kUpperBound, kPlantedCertificate };

std::string to_string(OptimumKind kind);

struct OfflineOptimum {
  Money value = 0;
  std::optional<std::vector<Assignment>> witness;
  OptimumKind kind = OptimumKind::kExact;
};

class NodeLimitExceeded : public std::runtime_error {
 public:
  explicit NodeLimitExceeded(long long limit)
      : std::runtime_error("branch-and-bound exceeded node limit " + std::to_string(limit)) {}
};

// Maximum-cardinality matching by augmenting paths.
OfflineOptimum opt_obm(const Instance& instance);

// Maximum-weight b-matching (query capacity 1, bidder capacity k_j, weight
// b_j) by successive shortest paths on the bipartite flow network.
OfflineOptimum opt_single_valued(const Instance& instance);

// Exact optimum of a GENERAL instance by depth-first branch-and-bound over
// query assignments. Throws NodeLimitExceeded once more than `node_limit`
// nodes have been expanded.
OfflineOptimum opt_general_exact(const Instance& instance, long long node_limit = 5'000'000);

// min(sum_j B_j, sum_i max_j bid(i,j)).
OfflineOptimum opt_general_bound(const Instance& instance);

// The planted assignment, when it is feasible and meets opt_general_bound
// (which proves it optimal).
std::optional<OfflineOptimum> planted_certificate(const Instance& instance);

// Exact or certified optimum for the instance's class: planted certificate if
// available, otherwise the class's exact solver. GENERAL instances that
// exceed the node limit fall back to the upper bound when `allow_upper_bound`
// is set and rethrow otherwise.
OfflineOptimum best_optimum(const Instance& instance, bool allow_upper_bound = false,
                            long long node_limit = 5'000'000);

}  // namespace adwords
