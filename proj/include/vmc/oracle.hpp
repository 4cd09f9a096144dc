#pragma once

#include <cstdint>
#include <stdexcept>

#include "vmc/model.hpp"

namespace vmc {

struct OracleLimits {
  std::size_t max_vms = 10;
  std::size_t max_hosts = 4;
  /// Upper bound on |H|^|V|, the size of the enumerated assignment space.
  std::uint64_t node_budget = 10'000'000;
};

/// Raised when an instance is too large for exhaustive search.
class OracleRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  Mapping mapping;
  ObjectiveValue objective;
  std::uint64_t nodes_explored = 0;
};

/// Exact minimizer of the objective by depth-first enumeration of per-VM host
/// choices with capacity pruning and an active-host volume bound. Among
/// optimal mappings returns the lexicographically smallest assignment vector.
OracleResult brute_force_optimal(const Instance& inst, const ObjectiveWeights& w,
                                 const OracleLimits& limits = {});

/// Smallest k such that the k largest hosts cover the total demand, taken
/// per resource and maximized over both resources.
std::int64_t min_active_hosts_bound(const Instance& inst);

}  // namespace vmc
