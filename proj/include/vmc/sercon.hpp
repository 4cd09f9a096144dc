#pragma once

#include <cstdint>
#include <limits>

#include "vmc/balcon.hpp"

namespace vmc {

/// Free-space-only consolidation: one pass over hosts in release order, best
/// fit placement of the evacuated VMs, acceptance by objective. Never evicts.
SolveResult sercon_modified(const Instance& inst, const SolverParams& params);

struct SerconOriginalParams {
  /// Budget on the number of migrated VMs over all committed releases.
  std::int64_t max_total_migrations = std::numeric_limits<std::int64_t>::max();
  /// Fraction of a host's VMs that must find a place before an attempt is
  /// abandoned early; commits still require every VM to be placed.
  Rational min_migration_efficiency{0};

  void validate() const;
};

/// Multi-pass variant: up to |H| passes over the active hosts (ordered by
/// current migration cost), each VM placed first-fit over hosts in descending
/// surrogate load, with a global migration-count budget.
SolveResult sercon_original(const Instance& inst, const SolverParams& params,
                            const SerconOriginalParams& sp);

}  // namespace vmc
