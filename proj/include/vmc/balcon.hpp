#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vmc/classify.hpp"
#include "vmc/model.hpp"

namespace vmc {

struct SolverParams {
  Rational alpha{19, 20};
  /// Maximal number of Force Steps per host-release attempt.
  std::int64_t max_force_steps = 4000;
  /// Maximal consecutive choices of one destination host during Force Steps.
  std::int64_t gamma = 3;
  ObjectiveWeights weights = ObjectiveWeights::infinite_mph();
  /// Record a TraceEvent for every stash step.
  bool trace = false;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Forbids picking the same destination host more than gamma times in a row.
class RepeatsProhibitor {
 public:
  explicit RepeatsProhibitor(std::int64_t gamma) : gamma_(gamma) {}

  /// Candidates minus the last chosen host if it has hit the repeat limit.
  [[nodiscard]] std::vector<HostId> filter(std::span<const HostId> candidates) const;
  void record(HostId h);

  [[nodiscard]] std::optional<HostId> last() const { return last_; }
  [[nodiscard]] std::int64_t consecutive() const { return count_; }

 private:
  std::int64_t gamma_;
  std::optional<HostId> last_;
  std::int64_t count_ = 0;
};

enum class Resource { Cpu, Mem };

/// The lopsided-placement resource toggle, reset to cpu for every ForceFit call.
struct ResourceToggle {
  Resource r = Resource::Cpu;
  void flip() { r = (r == Resource::Cpu) ? Resource::Mem : Resource::Cpu; }
};

struct TraceEvent {
  HostId released_host = kUnassigned;
  VmId vm = 0;
  ClusterClass cls = ClusterClass::Ample;
  /// kUnassigned when no destination could be chosen (attempt aborted).
  HostId destination = kUnassigned;
  std::vector<VmId> evicted;
};

struct ReleaseRecord {
  HostId host = kUnassigned;
  bool accepted = false;
  std::int64_t force_steps = 0;
  /// Counts of stash steps by class: ample, balanced, lopsided.
  std::array<std::int64_t, 3> class_counts{};
  /// Migrated memory of the best mapping before and after this attempt.
  std::int64_t migrated_before = 0;
  std::int64_t migrated_after = 0;
  /// Active hosts of the best mapping before and after this attempt.
  std::size_t active_before = 0;
  std::size_t active_after = 0;
  ObjectiveValue objective_after;
};

struct RunReport {
  std::size_t active_hosts = 0;
  std::size_t initial_active_hosts = 0;
  std::int64_t migrated_memory = 0;
  ObjectiveValue objective;
  ObjectiveValue initial_objective;
  std::int64_t force_steps = 0;
  std::vector<ReleaseRecord> releases;
  std::vector<TraceEvent> trace;

  [[nodiscard]] std::size_t released_hosts() const { return initial_active_hosts - active_hosts; }
};

struct SolveResult {
  Mapping mapping;
  RunReport report;
};

/// Hosts in the order consolidation heuristics try to release them: ascending
/// initial migration cost, ties to the lower id. Inactive hosts are omitted.
std::vector<HostId> release_order(const Instance& inst);

/// Releases hosts one at a time, accepting a candidate mapping when it is
/// feasible and does not increase the objective.
SolveResult balcon(const Instance& inst, const SolverParams& params);

/// Outcome of a single ForceFit call.
struct ForceFitOutcome {
  std::int64_t force_steps = 0;
  std::array<std::int64_t, 3> class_counts{};
  /// True when no destination existed and the attempt stopped early.
  bool aborted = false;
};

/// Empties the stash into `hosts` using best fit and Force Steps. On return
/// the stash is empty and `mu` total, or leftover VMs remain unassigned.
ForceFitOutcome force_fit(Stash& stash, std::span<const HostId> hosts, Mapping& mu,
                          const SolverParams& params, std::vector<TraceEvent>* trace = nullptr,
                          HostId released_host = kUnassigned);

/// Fitting host with the highest surrogate load, ties to the lower id.
/// Throws std::logic_error when v fits nowhere.
HostId best_fit_host(VmId v, std::span<const HostId> hosts, const Mapping& mu);
void best_fit(VmId v, std::span<const HostId> hosts, Mapping& mu);

/// Hosts in `hosts` whose total capacity can hold v.
std::vector<HostId> destination_candidates(VmId v, std::span<const HostId> hosts,
                                           const Mapping& mu);

std::optional<HostId> choose_host_balanced(VmId v, std::span<const HostId> hosts,
                                           const Mapping& mu, RepeatsProhibitor& prohibitor);

std::optional<HostId> choose_host_lopsided(VmId v, std::span<const HostId> hosts,
                                           const Mapping& mu, RepeatsProhibitor& prohibitor,
                                           ResourceToggle& toggle);

/// Evicts residents of h in the balanced preference order until v fits,
/// places v, re-adds what still fits and returns the rest.
std::vector<VmId> force_fit_balanced(VmId v, HostId h, Mapping& mu);

/// Same mechanics with the same-side angle rule ahead of the balanced order.
std::vector<VmId> force_fit_lopsided(VmId v, HostId h, Mapping& mu);

/// Resident eviction orders used by the two force-fit variants.
std::vector<VmId> balanced_eviction_order(HostId h, const Mapping& mu);
std::vector<VmId> lopsided_eviction_order(VmId v, HostId h, const Mapping& mu);

}  // namespace vmc
