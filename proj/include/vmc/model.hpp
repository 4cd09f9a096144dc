#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmc/rational.hpp"

namespace vmc {

using HostId = std::int32_t;
using VmId = std::int32_t;
using FlavorId = std::int32_t;

inline constexpr HostId kUnassigned = -1;

/// Two-dimensional integer resource quantity (cores, memory units).
struct ResourceVec {
  std::int64_t cpu = 0;
  std::int64_t mem = 0;

  ResourceVec& operator+=(const ResourceVec& o) {
    cpu += o.cpu;
    mem += o.mem;
    return *this;
  }
  ResourceVec& operator-=(const ResourceVec& o) {
    cpu -= o.cpu;
    mem -= o.mem;
    return *this;
  }
  friend ResourceVec operator+(ResourceVec a, const ResourceVec& b) { return a += b; }
  friend ResourceVec operator-(ResourceVec a, const ResourceVec& b) { return a -= b; }
  friend bool operator==(const ResourceVec&, const ResourceVec&) = default;

  /// Componentwise a <= b.
  [[nodiscard]] bool fits_in(const ResourceVec& bound) const {
    return cpu <= bound.cpu && mem <= bound.mem;
  }
  [[nodiscard]] bool is_zero() const { return cpu == 0 && mem == 0; }
};

struct Flavor {
  FlavorId id = 0;
  ResourceVec demand;
};

struct Host {
  HostId id = 0;
  ResourceVec capacity;
};

struct Vm {
  VmId id = 0;
  FlavorId flavor = 0;
};

/// Raised for malformed or infeasible problem definitions.
class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Mapping;

/// Immutable problem definition: hosts, flavors, VMs and the initial mapping.
class Instance {
 public:
  /// Validates ids, positivity and feasibility of the initial placement.
  /// Throws InstanceError naming the offending entity.
  Instance(std::vector<Host> hosts, std::vector<Flavor> flavors, std::vector<Vm> vms,
           std::vector<HostId> initial_hosts);

  [[nodiscard]] std::span<const Host> hosts() const { return hosts_; }
  [[nodiscard]] std::span<const Flavor> flavors() const { return flavors_; }
  [[nodiscard]] std::span<const Vm> vms() const { return vms_; }
  [[nodiscard]] std::size_t num_hosts() const { return hosts_.size(); }
  [[nodiscard]] std::size_t num_vms() const { return vms_.size(); }
  [[nodiscard]] std::size_t num_flavors() const { return flavors_.size(); }

  [[nodiscard]] const ResourceVec& capacity(HostId h) const { return hosts_[h].capacity; }
  [[nodiscard]] const ResourceVec& demand(VmId v) const { return demand_[v]; }
  [[nodiscard]] HostId initial_host(VmId v) const { return initial_hosts_[v]; }
  [[nodiscard]] std::span<const HostId> initial_hosts() const { return initial_hosts_; }

  /// Sum of demands over all VMs.
  [[nodiscard]] const ResourceVec& total_demand() const { return total_demand_; }

  /// Integer key ordering VMs like v.cpu/sum_cpu + v.mem/sum_mem.
  [[nodiscard]] std::int64_t size_key(VmId v) const { return size_key_[v]; }

  [[nodiscard]] Mapping initial_mapping() const;

  friend bool operator==(const Instance& a, const Instance& b);

 private:
  std::vector<Host> hosts_;
  std::vector<Flavor> flavors_;
  std::vector<Vm> vms_;
  std::vector<HostId> initial_hosts_;
  std::vector<ResourceVec> demand_;
  std::vector<std::int64_t> size_key_;
  ResourceVec total_demand_;
};

/// Partial assignment of VMs to hosts with incremental per-host caches.
///
/// Holds a non-owning pointer to its Instance; the instance must outlive it.
class Mapping {
 public:
  /// Everything unassigned.
  explicit Mapping(const Instance& inst);
  Mapping(const Instance& inst, std::span<const HostId> assignment);

  [[nodiscard]] const Instance& instance() const { return *inst_; }

  [[nodiscard]] HostId host_of(VmId v) const { return host_of_[v]; }
  [[nodiscard]] bool is_assigned(VmId v) const { return host_of_[v] != kUnassigned; }
  [[nodiscard]] std::span<const HostId> assignment() const { return host_of_; }

  /// Places an unassigned VM. Capacity is not checked here.
  void assign(VmId v, HostId h);
  void unassign(VmId v);

  [[nodiscard]] const ResourceVec& load(HostId h) const { return load_[h]; }
  /// Capacity minus load; throws std::logic_error when the host is overloaded.
  [[nodiscard]] ResourceVec free(HostId h) const;
  [[nodiscard]] bool fits(VmId v, HostId h) const;
  [[nodiscard]] std::span<const VmId> residents(HostId h) const { return residents_[h]; }

  [[nodiscard]] bool is_active(HostId h) const { return !residents_[h].empty(); }
  [[nodiscard]] std::vector<HostId> active_hosts() const;
  [[nodiscard]] std::size_t active_count() const;
  [[nodiscard]] std::size_t unassigned_count() const { return unassigned_; }
  [[nodiscard]] bool is_total() const { return unassigned_ == 0; }

  /// Total assignment and every host within capacity in both dimensions.
  [[nodiscard]] bool is_feasible() const;
  /// Same check, recomputing loads from the assignment vector only.
  [[nodiscard]] bool feasible_from_scratch() const;
  /// Cached loads and resident lists agree with the assignment vector.
  [[nodiscard]] bool caches_consistent() const;

  friend bool operator==(const Mapping& a, const Mapping& b) { return a.host_of_ == b.host_of_; }

 private:
  const Instance* inst_;
  std::vector<HostId> host_of_;
  std::vector<ResourceVec> load_;
  std::vector<std::vector<VmId>> residents_;
  std::size_t unassigned_ = 0;
};

/// Objective weights; w_m = 1 and w_a = MPH in memory units for the usual
/// construction. Infinite MPH orders mappings by (active hosts, migrated memory).
class ObjectiveWeights {
 public:
  static ObjectiveWeights from_mph(std::int64_t mph_units);
  static ObjectiveWeights infinite_mph();
  static ObjectiveWeights with_weights(std::int64_t w_active, std::int64_t w_migration);

  [[nodiscard]] bool infinite() const { return infinite_; }
  [[nodiscard]] std::int64_t w_active() const { return w_active_; }
  [[nodiscard]] std::int64_t w_migration() const { return w_migration_; }
  /// w_a / w_m; nullopt when unbounded.
  [[nodiscard]] std::optional<Rational> mph() const;

  friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;

 private:
  ObjectiveWeights(std::int64_t wa, std::int64_t wm, bool inf)
      : w_active_(wa), w_migration_(wm), infinite_(inf) {}
  std::int64_t w_active_;
  std::int64_t w_migration_;
  bool infinite_;
};

/// Objective value; +inf for non-total mappings. In infinite-MPH mode the
/// primary term is the active host count and the secondary term the migrated
/// memory, compared lexicographically.
struct ObjectiveValue {
  bool unbounded = false;
  std::int64_t primary = 0;
  std::int64_t secondary = 0;

  friend auto operator<=>(const ObjectiveValue&, const ObjectiveValue&) = default;
};

std::ostream& operator<<(std::ostream& os, const ObjectiveValue& v);

ResourceVec load(HostId h, const Mapping& mu);
ResourceVec free(HostId h, const Mapping& mu);
bool fits(VmId v, HostId h, const Mapping& mu);
std::vector<HostId> active_hosts(const Mapping& mu);

/// Sum of mem over assigned VMs whose host differs from the initial one.
std::int64_t migrated_memory(const Mapping& mu, const Mapping& initial);
std::int64_t migrated_memory(const Mapping& mu);

ObjectiveValue objective(const Mapping& mu, const Mapping& initial, const ObjectiveWeights& w);
ObjectiveValue objective(const Mapping& mu, const ObjectiveWeights& w);
ObjectiveValue objective_from_terms(std::int64_t active, std::int64_t migrated,
                                    const ObjectiveWeights& w);

/// Memory of VMs on h that were also on h initially.
std::int64_t host_migration_cost(HostId h, const Mapping& mu, const Mapping& initial);
std::int64_t host_migration_cost(HostId h, const Mapping& mu);

/// v.cpu / sum cpu + v.mem / sum mem over all VMs.
Rational vm_size(VmId v, const Instance& inst);

/// load.cpu / cap.cpu + load.mem / cap.mem.
Rational surrogate_load(HostId h, const Mapping& mu);

/// Orders non-zero vectors by arctan(cpu / mem) using exact cross products.
struct AngleKey {
  std::int64_t cpu = 0;
  std::int64_t mem = 0;

  friend std::strong_ordering operator<=>(const AngleKey& a, const AngleKey& b) {
    return static_cast<__int128>(a.cpu) * b.mem <=> static_cast<__int128>(b.cpu) * a.mem;
  }
  friend bool operator==(const AngleKey& a, const AngleKey& b) { return (a <=> b) == 0; }
};

/// Throws std::invalid_argument for the zero vector.
AngleKey angle_key(const ResourceVec& r);

}  // namespace vmc
