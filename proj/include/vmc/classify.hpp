#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "vmc/model.hpp"

namespace vmc {

/// Buffer of unassigned VMs with the running sum of their demands.
class Stash {
 public:
  explicit Stash(const Instance& inst) : inst_(&inst) {}

  void add(VmId v);
  void remove(VmId v);
  /// Largest member by vm_size, ties to the lower id. Precondition: !empty().
  [[nodiscard]] VmId peek_largest() const;

  [[nodiscard]] bool empty() const { return members_.empty(); }
  [[nodiscard]] std::size_t size() const { return members_.size(); }
  [[nodiscard]] std::span<const VmId> members() const { return members_; }
  [[nodiscard]] const ResourceVec& vector() const { return sum_; }

 private:
  const Instance* inst_;
  std::vector<VmId> members_;
  ResourceVec sum_;
};

enum class ClusterClass { Ample, Balanced, Lopsided };

std::string_view to_string(ClusterClass c);

/// Sum over hosts of min(free.cpu / s.cpu, free.mem / s.mem). A zero stash
/// component drops that resource from the min; s must not be (0, 0).
Rational capacity(const ResourceVec& s, std::span<const HostId> hosts, const Mapping& mu);

/// min(sum free.cpu / s.cpu, sum free.mem / s.mem), same zero-component rule.
Rational potential_capacity(const ResourceVec& s, std::span<const HostId> hosts,
                            const Mapping& mu);

/// capacity / potential_capacity, or 1 when the potential capacity is 0.
Rational balance_factor(const ResourceVec& s, std::span<const HostId> hosts, const Mapping& mu);

/// Ample if v fits some host; otherwise Lopsided when cap < 1 or
/// cap < alpha * pcap (stash vector includes v); Balanced otherwise.
ClusterClass classify(const Stash& stash, std::span<const HostId> hosts, const Mapping& mu,
                      VmId v, const Rational& alpha);

}  // namespace vmc
