#include "vmc/oracle.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>

namespace vmc {

namespace {

std::int64_t hosts_to_cover(std::vector<std::int64_t> capacities, std::int64_t total) {
  std::sort(capacities.rbegin(), capacities.rend());
  std::int64_t covered = 0;
  std::int64_t k = 0;
  for (std::int64_t c : capacities) {
    if (covered >= total) break;
    covered += c;
    ++k;
  }
  return k;
}

}  // namespace

std::int64_t min_active_hosts_bound(const Instance& inst) {
  std::vector<std::int64_t> cpu;
  std::vector<std::int64_t> mem;
  for (const Host& h : inst.hosts()) {
    cpu.push_back(h.capacity.cpu);
    mem.push_back(h.capacity.mem);
  }
  const ResourceVec& total = inst.total_demand();
  return std::max(hosts_to_cover(std::move(cpu), total.cpu),
                  hosts_to_cover(std::move(mem), total.mem));
}

OracleResult brute_force_optimal(const Instance& inst, const ObjectiveWeights& w,
                                 const OracleLimits& limits) {
  const std::size_t nv = inst.num_vms();
  const std::size_t nh = inst.num_hosts();
  if (nv > limits.max_vms || nh > limits.max_hosts) {
    throw OracleRefused("oracle refuses instance with " + std::to_string(nh) + " hosts and " +
                        std::to_string(nv) + " VMs (limits " + std::to_string(limits.max_hosts) +
                        " hosts, " + std::to_string(limits.max_vms) + " VMs)");
  }
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < nv; ++i) {
    if (space > limits.node_budget / std::max<std::size_t>(nh, 1)) {
      throw OracleRefused("oracle refuses: assignment space exceeds node budget " +
                          std::to_string(limits.node_budget));
    }
    space *= nh;
  }

  const std::int64_t bound = min_active_hosts_bound(inst);
  std::vector<HostId> current(nv, kUnassigned);
  std::vector<ResourceVec> loads(nh);
  std::vector<std::int64_t> counts(nh, 0);
  std::int64_t active = 0;
  std::int64_t migrated = 0;

  std::optional<ObjectiveValue> best_obj;
  std::vector<HostId> best_assignment;
  std::uint64_t nodes = 0;

  std::function<void(std::size_t)> descend = [&](std::size_t i) {
    ++nodes;
    if (i == nv) {
      const ObjectiveValue obj = objective_from_terms(active, migrated, w);
      if (!best_obj || obj < *best_obj) {
        best_obj = obj;
        best_assignment = current;
      }
      return;
    }
    const VmId v = static_cast<VmId>(i);
    const ResourceVec& d = inst.demand(v);
    for (std::size_t hi = 0; hi < nh; ++hi) {
      const HostId h = static_cast<HostId>(hi);
      if (!(loads[h] + d).fits_in(inst.capacity(h))) continue;
      const std::int64_t mig = inst.initial_host(v) == h ? 0 : d.mem;
      const std::int64_t act = active + (counts[h] == 0 ? 1 : 0);
      if (best_obj && objective_from_terms(std::max(act, bound), migrated + mig, w) >= *best_obj) {
        continue;
      }
      current[i] = h;
      loads[h] += d;
      ++counts[h];
      active = act;
      migrated += mig;
      descend(i + 1);
      migrated -= mig;
      --counts[h];
      if (counts[h] == 0) --active;
      loads[h] -= d;
      current[i] = kUnassigned;
    }
  };
  descend(0);

  if (!best_obj) throw std::logic_error("oracle: no feasible mapping found");
  return {Mapping(inst, best_assignment), *best_obj, nodes};
}

}  // namespace vmc
