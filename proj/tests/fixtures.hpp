#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "vmc/datagen.hpp"
#include "vmc/model.hpp"

namespace vmc::testing {

// Three (6,6) hosts. VM ids: 0 red (3,3), 1 A (1,2), 2 green (2,4),
// 3 B (4,1), 4 yellow (2,1); initially red on host 0, A and green on
// host 1, B and yellow on host 2.
inline Instance fig2() {
  std::vector<Host> hosts{{0, {6, 6}}, {1, {6, 6}}, {2, {6, 6}}};
  std::vector<Flavor> flavors{{0, {3, 3}}, {1, {1, 2}}, {2, {2, 4}}, {3, {4, 1}}, {4, {2, 1}}};
  std::vector<Vm> vms{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  return Instance(hosts, flavors, vms, {0, 1, 1, 2, 2});
}

inline constexpr VmId kRed = 0;
inline constexpr VmId kA = 1;
inline constexpr VmId kGreen = 2;
inline constexpr VmId kB = 3;
inline constexpr VmId kYellow = 4;

// One VM per host, each host of capacity `cap` loaded with `loads[i]`.
inline Instance loaded_hosts(const ResourceVec& cap, const std::vector<ResourceVec>& loads) {
  std::vector<Host> hosts;
  std::vector<Flavor> flavors;
  std::vector<Vm> vms;
  std::vector<HostId> initial;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const auto id = static_cast<std::int32_t>(i);
    hosts.push_back({id, cap});
    flavors.push_back({id, loads[i]});
    vms.push_back({id, id});
    initial.push_back(id);
  }
  return Instance(hosts, flavors, vms, initial);
}

// Random instance with heterogeneous hosts and a random feasible initial
// mapping (first fit in a shuffled host order).
inline Instance random_instance(std::uint64_t seed, int max_hosts = 4, int max_vms = 8) {
  std::mt19937_64 rng(seed);
  auto uni = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  for (;;) {
    const auto nh = static_cast<int>(uni(1, max_hosts));
    const auto nf = static_cast<int>(uni(1, 6));
    const auto nv = static_cast<int>(uni(0, max_vms));
    std::vector<Host> hosts;
    for (int h = 0; h < nh; ++h) hosts.push_back({h, {uni(4, 12), uni(4, 12)}});
    std::vector<Flavor> flavors;
    for (int f = 0; f < nf; ++f) flavors.push_back({f, {uni(1, 6), uni(1, 6)}});
    std::vector<ResourceVec> loads(static_cast<std::size_t>(nh));
    std::vector<Vm> vms;
    std::vector<HostId> initial;
    bool ok = true;
    for (int v = 0; v < nv && ok; ++v) {
      const auto f = static_cast<FlavorId>(uni(0, nf - 1));
      std::vector<int> order(static_cast<std::size_t>(nh));
      for (int h = 0; h < nh; ++h) order[static_cast<std::size_t>(h)] = h;
      std::shuffle(order.begin(), order.end(), rng);
      ok = false;
      for (int h : order) {
        if ((loads[h] + flavors[f].demand).fits_in(hosts[h].capacity)) {
          loads[h] += flavors[f].demand;
          vms.push_back({v, f});
          initial.push_back(h);
          ok = true;
          break;
        }
      }
    }
    if (ok) return Instance(hosts, flavors, vms, initial);
  }
}

// Tiny generated instance as used by the oracle sweep.
inline Instance tiny_instance(std::uint64_t seed) { return generate_instance(tiny_config(seed)); }

}  // namespace vmc::testing
