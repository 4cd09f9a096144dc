#pragma once

// Randomized invariant checks shared by the unit tests and the acceptance
// binary. Each check returns how many cases ran and the first violation.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "vmc/balcon.hpp"
#include "vmc/classify.hpp"
#include "vmc/datagen.hpp"
#include "vmc/eval.hpp"
#include "vmc/instance_io.hpp"
#include "vmc/sercon.hpp"

namespace vmc::testing {

struct PropertyOutcome {
  std::size_t cases = 0;
  std::size_t violations = 0;
  std::string first_failure;

  void fail(const std::string& what) {
    if (violations++ == 0) first_failure = what;
  }
};

// Alternates between heterogeneous random fleets and generated tiny instances.
inline Instance property_instance(std::uint64_t seed) {
  return seed % 2 == 0 ? random_instance(seed, 5, 10) : tiny_instance(seed);
}

inline MphValue property_mph(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 3);
  const auto pick = std::uniform_int_distribution<int>(0, 9)(rng);
  if (pick == 0) return std::nullopt;
  if (pick == 1) return 0;
  return std::uniform_int_distribution<std::int64_t>(1, 24)(rng);
}

inline std::string describe(std::uint64_t seed, Algorithm a, const MphValue& mph) {
  std::ostringstream os;
  os << "seed " << seed << " " << to_string(a) << " mph " << mph_label(mph);
  return os.str();
}

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::BalCon, Algorithm::SerconModified,
                                               Algorithm::SerconOriginal};

// Every returned mapping is total and within capacity when recomputed from the
// raw assignment, and no worse than the initial mapping.
inline PropertyOutcome check_feasibility_closure(std::size_t n, std::uint64_t base = 1000) {
  PropertyOutcome out;
  for (std::uint64_t seed = base; seed < base + n; ++seed) {
    const Instance inst = property_instance(seed);
    const MphValue mph = property_mph(seed);
    SolverParams params;
    params.weights = weights_for(mph);
    for (Algorithm a : kAllAlgorithms) {
      const SolveResult res = run_algorithm(a, inst, params);
      ++out.cases;
      if (!res.mapping.feasible_from_scratch() || !res.mapping.caches_consistent()) {
        out.fail(describe(seed, a, mph) + ": infeasible result");
      } else if (res.report.initial_objective < res.report.objective) {
        out.fail(describe(seed, a, mph) + ": objective above the initial one");
      }
    }
  }
  return out;
}

// The best objective never increases from one release attempt to the next.
inline PropertyOutcome check_acceptance_monotonicity(std::size_t n, std::uint64_t base = 2000) {
  PropertyOutcome out;
  for (std::uint64_t seed = base; seed < base + n; ++seed) {
    const Instance inst = property_instance(seed);
    const MphValue mph = property_mph(seed);
    SolverParams params;
    params.weights = weights_for(mph);
    for (Algorithm a : kAllAlgorithms) {
      const SolveResult res = run_algorithm(a, inst, params);
      ++out.cases;
      ObjectiveValue prev = res.report.initial_objective;
      for (const ReleaseRecord& r : res.report.releases) {
        if (prev < r.objective_after) out.fail(describe(seed, a, mph) + ": objective increased");
        prev = r.objective_after;
      }
      if (!(prev == res.report.objective)) out.fail(describe(seed, a, mph) + ": final objective mismatch");
    }
  }
  return out;
}

// An accepted release costs at most MPH memory units per host it frees.
inline PropertyOutcome check_release_memory_bound(std::size_t n, std::uint64_t base = 3000) {
  PropertyOutcome out;
  for (std::uint64_t seed = base; seed < base + n; ++seed) {
    const Instance inst = property_instance(seed);
    MphValue mph = property_mph(seed);
    if (!mph) mph = 6;
    SolverParams params;
    params.weights = weights_for(mph);
    for (Algorithm a : kAllAlgorithms) {
      const SolveResult res = run_algorithm(a, inst, params);
      ++out.cases;
      for (const ReleaseRecord& r : res.report.releases) {
        if (!r.accepted) continue;
        const auto freed = static_cast<std::int64_t>(r.active_before) - static_cast<std::int64_t>(r.active_after);
        if (r.migrated_after - r.migrated_before > *mph * freed) {
          out.fail(describe(seed, a, mph) + ": release of host " + std::to_string(r.host) +
                   " migrated " + std::to_string(r.migrated_after - r.migrated_before));
        }
      }
    }
  }
  return out;
}

// Balanced and lopsided iterations of one attempt never exceed the budget.
inline PropertyOutcome check_force_step_budget(std::size_t n, std::uint64_t base = 4000) {
  PropertyOutcome out;
  for (std::uint64_t seed = base; seed < base + n; ++seed) {
    const Instance inst = property_instance(seed);
    std::mt19937_64 rng(seed);
    SolverParams params;
    params.weights = weights_for(property_mph(seed));
    params.max_force_steps = std::uniform_int_distribution<std::int64_t>(0, 40)(rng);
    const SolveResult res = balcon(inst, params);
    ++out.cases;
    std::int64_t total = 0;
    for (const ReleaseRecord& r : res.report.releases) {
      total += r.force_steps;
      if (r.force_steps > params.max_force_steps || r.class_counts[1] + r.class_counts[2] != r.force_steps) {
        out.fail("seed " + std::to_string(seed) + ": " + std::to_string(r.force_steps) +
                 " force steps with budget " + std::to_string(params.max_force_steps));
      }
    }
    if (total != res.report.force_steps) out.fail("seed " + std::to_string(seed) + ": force step total");
  }
  return out;
}

// cap <= pcap, BF within [0, 1], and both grow when one host gains free space.
inline PropertyOutcome check_capacity_bounds(std::size_t n, std::uint64_t base = 5000) {
  PropertyOutcome out;
  for (std::uint64_t seed = base; seed < base + n; ++seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](std::int64_t lo, std::int64_t hi) {
      return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    const ResourceVec cap{uni(1, 50), uni(1, 50)};
    std::vector<ResourceVec> loads;
    const auto nh = uni(1, 8);
    for (std::int64_t i = 0; i < nh; ++i) loads.push_back({uni(1, cap.cpu), uni(1, cap.mem)});
    const Instance inst = loaded_hosts(cap, loads);
    const Mapping mu = inst.initial_mapping();
    std::vector<HostId> hosts;
    for (const Host& h : inst.hosts()) hosts.push_back(h.id);
    ResourceVec s{uni(0, 30), uni(0, 30)};
    if (s.is_zero()) s.mem = 1;
    ++out.cases;
    const Rational c = capacity(s, hosts, mu);
    const Rational p = potential_capacity(s, hosts, mu);
    const Rational bf = balance_factor(s, hosts, mu);
    if (p < c) out.fail("seed " + std::to_string(seed) + ": cap > pcap");
    if (bf < Rational(0) || Rational(1) < bf) out.fail("seed " + std::to_string(seed) + ": BF out of range");

    // Shrink one host's load (more free space) and compare.
    const auto victim = static_cast<std::size_t>(uni(0, nh - 1));
    std::vector<ResourceVec> lighter = loads;
    lighter[victim] = {std::max<std::int64_t>(1, lighter[victim].cpu - uni(0, 5)),
                       std::max<std::int64_t>(1, lighter[victim].mem - uni(0, 5))};
    const Instance inst2 = loaded_hosts(cap, lighter);
    const Mapping mu2 = inst2.initial_mapping();
    if (capacity(s, hosts, mu2) < c || potential_capacity(s, hosts, mu2) < p) {
      out.fail("seed " + std::to_string(seed) + ": more free space lowered cap or pcap");
    }
  }
  return out;
}

// Profile fractions are non-decreasing in the threshold and end at the share
// of gaps below the last threshold.
inline PropertyOutcome check_profile_monotonicity(std::size_t n, std::uint64_t base = 6000) {
  PropertyOutcome out;
  for (std::uint64_t seed = base; seed < base + n; ++seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](std::int64_t lo, std::int64_t hi) {
      return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    std::vector<GapRecord> records;
    const auto nr = uni(0, 30);
    for (std::int64_t i = 0; i < nr; ++i) {
      const std::int64_t ref = uni(0, 10);
      const std::int64_t init = ref + uni(0, 10);
      const std::int64_t alg = uni(ref, init);
      records.push_back(make_gap_record("i" + std::to_string(i), "x", {false, alg, 0}, {false, ref, 0},
                                        {false, init, 0}, ReferenceKind::Oracle, alg < init));
    }
    std::vector<Rational> thresholds;
    const auto nt = uni(1, 12);
    for (std::int64_t i = 0; i < nt; ++i) thresholds.emplace_back(uni(0, 12), 10);
    ++out.cases;
    const auto profile = performance_profile(records, thresholds);
    for (std::size_t i = 1; i < profile.size(); ++i) {
      if (profile[i].fraction < profile[i - 1].fraction || profile[i].threshold < profile[i - 1].threshold) {
        out.fail("seed " + std::to_string(seed) + ": profile decreases");
      }
    }
    for (const auto& p : profile) {
      if (p.fraction < Rational(0) || Rational(1) < p.fraction) out.fail("seed " + std::to_string(seed) + ": fraction range");
    }
  }
  return out;
}

// Identical inputs give identical mappings, reports and generated instances.
inline PropertyOutcome check_determinism(std::size_t n, std::uint64_t base = 7000) {
  PropertyOutcome out;
  for (std::uint64_t seed = base; seed < base + n; ++seed) {
    const Instance inst = property_instance(seed);
    SolverParams params;
    params.weights = weights_for(property_mph(seed));
    ++out.cases;
    for (Algorithm a : kAllAlgorithms) {
      const SolveResult r1 = run_algorithm(a, inst, params);
      const SolveResult r2 = run_algorithm(a, inst, params);
      if (!(r1.mapping == r2.mapping) || r1.report.force_steps != r2.report.force_steps ||
          !(r1.report.objective == r2.report.objective)) {
        out.fail("seed " + std::to_string(seed) + " " + std::string(to_string(a)) + ": runs differ");
      }
    }
    const GenConfig cfg = tiny_config(seed);
    if (instance_to_json(generate_instance(cfg)) != instance_to_json(generate_instance(cfg))) {
      out.fail("seed " + std::to_string(seed) + ": generator output differs");
    }
  }
  return out;
}

}  // namespace vmc::testing
