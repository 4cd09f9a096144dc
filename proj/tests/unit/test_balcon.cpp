#include "doctest.h"

#include <algorithm>

#include "../fixtures.hpp"
#include "../reference_oracle.hpp"
#include "vmc/balcon.hpp"
#include "vmc/sercon.hpp"

using namespace vmc;
using namespace vmc::testing;

namespace {

// Hosts of capacity (10,10); each entry of `hosts` lists the demands placed
// there initially. VM ids follow the listing order.
Instance build(const std::vector<std::vector<ResourceVec>>& hosts) {
  std::vector<Host> hs;
  std::vector<Flavor> fl;
  std::vector<Vm> vms;
  std::vector<HostId> init;
  for (std::size_t h = 0; h < hosts.size(); ++h) {
    hs.push_back({static_cast<HostId>(h), {10, 10}});
    for (const auto& d : hosts[h]) {
      const auto id = static_cast<std::int32_t>(fl.size());
      fl.push_back({id, d});
      vms.push_back({id, id});
      init.push_back(static_cast<HostId>(h));
    }
  }
  return Instance(hs, fl, vms, init);
}

SolverParams inf_params() {
  SolverParams p;
  p.weights = ObjectiveWeights::infinite_mph();
  return p;
}

}  // namespace

TEST_SUITE("balcon") {

TEST_CASE("prohibitor") {
  const std::vector<HostId> cands{4, 7};
  RepeatsProhibitor p(3);
  CHECK(p.filter(cands) == cands);
  p.record(4);
  p.record(4);
  p.record(4);
  CHECK(p.filter(cands) == std::vector<HostId>{7});
  p.record(7);
  CHECK(p.filter(cands) == cands);

  RepeatsProhibitor q(3);
  q.record(4);
  q.record(4);
  q.record(7);
  q.record(4);
  CHECK(q.consecutive() == 1);
  CHECK(q.last() == 4);
}

TEST_CASE("release order follows initial migration cost") {
  // costs: host 0 -> 3, host 1 -> 6, host 2 -> 2
  CHECK(release_order(fig2()) == std::vector<HostId>{2, 0, 1});
}

TEST_CASE("best fit prefers the most loaded fitting host") {
  // surrogate loads 1.5 and 0.5, VM 2 fits both
  const Instance inst = build({{{7, 8}}, {{2, 3}}, {{1, 1}}});
  Mapping mu = inst.initial_mapping();
  mu.unassign(2);
  const std::vector<HostId> two{0, 1};
  CHECK(surrogate_load(0, mu) == Rational(3, 2));
  CHECK(surrogate_load(1, mu) == Rational(1, 2));
  CHECK(best_fit_host(2, two, mu) == 0);

  const Instance tie = build({{{2, 3}}, {{3, 2}}, {{1, 1}}});
  Mapping tm = tie.initial_mapping();
  tm.unassign(2);
  CHECK(best_fit_host(2, two, tm) == 0);

  const Instance none = build({{{10, 10}}, {{1, 1}}});
  Mapping nm = none.initial_mapping();
  nm.unassign(1);
  const std::vector<HostId> first{0};
  CHECK_THROWS_AS(best_fit_host(1, first, nm), std::logic_error);
}

TEST_CASE("balanced host choice counts smaller residents") {
  // host 0 has three small VMs, host 1 one small and one large
  const Instance inst = build({{{1, 1}, {1, 1}, {1, 1}}, {{1, 1}, {6, 6}}, {{4, 4}}});
  Mapping mu = inst.initial_mapping();
  mu.unassign(5);
  const std::vector<HostId> two{0, 1};
  RepeatsProhibitor p(3);
  CHECK(choose_host_balanced(5, two, mu, p) == 0);
  CHECK(choose_host_balanced(5, two, mu, p) == 0);
  CHECK(choose_host_balanced(5, two, mu, p) == 0);
  CHECK(choose_host_balanced(5, two, mu, p) == 1);
}

TEST_CASE("balanced host choice with no smaller residents uses load then id") {
  const Instance inst = build({{{5, 5}}, {{6, 6}}, {{2, 2}}});
  Mapping mu = inst.initial_mapping();
  mu.unassign(2);
  const std::vector<HostId> two{0, 1};
  RepeatsProhibitor p(3);
  CHECK(choose_host_balanced(2, two, mu, p) == 1);
}

TEST_CASE("balanced force fit on fig2") {
  const Instance inst = fig2();
  Mapping mu = inst.initial_mapping();
  mu.unassign(kRed);
  CHECK(balanced_eviction_order(1, mu) == std::vector<VmId>{kA, kGreen});
  // Excluding A leaves (4,2), excluding green too leaves (6,6); red goes in
  // and only A fits back.
  const auto evicted = force_fit_balanced(kRed, 1, mu);
  CHECK(evicted == std::vector<VmId>{kGreen});
  CHECK(mu.host_of(kRed) == 1);
  CHECK(mu.host_of(kA) == 1);
  CHECK_FALSE(mu.is_assigned(kGreen));
  CHECK(mu.caches_consistent());
}

TEST_CASE("balanced force fit without eviction") {
  const Instance inst = fig2();
  Mapping mu = inst.initial_mapping();
  mu.unassign(kA);
  CHECK(force_fit_balanced(kA, 0, mu).empty());
  CHECK(mu.host_of(kA) == 0);
}

TEST_CASE("migrated-in residents are evicted first") {
  const Instance inst = fig2();
  // A moved to host 0 next to red
  const std::vector<HostId> moved{0, 0, 1, 2, 2};
  const Mapping mu(inst, moved);
  CHECK(balanced_eviction_order(0, mu) == std::vector<VmId>{kA, kRed});
  const std::vector<HostId> moved2{0, 1, 0, 2, 2};
  const Mapping mu2(inst, moved2);
  // green (mem 4) migrated in, red (mem 3) did not
  CHECK(balanced_eviction_order(0, mu2) == std::vector<VmId>{kGreen, kRed});
}

TEST_CASE("lopsided host choice") {
  // host angles: 0 steep (8,2), 1 even (5,5), 2 flat (1,6)
  const Instance inst = build({{{8, 2}}, {{5, 5}}, {{1, 6}}, {{5, 1}, {1, 1}}});
  Mapping mu = inst.initial_mapping();
  mu.unassign(3);
  mu.unassign(4);
  const std::vector<HostId> three{0, 1, 2};
  {
    RepeatsProhibitor p(3);
    ResourceToggle r;
    CHECK(choose_host_lopsided(3, three, mu, p, r) == 2);
    CHECK(r.r == Resource::Mem);
  }
  {
    RepeatsProhibitor p(3);
    ResourceToggle r;
    CHECK(choose_host_lopsided(4, three, mu, p, r) == 2);
    CHECK(r.r == Resource::Mem);
  }
  {
    RepeatsProhibitor p(3);
    ResourceToggle r;
    r.r = Resource::Mem;
    CHECK(choose_host_lopsided(4, three, mu, p, r) == 0);
    CHECK(r.r == Resource::Cpu);
  }
  {
    RepeatsProhibitor p(3);
    ResourceToggle r;
    const std::vector<HostId> one{1};
    CHECK(choose_host_lopsided(3, one, mu, p, r) == 1);
  }
}

TEST_CASE("lopsided host choice below every host angle") {
  const Instance inst = build({{{8, 2}}, {{5, 5}}, {{1, 6}}, {{1, 8}}});
  Mapping mu = inst.initial_mapping();
  mu.unassign(3);
  const std::vector<HostId> three{0, 1, 2};
  RepeatsProhibitor p(3);
  ResourceToggle r;
  CHECK(choose_host_lopsided(3, three, mu, p, r) == 0);
  CHECK(r.r == Resource::Cpu);
}

TEST_CASE("lopsided eviction order puts the same side first") {
  // host load (3,8) lies below v=(1,1): residents below v come first
  const Instance low = build({{{1, 3}, {1, 4}, {1, 1}}, {{1, 1}}});
  {
    Mapping mu = low.initial_mapping();
    mu.unassign(3);
    CHECK(lopsided_eviction_order(3, 0, mu) == std::vector<VmId>{0, 1, 2});
  }
  const Instance high = build({{{3, 1}, {1, 3}, {4, 1}}, {{1, 1}}});
  {
    Mapping mu = high.initial_mapping();
    mu.unassign(3);
    CHECK(lopsided_eviction_order(3, 0, mu) == std::vector<VmId>{0, 2, 1});
  }
  // every resident shares the angle of v: plain memory order
  const Instance none = build({{{2, 2}, {1, 1}}, {{3, 3}}});
  {
    Mapping mu = none.initial_mapping();
    mu.unassign(2);
    CHECK(lopsided_eviction_order(2, 0, mu) == std::vector<VmId>{1, 0});
  }
}

TEST_CASE("force fit trivial cases") {
  const Instance inst = fig2();
  const SolverParams params = inf_params();
  Mapping mu = inst.initial_mapping();
  Stash stash(inst);
  const std::vector<HostId> all{0, 1, 2};
  auto out = force_fit(stash, all, mu, params);
  CHECK(out.force_steps == 0);
  CHECK(mu == inst.initial_mapping());

  mu.unassign(kA);
  stash.add(kA);
  out = force_fit(stash, all, mu, params);
  CHECK(out.force_steps == 0);
  CHECK(out.class_counts[0] == 1);
  CHECK(stash.empty());
  CHECK(mu.is_feasible());
}

TEST_CASE("releasing host 0 of fig2 step by step") {
  const Instance inst = fig2();
  SolverParams params = inf_params();
  params.max_force_steps = 3;
  params.trace = true;
  Mapping mu = inst.initial_mapping();
  mu.unassign(kRed);
  Stash stash(inst);
  stash.add(kRed);
  const std::vector<HostId> rest{1, 2};
  std::vector<TraceEvent> trace;
  const auto out = force_fit(stash, rest, mu, params, &trace, 0);
  // red between the host angles: toggle to mem, host 1 has the most memory;
  // green is below both hosts and goes to host 2, where B and yellow tie on
  // memory and B has the lower id; B then goes back to host 1.
  REQUIRE(trace.size() == 3);
  CHECK(trace[0].vm == kRed);
  CHECK(trace[0].cls == ClusterClass::Lopsided);
  CHECK(trace[0].destination == 1);
  CHECK(trace[0].evicted == std::vector<VmId>{kGreen});
  CHECK(trace[1].vm == kGreen);
  CHECK(trace[1].destination == 2);
  CHECK(trace[1].evicted == std::vector<VmId>{kB});
  CHECK(trace[2].vm == kB);
  CHECK(trace[2].destination == 1);
  CHECK(out.force_steps == 3);
  CHECK_FALSE(stash.empty());
}

TEST_CASE("fig2 with yellow ahead of B follows the short walk") {
  // Same instance, VM ids 3 and 4 swapped: red, A, green, yellow, B.
  const Instance inst({{0, {6, 6}}, {1, {6, 6}}, {2, {6, 6}}},
                      {{0, {3, 3}}, {1, {1, 2}}, {2, {2, 4}}, {3, {2, 1}}, {4, {4, 1}}},
                      {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}}, {0, 1, 1, 2, 2});
  Mapping mu = inst.initial_mapping();
  mu.unassign(0);
  Stash stash(inst);
  stash.add(0);
  const std::vector<HostId> rest{1, 2};
  const auto out = force_fit(stash, rest, mu, inf_params());
  // red to host 1 evicting green, green to host 2 evicting yellow, yellow to host 1
  CHECK(stash.empty());
  CHECK(mu.is_feasible());
  CHECK(out.force_steps == 2);
  CHECK(mu.host_of(0) == 1);
  CHECK(mu.host_of(2) == 2);
  CHECK(mu.host_of(3) == 1);
  CHECK(migrated_memory(mu, inst.initial_mapping()) == 8);
}

TEST_CASE("balcon on fig2") {
  const Instance inst = fig2();
  const auto front = enumerate_front(inst);

  const SolveResult inf = balcon(inst, inf_params());
  CHECK(inf.mapping.is_feasible());
  CHECK(inf.report.active_hosts == front.min_active());

  SolverParams zero;
  zero.weights = ObjectiveWeights::from_mph(0);
  const SolveResult z = balcon(inst, zero);
  CHECK(z.mapping == inst.initial_mapping());
  CHECK(z.report.migrated_memory == 0);
}

TEST_CASE("balcon leaves a single active host alone") {
  const Instance inst = build({{{2, 2}, {3, 3}}, {}});
  const SolveResult res = balcon(inst, inf_params());
  CHECK(res.mapping == inst.initial_mapping());
}

TEST_CASE("balcon without force steps matches sercon-mod") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Instance inst = random_instance(seed, 5, 10);
    SolverParams p = inf_params();
    p.max_force_steps = 0;
    CHECK(balcon(inst, p).mapping == sercon_modified(inst, p).mapping);
  }
}

TEST_CASE("trace records every stash step") {
  SolverParams p = inf_params();
  p.trace = true;
  const SolveResult res = balcon(fig2(), p);
  std::int64_t steps = 0;
  for (const auto& r : res.report.releases) steps += r.class_counts[0] + r.class_counts[1] + r.class_counts[2];
  CHECK(static_cast<std::int64_t>(res.report.trace.size()) == steps);
}

TEST_CASE("params validation") {
  SolverParams p;
  p.gamma = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SolverParams{};
  p.max_force_steps = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

}  // TEST_SUITE
