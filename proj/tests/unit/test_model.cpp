#include "doctest.h"

#include "../fixtures.hpp"
#include "vmc/instance_io.hpp"
#include "vmc/model.hpp"

using namespace vmc;
using namespace vmc::testing;

TEST_SUITE("model") {

TEST_CASE("resource vectors add and compare exactly") {
  const ResourceVec a{1, 2};
  const ResourceVec b{3, 3};
  CHECK(a + b == ResourceVec{4, 5});
  CHECK(b - a == ResourceVec{2, 1});
  CHECK(a.fits_in(b));
  CHECK_FALSE(ResourceVec{4, 1}.fits_in(b));
  CHECK(ResourceVec{}.is_zero());
}

TEST_CASE("load and free on the fig2 initial mapping") {
  const Instance inst = fig2();
  const Mapping mu = inst.initial_mapping();
  CHECK(load(1, mu) == ResourceVec{3, 6});
  CHECK(free(1, mu) == ResourceVec{3, 0});
  CHECK(free(2, mu) == ResourceVec{0, 4});
  CHECK(free(0, mu) == ResourceVec{3, 3});

  Mapping empty(inst);
  CHECK(load(0, empty) == ResourceVec{0, 0});
  CHECK(free(0, empty) == ResourceVec{6, 6});
}

TEST_CASE("fits") {
  const Instance inst = fig2();
  Mapping mu = inst.initial_mapping();
  mu.unassign(kRed);
  CHECK(fits(kRed, 0, mu));
  CHECK_FALSE(fits(kRed, 1, mu));
  CHECK_FALSE(fits(kRed, 2, mu));
}

TEST_CASE("active hosts") {
  const Instance inst = fig2();
  CHECK(Mapping(inst).active_count() == 0);
  CHECK(active_hosts(Mapping(inst)).empty());
  const Mapping mu = inst.initial_mapping();
  CHECK(active_hosts(mu) == std::vector<HostId>{0, 1, 2});
  const std::vector<HostId> packed{0, 0, 1, 1, 0};
  const Mapping two(inst, packed);
  CHECK(two.is_feasible());
  CHECK(two.active_count() == 2);
}

TEST_CASE("migrated memory") {
  const Instance inst = fig2();
  const Mapping mu0 = inst.initial_mapping();
  CHECK(migrated_memory(mu0) == 0);
  // red to host 1, green to host 2, yellow to host 1
  const std::vector<HostId> walk{1, 1, 2, 2, 1};
  CHECK(migrated_memory(Mapping(inst, walk)) == 8);
  const std::vector<HostId> one{0, 1, 0, 2, 2};
  CHECK(migrated_memory(Mapping(inst, one)) == 4);
}

TEST_CASE("objective") {
  const Instance inst = fig2();
  const Mapping mu0 = inst.initial_mapping();
  CHECK(objective(mu0, ObjectiveWeights::with_weights(1, 0)).primary == 3);

  const auto w = ObjectiveWeights::with_weights(10, 1);
  CHECK(objective(mu0, w).primary == 30);
  const std::vector<HostId> walk{1, 1, 2, 2, 1};
  CHECK(objective(Mapping(inst, walk), w).primary == 28);
  // Cheapest two-host mapping migrates A, B and yellow.
  const std::vector<HostId> best{0, 0, 1, 1, 0};
  CHECK(objective(Mapping(inst, best), w).primary == 24);

  Mapping partial = inst.initial_mapping();
  partial.unassign(kA);
  CHECK(objective(partial, w).unbounded);
  CHECK(objective(mu0, w) < objective(partial, w));
}

TEST_CASE("infinite mph compares hosts before memory") {
  const Instance inst = fig2();
  const auto w = ObjectiveWeights::infinite_mph();
  CHECK_FALSE(w.mph().has_value());
  const auto a = objective_from_terms(2, 100, w);
  const auto b = objective_from_terms(3, 0, w);
  CHECK(a < b);
  CHECK(objective_from_terms(2, 4, w) < objective_from_terms(2, 8, w));
}

TEST_CASE("weights validation") {
  CHECK_THROWS_AS(ObjectiveWeights::with_weights(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(ObjectiveWeights::with_weights(-1, 1), std::invalid_argument);
  CHECK(*ObjectiveWeights::from_mph(8).mph() == Rational(8));
}

TEST_CASE("host migration cost") {
  const Instance inst = fig2();
  const Mapping mu0 = inst.initial_mapping();
  CHECK(host_migration_cost(1, mu0) == 6);
  CHECK(host_migration_cost(0, mu0) == 3);
  const std::vector<HostId> moved{1, 0, 0, 2, 2};
  CHECK(host_migration_cost(0, Mapping(inst, moved)) == 0);
}

TEST_CASE("vm size and surrogate load") {
  const Instance inst = fig2();
  // totals (12,11)
  CHECK(inst.total_demand() == ResourceVec{12, 11});
  CHECK(vm_size(kRed, inst) == Rational(23, 44));
  CHECK(vm_size(kGreen, inst) == Rational(35, 66));
  CHECK(inst.size_key(kRed) < inst.size_key(kGreen));
  CHECK(inst.size_key(kA) < inst.size_key(kRed));

  const Instance small = loaded_hosts({10, 20}, {{2, 4}, {5, 10}, {3, 6}});
  CHECK(vm_size(0, small) == Rational(2, 5));
  CHECK(vm_size(1, small) == Rational(1));

  const Mapping mu0 = inst.initial_mapping();
  CHECK(surrogate_load(1, mu0) == Rational(3, 2));
  CHECK(surrogate_load(0, Mapping(inst)) == Rational(0));
  const Instance full = loaded_hosts({6, 6}, {{6, 6}});
  CHECK(surrogate_load(0, full.initial_mapping()) == Rational(2));
}

TEST_CASE("angle keys") {
  CHECK(angle_key({1, 0}) > angle_key({5, 1}));
  CHECK(angle_key({0, 1}) < angle_key({1, 5}));
  CHECK(angle_key({2, 1}) > angle_key({1, 2}));
  CHECK(angle_key({2, 4}) == angle_key({1, 2}));
  CHECK_THROWS_AS(angle_key({0, 0}), std::invalid_argument);
}

TEST_CASE("instance validation") {
  const std::vector<Host> hosts{{0, {6, 6}}};
  CHECK_THROWS_AS(Instance(hosts, {{0, {0, 1}}}, {{0, 0}}, {0}), InstanceError);
  CHECK_THROWS_AS(Instance(hosts, {{0, {1, 1}}}, {{0, 1}}, {0}), InstanceError);
  CHECK_THROWS_AS(Instance(hosts, {{0, {7, 1}}}, {{0, 0}}, {0}), InstanceError);
  CHECK_THROWS_AS(Instance(hosts, {{0, {1, 1}}}, {{0, 0}}, {kUnassigned}), InstanceError);
  CHECK_THROWS_AS(Instance({{0, {0, 6}}}, {{0, {1, 1}}}, {}, {}), InstanceError);
}

TEST_CASE("mapping caches follow assign and unassign") {
  const Instance inst = fig2();
  Mapping mu = inst.initial_mapping();
  mu.unassign(kGreen);
  CHECK_FALSE(mu.is_total());
  CHECK(mu.unassigned_count() == 1);
  mu.assign(kGreen, 0);
  CHECK(mu.caches_consistent());
  CHECK(mu.load(0) == ResourceVec{5, 7});
  CHECK_FALSE(mu.feasible_from_scratch());
  CHECK_FALSE(mu.is_feasible());
  CHECK_THROWS_AS(mu.assign(kGreen, 1), std::logic_error);
}

TEST_CASE("instance json round trip") {
  const Instance inst = fig2();
  const std::string text = instance_to_json(inst);
  const Instance back = parse_instance(text);
  CHECK(back == inst);
  CHECK(instance_to_json(back) == text);
  CHECK_THROWS_AS(parse_instance("{\"hosts\": []"), InstanceError);
  CHECK_THROWS_AS(parse_instance(R"({"hosts":[{"id":0,"cpu":1,"mem":1}],"flavors":[],"vms":[{"id":0,"flavor":3,"host":0}]})"),
                  InstanceError);
}

}  // TEST_SUITE
