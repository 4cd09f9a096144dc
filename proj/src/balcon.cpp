#include "vmc/balcon.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace vmc {

void SolverParams::validate() const {
  if (alpha < Rational(0) || Rational(1) < alpha) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (max_force_steps < 0) throw std::invalid_argument("b must be non-negative");
  if (gamma < 1) throw std::invalid_argument("gamma must be at least 1");
}

std::vector<HostId> RepeatsProhibitor::filter(std::span<const HostId> candidates) const {
  std::vector<HostId> out;
  out.reserve(candidates.size());
  for (HostId h : candidates) {
    if (last_ && *last_ == h && count_ >= gamma_) continue;
    out.push_back(h);
  }
  return out;
}

void RepeatsProhibitor::record(HostId h) {
  if (last_ && *last_ == h) {
    ++count_;
  } else {
    last_ = h;
    count_ = 1;
  }
}

namespace {

std::size_t class_index(ClusterClass c) { return static_cast<std::size_t>(c); }

// Resource with the larger load fraction; cpu on ties.
Resource largest_resource(HostId h, const Mapping& mu) {
  const ResourceVec& l = mu.load(h);
  const ResourceVec& cap = mu.instance().capacity(h);
  return static_cast<__int128>(l.cpu) * cap.mem >= static_cast<__int128>(l.mem) * cap.cpu
             ? Resource::Cpu
             : Resource::Mem;
}

std::vector<HostId> allowed_hosts(const std::vector<HostId>& candidates,
                                  const RepeatsProhibitor& prohibitor) {
  auto allowed = prohibitor.filter(candidates);
  return allowed.empty() ? candidates : allowed;
}

std::vector<VmId> evict_and_place(VmId v, HostId h, Mapping& mu, std::span<const VmId> order) {
  const Instance& inst = mu.instance();
  if (!inst.demand(v).fits_in(inst.capacity(h))) {
    throw std::logic_error("force fit: VM does not fit the destination even when empty");
  }
  std::vector<VmId> excluded;
  for (VmId w : order) {
    if (mu.fits(v, h)) break;
    mu.unassign(w);
    excluded.push_back(w);
  }
  mu.assign(v, h);
  std::vector<VmId> evicted;
  for (auto it = excluded.rbegin(); it != excluded.rend(); ++it) {
    if (mu.fits(*it, h)) {
      mu.assign(*it, h);
    } else {
      evicted.push_back(*it);
    }
  }
  return evicted;
}

}  // namespace

std::vector<HostId> release_order(const Instance& inst) {
  const Mapping initial = inst.initial_mapping();
  std::vector<std::pair<std::int64_t, HostId>> keyed;
  for (HostId h : initial.active_hosts()) keyed.emplace_back(host_migration_cost(h, initial), h);
  std::sort(keyed.begin(), keyed.end());
  std::vector<HostId> order;
  order.reserve(keyed.size());
  for (const auto& [cost, h] : keyed) order.push_back(h);
  return order;
}

HostId best_fit_host(VmId v, std::span<const HostId> hosts, const Mapping& mu) {
  std::optional<HostId> best;
  Rational best_load;
  for (HostId h : hosts) {
    if (!mu.fits(v, h)) continue;
    const Rational load = surrogate_load(h, mu);
    if (!best || best_load < load || (load == best_load && h < *best)) {
      best = h;
      best_load = load;
    }
  }
  if (!best) throw std::logic_error("best_fit: VM fits no host");
  return *best;
}

void best_fit(VmId v, std::span<const HostId> hosts, Mapping& mu) {
  mu.assign(v, best_fit_host(v, hosts, mu));
}

std::vector<HostId> destination_candidates(VmId v, std::span<const HostId> hosts,
                                           const Mapping& mu) {
  const Instance& inst = mu.instance();
  std::vector<HostId> out;
  for (HostId h : hosts) {
    if (inst.demand(v).fits_in(inst.capacity(h))) out.push_back(h);
  }
  return out;
}

std::optional<HostId> choose_host_balanced(VmId v, std::span<const HostId> hosts,
                                           const Mapping& mu, RepeatsProhibitor& prohibitor) {
  const auto candidates = destination_candidates(v, hosts, mu);
  if (candidates.empty()) return std::nullopt;
  const Instance& inst = mu.instance();
  const std::int64_t v_key = inst.size_key(v);

  std::optional<HostId> best;
  std::size_t best_count = 0;
  Rational best_load;
  for (HostId h : allowed_hosts(candidates, prohibitor)) {
    const auto residents = mu.residents(h);
    const auto count = static_cast<std::size_t>(std::count_if(
        residents.begin(), residents.end(), [&](VmId w) { return inst.size_key(w) < v_key; }));
    const Rational load = surrogate_load(h, mu);
    const bool better = !best || count > best_count ||
                        (count == best_count && (best_load < load ||
                                                 (load == best_load && h < *best)));
    if (better) {
      best = h;
      best_count = count;
      best_load = load;
    }
  }
  prohibitor.record(*best);
  return best;
}

std::optional<HostId> choose_host_lopsided(VmId v, std::span<const HostId> hosts,
                                           const Mapping& mu, RepeatsProhibitor& prohibitor,
                                           ResourceToggle& toggle) {
  const auto candidates = destination_candidates(v, hosts, mu);
  if (candidates.empty()) return std::nullopt;
  const auto allowed = allowed_hosts(candidates, prohibitor);
  const AngleKey v_angle = angle_key(mu.instance().demand(v));

  // Extremal hosts by load angle; ties resolve to the lower id because
  // `allowed` is ascending and only strict improvements replace.
  HostId lowest = allowed.front();
  HostId highest = allowed.front();
  for (HostId h : allowed) {
    const AngleKey a = angle_key(mu.load(h));
    if (a < angle_key(mu.load(lowest))) lowest = h;
    if (a > angle_key(mu.load(highest))) highest = h;
  }

  HostId chosen;
  if (v_angle >= angle_key(mu.load(highest))) {
    chosen = lowest;
    toggle.r = largest_resource(chosen, mu);
  } else if (v_angle <= angle_key(mu.load(lowest))) {
    chosen = highest;
    toggle.r = largest_resource(chosen, mu);
  } else {
    toggle.flip();
    auto amount = [&](HostId h) {
      return toggle.r == Resource::Cpu ? mu.load(h).cpu : mu.load(h).mem;
    };
    chosen = allowed.front();
    for (HostId h : allowed) {
      if (amount(h) > amount(chosen)) chosen = h;
    }
  }
  prohibitor.record(chosen);
  return chosen;
}

std::vector<VmId> balanced_eviction_order(HostId h, const Mapping& mu) {
  const Instance& inst = mu.instance();
  std::vector<VmId> order(mu.residents(h).begin(), mu.residents(h).end());
  auto key = [&](VmId w) {
    return std::make_tuple(inst.initial_host(w) == h, inst.demand(w).mem, w);
  };
  std::sort(order.begin(), order.end(), [&](VmId a, VmId b) { return key(a) < key(b); });
  return order;
}

std::vector<VmId> lopsided_eviction_order(VmId v, HostId h, const Mapping& mu) {
  const Instance& inst = mu.instance();
  const AngleKey v_angle = angle_key(inst.demand(v));
  const bool host_below = !mu.load(h).is_zero() && angle_key(mu.load(h)) < v_angle;
  auto same_side = [&](VmId w) {
    const AngleKey a = angle_key(inst.demand(w));
    return host_below ? a < v_angle : a > v_angle;
  };
  std::vector<VmId> order(mu.residents(h).begin(), mu.residents(h).end());
  auto key = [&](VmId w) {
    return std::make_tuple(!same_side(w), inst.initial_host(w) == h, inst.demand(w).mem, w);
  };
  std::sort(order.begin(), order.end(), [&](VmId a, VmId b) { return key(a) < key(b); });
  return order;
}

std::vector<VmId> force_fit_balanced(VmId v, HostId h, Mapping& mu) {
  const auto order = balanced_eviction_order(h, mu);
  return evict_and_place(v, h, mu, order);
}

std::vector<VmId> force_fit_lopsided(VmId v, HostId h, Mapping& mu) {
  const auto order = lopsided_eviction_order(v, h, mu);
  return evict_and_place(v, h, mu, order);
}

ForceFitOutcome force_fit(Stash& stash, std::span<const HostId> hosts, Mapping& mu,
                          const SolverParams& params, std::vector<TraceEvent>* trace,
                          HostId released_host) {
  ForceFitOutcome out;
  RepeatsProhibitor prohibitor(params.gamma);
  ResourceToggle toggle;

  while (!stash.empty()) {
    const VmId v = stash.peek_largest();
    const ClusterClass cls = classify(stash, hosts, mu, v, params.alpha);
    // The budget limits Force Steps only; Ample placements always proceed.
    if (cls != ClusterClass::Ample && out.force_steps >= params.max_force_steps) break;
    stash.remove(v);
    ++out.class_counts[class_index(cls)];

    TraceEvent event{released_host, v, cls, kUnassigned, {}};
    if (cls == ClusterClass::Ample) {
      event.destination = best_fit_host(v, hosts, mu);
      mu.assign(v, event.destination);
    } else {
      ++out.force_steps;
      const auto dest = cls == ClusterClass::Balanced
                            ? choose_host_balanced(v, hosts, mu, prohibitor)
                            : choose_host_lopsided(v, hosts, mu, prohibitor, toggle);
      if (!dest) {
        stash.add(v);
        out.aborted = true;
        if (trace) trace->push_back(std::move(event));
        break;
      }
      event.destination = *dest;
      event.evicted = cls == ClusterClass::Balanced ? force_fit_balanced(v, *dest, mu)
                                                    : force_fit_lopsided(v, *dest, mu);
      for (VmId w : event.evicted) stash.add(w);
    }
    if (trace) trace->push_back(std::move(event));
  }
  return out;
}

SolveResult balcon(const Instance& inst, const SolverParams& params) {
  params.validate();
  const Mapping initial = inst.initial_mapping();
  Mapping best = initial;
  ObjectiveValue best_obj = objective(best, initial, params.weights);

  RunReport report;
  report.initial_active_hosts = initial.active_count();
  report.initial_objective = best_obj;

  for (HostId h : release_order(inst)) {
    if (!best.is_active(h)) continue;
    Mapping candidate = best;
    Stash stash(inst);
    const std::vector<VmId> evacuees(candidate.residents(h).begin(), candidate.residents(h).end());
    for (VmId v : evacuees) {
      stash.add(v);
      candidate.unassign(v);
    }
    const std::vector<HostId> hosts = candidate.active_hosts();
    const ForceFitOutcome ff = force_fit(stash, hosts, candidate, params,
                                         params.trace ? &report.trace : nullptr, h);

    ReleaseRecord rec;
    rec.host = h;
    rec.force_steps = ff.force_steps;
    rec.class_counts = ff.class_counts;
    rec.migrated_before = migrated_memory(best, initial);
    rec.active_before = best.active_count();
    report.force_steps += ff.force_steps;

    const ObjectiveValue cand_obj = objective(candidate, initial, params.weights);
    if (candidate.is_feasible() && cand_obj <= best_obj) {
      best = std::move(candidate);
      best_obj = cand_obj;
      rec.accepted = true;
    }
    rec.migrated_after = migrated_memory(best, initial);
    rec.objective_after = best_obj;
    rec.active_after = best.active_count();
    report.releases.push_back(std::move(rec));
  }

  report.active_hosts = best.active_count();
  report.migrated_memory = migrated_memory(best, initial);
  report.objective = best_obj;
  return {std::move(best), std::move(report)};
}

}  // namespace vmc
