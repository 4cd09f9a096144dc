#include "vmc/sercon.hpp"

#include <algorithm>
#include <stdexcept>

namespace vmc {

namespace {

// Evacuated VMs, largest first (ties to the lower id).
std::vector<VmId> largest_first(const Instance& inst, std::span<const VmId> vms) {
  std::vector<VmId> out(vms.begin(), vms.end());
  std::sort(out.begin(), out.end(), [&](VmId a, VmId b) {
    const auto ka = inst.size_key(a);
    const auto kb = inst.size_key(b);
    return ka != kb ? ka > kb : a < b;
  });
  return out;
}

RunReport finish_report(RunReport report, const Mapping& best, const Mapping& initial,
                        const ObjectiveWeights& w) {
  report.active_hosts = best.active_count();
  report.migrated_memory = migrated_memory(best, initial);
  report.objective = objective(best, initial, w);
  return report;
}

}  // namespace

void SerconOriginalParams::validate() const {
  if (max_total_migrations < 0) throw std::invalid_argument("max_total_migrations must be >= 0");
  if (min_migration_efficiency < Rational(0) || Rational(1) < min_migration_efficiency) {
    throw std::invalid_argument("min_migration_efficiency must lie in [0, 1]");
  }
}

SolveResult sercon_modified(const Instance& inst, const SolverParams& params) {
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
    const auto pending = largest_first(inst, best.residents(h));
    for (VmId v : pending) candidate.unassign(v);
    const std::vector<HostId> hosts = candidate.active_hosts();

    ReleaseRecord rec;
    rec.host = h;
    rec.migrated_before = migrated_memory(best, initial);
    rec.active_before = best.active_count();
    bool placed_all = true;
    for (VmId v : pending) {
      if (std::none_of(hosts.begin(), hosts.end(), [&](HostId d) { return candidate.fits(v, d); })) {
        placed_all = false;
        break;
      }
      ++rec.class_counts[0];
      best_fit(v, hosts, candidate);
    }

    const ObjectiveValue cand_obj = objective(candidate, initial, params.weights);
    if (placed_all && candidate.is_feasible() && cand_obj <= best_obj) {
      best = std::move(candidate);
      best_obj = cand_obj;
      rec.accepted = true;
    }
    rec.migrated_after = migrated_memory(best, initial);
    rec.objective_after = best_obj;
    rec.active_after = best.active_count();
    report.releases.push_back(rec);
  }
  report = finish_report(std::move(report), best, initial, params.weights);
  return {std::move(best), std::move(report)};
}

SolveResult sercon_original(const Instance& inst, const SolverParams& params,
                            const SerconOriginalParams& sp) {
  params.validate();
  sp.validate();
  const Mapping initial = inst.initial_mapping();
  Mapping best = initial;
  ObjectiveValue best_obj = objective(best, initial, params.weights);

  RunReport report;
  report.initial_active_hosts = initial.active_count();
  report.initial_objective = best_obj;
  std::int64_t migrations_used = 0;

  for (std::size_t pass = 0; pass < inst.num_hosts(); ++pass) {
    std::vector<std::pair<std::int64_t, HostId>> keyed;
    for (HostId h : best.active_hosts()) keyed.emplace_back(host_migration_cost(h, best, initial), h);
    std::sort(keyed.begin(), keyed.end());

    bool released_any = false;
    for (const auto& [cost, h] : keyed) {
      if (!best.is_active(h)) continue;
      const auto pending = largest_first(inst, best.residents(h));
      const auto n = static_cast<std::int64_t>(pending.size());

      ReleaseRecord rec;
      rec.host = h;
      rec.migrated_before = migrated_memory(best, initial);
      rec.active_before = best.active_count();
      rec.migrated_after = rec.migrated_before;
      rec.objective_after = best_obj;
      rec.active_after = best.active_count();
      if (n > sp.max_total_migrations - migrations_used) {
        report.releases.push_back(rec);
        continue;
      }

      // ceil(efficiency * n) VMs must be placeable; beyond that many failures
      // the attempt is abandoned.
      const Rational needed = sp.min_migration_efficiency * Rational(n);
      const std::int64_t required = (needed.num() + needed.den() - 1) / needed.den();
      const std::int64_t allowed_failures = n - required;

      Mapping candidate = best;
      for (VmId v : pending) candidate.unassign(v);
      std::vector<HostId> targets = candidate.active_hosts();
      std::int64_t failures = 0;
      for (VmId v : pending) {
        std::sort(targets.begin(), targets.end(), [&](HostId a, HostId b) {
          const Rational la = surrogate_load(a, candidate);
          const Rational lb = surrogate_load(b, candidate);
          return la != lb ? lb < la : a < b;
        });
        auto dest = std::find_if(targets.begin(), targets.end(),
                                 [&](HostId d) { return candidate.fits(v, d); });
        if (dest == targets.end()) {
          if (++failures > allowed_failures) break;
          continue;
        }
        ++rec.class_counts[0];
        candidate.assign(v, *dest);
      }

      const ObjectiveValue cand_obj = objective(candidate, initial, params.weights);
      if (failures == 0 && candidate.is_feasible() && cand_obj <= best_obj) {
        best = std::move(candidate);
        best_obj = cand_obj;
        migrations_used += n;
        rec.accepted = true;
        released_any = true;
      }
      rec.migrated_after = migrated_memory(best, initial);
      rec.objective_after = best_obj;
      rec.active_after = best.active_count();
      report.releases.push_back(rec);
    }
    if (!released_any) break;
  }
  report = finish_report(std::move(report), best, initial, params.weights);
  return {std::move(best), std::move(report)};
}

}  // namespace vmc
