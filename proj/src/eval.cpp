#include "vmc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "vmc/oracle.hpp"

namespace vmc {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::BalCon:
      return "balcon";
    case Algorithm::SerconModified:
      return "sercon-mod";
    case Algorithm::SerconOriginal:
      return "sercon-orig";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  for (Algorithm a : {Algorithm::BalCon, Algorithm::SerconModified, Algorithm::SerconOriginal}) {
    if (text == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm \"" + std::string(text) + "\"");
}

SolveResult run_algorithm(Algorithm a, const Instance& inst, const SolverParams& params,
                          const SerconOriginalParams& sp) {
  switch (a) {
    case Algorithm::BalCon:
      return balcon(inst, params);
    case Algorithm::SerconModified:
      return sercon_modified(inst, params);
    case Algorithm::SerconOriginal:
      return sercon_original(inst, params, sp);
  }
  throw std::invalid_argument("unknown algorithm");
}

std::string_view to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::Oracle:
      return "oracle";
    case ReferenceKind::LowerBound:
      return "lb";
    case ReferenceKind::Initial:
      return "initial";
  }
  return "?";
}

std::optional<Rational> gap(std::int64_t alg, std::int64_t ref, std::int64_t init) {
  if (alg < ref) {
    throw std::invalid_argument("gap: algorithm objective " + std::to_string(alg) +
                                " is below the reference " + std::to_string(ref));
  }
  if (init == ref) return std::nullopt;
  return Rational(alg - ref, init - ref);
}

std::optional<Rational> gap(const ObjectiveValue& alg, const ObjectiveValue& ref,
                            const ObjectiveValue& init) {
  if (alg.unbounded || ref.unbounded || init.unbounded) {
    throw std::invalid_argument("gap: unbounded objective");
  }
  if (alg < ref) throw std::invalid_argument("gap: algorithm objective is below the reference");
  return gap(alg.primary, ref.primary, init.primary);
}

GapRecord make_gap_record(std::string instance, std::string algorithm, const ObjectiveValue& alg,
                          const ObjectiveValue& ref, const ObjectiveValue& init,
                          ReferenceKind reference, bool non_trivial) {
  GapRecord r{std::move(instance), std::move(algorithm), alg, ref, init, reference, std::nullopt,
              non_trivial, 0.0};
  if (reference == ReferenceKind::Initial) {
    r.ref = init;
    if (init.primary != 0) r.gap = Rational(alg.primary, init.primary);
  } else {
    r.gap = gap(alg, ref, init);
  }
  return r;
}

std::vector<ProfilePoint> performance_profile(const std::vector<GapRecord>& records,
                                              const std::vector<Rational>& thresholds) {
  std::vector<Rational> gaps;
  for (const GapRecord& r : records) {
    if (r.gap) gaps.push_back(*r.gap);
  }
  std::vector<ProfilePoint> out;
  if (gaps.empty()) return out;
  std::vector<Rational> sorted_thresholds = thresholds;
  std::sort(sorted_thresholds.begin(), sorted_thresholds.end());
  for (const Rational& t : sorted_thresholds) {
    const auto solved = static_cast<std::size_t>(
        std::count_if(gaps.begin(), gaps.end(), [&](const Rational& g) { return g <= t; }));
    out.push_back({t, solved,
                   Rational(static_cast<std::int64_t>(solved), static_cast<std::int64_t>(gaps.size()))});
  }
  return out;
}

std::optional<Rational> mean_gap(const std::vector<GapRecord>& records, bool non_trivial_only) {
  Rational sum(0);
  std::int64_t n = 0;
  for (const GapRecord& r : records) {
    if (!r.gap || (non_trivial_only && !r.non_trivial)) continue;
    sum += *r.gap;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / Rational(n);
}

std::string mph_label(const MphValue& mph) { return mph ? std::to_string(*mph) : "inf"; }

ObjectiveWeights weights_for(const MphValue& mph) {
  return mph ? ObjectiveWeights::from_mph(*mph) : ObjectiveWeights::infinite_mph();
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(jobs, 1u), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<SweepRow> mph_sweep(const Instance& inst, const std::vector<Algorithm>& algorithms,
                                const std::vector<MphValue>& grid, const SweepOptions& opts) {
  std::vector<SweepRow> rows(grid.size() * algorithms.size());
  parallel_for(grid.size(), opts.jobs, [&](std::size_t g) {
    const ObjectiveWeights w = weights_for(grid[g]);
    SolverParams params = opts.params;
    params.weights = w;

    ReferenceKind kind = ReferenceKind::Initial;
    std::optional<ObjectiveValue> ref;
    if (opts.use_oracle) {
      try {
        ref = brute_force_optimal(inst, w).objective;
        kind = ReferenceKind::Oracle;
      } catch (const OracleRefused&) {
      }
    }
    if (!ref) {
      if (auto it = opts.lower_bounds.find(mph_label(grid[g])); it != opts.lower_bounds.end()) {
        ref = it->second;
        kind = ReferenceKind::LowerBound;
      }
    }

    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      const auto start = std::chrono::steady_clock::now();
      const SolveResult res = run_algorithm(algorithms[a], inst, params, opts.sercon);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      SweepRow& row = rows[g * algorithms.size() + a];
      row.mph = grid[g];
      row.algorithm = algorithms[a];
      row.active_hosts = res.report.active_hosts;
      row.migrated_memory = res.report.migrated_memory;
      row.force_steps = res.report.force_steps;
      row.objective = res.report.objective;
      row.initial_objective = res.report.initial_objective;
      row.reference = kind;
      row.reference_objective = ref;
      row.seconds = secs;
      const GapRecord rec = make_gap_record("", "", row.objective, ref.value_or(ObjectiveValue{}),
                                            row.initial_objective, kind, false);
      row.gap = rec.gap;
    }
  });
  return rows;
}

namespace {

std::string gap_cell(const std::optional<Rational>& g) {
  if (!g) return "";
  std::ostringstream os;
  os << std::setprecision(6) << g->to_double();
  return os.str();
}

}  // namespace

void write_gaps_csv(std::ostream& out, const std::vector<GapRecord>& records) {
  out << "instance,algorithm,objective,objective_tiebreak,reference_kind,reference_objective,"
         "initial_objective,gap,non_trivial,seconds\n";
  for (const GapRecord& r : records) {
    out << r.instance << ',' << r.algorithm << ',' << r.alg.primary << ',' << r.alg.secondary << ','
        << to_string(r.reference) << ',' << r.ref.primary << ',' << r.init.primary << ','
        << gap_cell(r.gap) << ',' << (r.non_trivial ? 1 : 0) << ',' << r.seconds << '\n';
  }
}

void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& profile) {
  out << "threshold,solved,fraction\n";
  for (const ProfilePoint& p : profile) {
    out << p.threshold.to_double() << ',' << p.solved << ',' << p.fraction.to_double() << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "mph,algorithm,active_hosts,migrated_mem,force_steps,objective,objective_tiebreak,"
         "reference_kind,reference_objective,gap,seconds\n";
  for (const SweepRow& r : rows) {
    out << mph_label(r.mph) << ',' << to_string(r.algorithm) << ',' << r.active_hosts << ','
        << r.migrated_memory << ',' << r.force_steps << ',' << r.objective.primary << ','
        << r.objective.secondary << ',' << to_string(r.reference) << ',';
    if (r.reference_objective) out << r.reference_objective->primary;
    out << ',' << gap_cell(r.gap) << ',' << r.seconds << '\n';
  }
}

}  // namespace vmc
