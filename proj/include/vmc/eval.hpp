#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "vmc/balcon.hpp"
#include "vmc/model.hpp"
#include "vmc/sercon.hpp"

namespace vmc {

enum class Algorithm { BalCon, SerconModified, SerconOriginal };

std::string_view to_string(Algorithm a);
/// Accepts "balcon", "sercon-mod" or "sercon-orig".
Algorithm parse_algorithm(std::string_view text);

SolveResult run_algorithm(Algorithm a, const Instance& inst, const SolverParams& params,
                          const SerconOriginalParams& sp = {});

/// Where the reference objective of a gap comes from.
enum class ReferenceKind { Oracle, LowerBound, Initial };
std::string_view to_string(ReferenceKind k);

/// (alg - ref) / (init - ref), compared on the primary objective term (the
/// active host count when MPH is unbounded). nullopt when init == ref.
/// Throws std::invalid_argument when alg < ref or a value is unbounded.
std::optional<Rational> gap(const ObjectiveValue& alg, const ObjectiveValue& ref,
                            const ObjectiveValue& init);
std::optional<Rational> gap(std::int64_t alg, std::int64_t ref, std::int64_t init);

struct GapRecord {
  std::string instance;
  std::string algorithm;
  ObjectiveValue alg;
  ObjectiveValue ref;
  ObjectiveValue init;
  ReferenceKind reference = ReferenceKind::Oracle;
  /// For the Initial reference this is alg / init instead of the gap ratio.
  std::optional<Rational> gap;
  /// At least one host released.
  bool non_trivial = false;
  double seconds = 0.0;
};

/// Builds a record; with ReferenceKind::Initial `ref` is ignored.
GapRecord make_gap_record(std::string instance, std::string algorithm, const ObjectiveValue& alg,
                          const ObjectiveValue& ref, const ObjectiveValue& init,
                          ReferenceKind reference, bool non_trivial);

struct ProfilePoint {
  Rational threshold;
  std::size_t solved = 0;
  Rational fraction;
};

/// For each threshold, how many records with a defined gap have gap <= t.
/// Records without a defined gap are left out of the denominator.
std::vector<ProfilePoint> performance_profile(const std::vector<GapRecord>& records,
                                              const std::vector<Rational>& thresholds);

/// Mean of the defined gaps, optionally over non-trivial records only.
std::optional<Rational> mean_gap(const std::vector<GapRecord>& records, bool non_trivial_only = true);

/// nullopt stands for an unbounded MPH.
using MphValue = std::optional<std::int64_t>;
std::string mph_label(const MphValue& mph);
ObjectiveWeights weights_for(const MphValue& mph);

struct SweepRow {
  MphValue mph;
  Algorithm algorithm = Algorithm::BalCon;
  std::size_t active_hosts = 0;
  std::int64_t migrated_memory = 0;
  std::int64_t force_steps = 0;
  ObjectiveValue objective;
  ObjectiveValue initial_objective;
  ReferenceKind reference = ReferenceKind::Initial;
  std::optional<ObjectiveValue> reference_objective;
  std::optional<Rational> gap;
  double seconds = 0.0;
};

struct SweepOptions {
  SolverParams params;
  SerconOriginalParams sercon;
  /// Use the exhaustive oracle whenever it accepts the instance.
  bool use_oracle = true;
  /// Externally solved lower bounds keyed by mph_label.
  std::map<std::string, ObjectiveValue> lower_bounds;
  unsigned jobs = 1;
};

/// One run per (MPH, algorithm); rows ordered by grid point, then algorithm.
std::vector<SweepRow> mph_sweep(const Instance& inst, const std::vector<Algorithm>& algorithms,
                                const std::vector<MphValue>& grid, const SweepOptions& opts);

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown by any call is rethrown after all threads finish.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

void write_gaps_csv(std::ostream& out, const std::vector<GapRecord>& records);
void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& profile);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace vmc
