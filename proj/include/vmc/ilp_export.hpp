#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vmc/model.hpp"

namespace vmc {

enum class ModelKind { Allocation, FlavorFlow, RelaxedFlavorFlow };

std::string_view to_string(ModelKind kind);
/// File suffix used by the CLI: "alloc", "flow" or "flowlb".
std::string_view file_suffix(ModelKind kind);

/// n[f][h]: number of VMs of flavor f initially on host h.
using FlavorCount = std::vector<std::vector<std::int64_t>>;
FlavorCount flavor_counts(const Instance& inst);

struct ModelCounts {
  std::size_t variables = 0;
  std::size_t constraints = 0;
  friend bool operator==(const ModelCounts&, const ModelCounts&) = default;
};

/// Table-style size formulas for each model.
ModelCounts expected_counts(ModelKind kind, const Instance& inst);

/// Weight on migrated memory used in place of w_m when MPH is unbounded.
/// Small enough that the whole migration term stays below one host.
double migration_epsilon(const Instance& inst);

/// Writes the binary allocation model (Alloc, Active, Migr) in LP format.
ModelCounts emit_allocation_model(const Instance& inst, const ObjectiveWeights& w,
                                  std::ostream& out);

/// Writes the flavor-flow model (In, Out integer or continuous; Active binary).
ModelCounts emit_flavor_flow_model(const Instance& inst, const ObjectiveWeights& w, bool relaxed,
                                   std::ostream& out);

ModelCounts emit_model(ModelKind kind, const Instance& inst, const ObjectiveWeights& w,
                       std::ostream& out);

/// Solver output that violates the model or cannot be parsed.
class SolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IlpSolution {
  std::int64_t active_hosts = 0;
  /// Sum of migrated memory (out-flow memory for the flow models).
  double migrated_memory = 0.0;
  /// Objective recomputed from the variable values with the model's weights.
  double lp_objective = 0.0;
  /// Exact objective for the integer models; for the relaxation the smallest
  /// integer-valued objective not below the relaxed optimum (still a bound).
  ObjectiveValue objective;
  /// Allocation model only.
  std::optional<Mapping> mapping;
};

/// Parses a "name value" per line variable dump ('#' starts a comment).
std::map<std::string, double> parse_variable_dump(std::string_view text);

/// Validates a variable dump against the model and recomputes its objective.
/// Throws SolutionError naming the violated row.
IlpSolution read_solution(ModelKind kind, const Instance& inst, const ObjectiveWeights& w,
                          std::string_view solver_output);

}  // namespace vmc
