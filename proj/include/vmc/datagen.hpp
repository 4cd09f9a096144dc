#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "vmc/model.hpp"

namespace vmc {

enum class GenMode { Lopsided, Uniform };

std::string_view to_string(GenMode mode);
/// Accepts "lopsided" or "uniform"; throws std::invalid_argument otherwise.
GenMode parse_gen_mode(std::string_view text);

struct GenConfig {
  std::uint64_t seed = 1;
  std::int64_t num_hosts = 20;
  ResourceVec host_capacity{64, 256};
  std::int64_t num_flavors = 30;
  /// Sampling stops once both resources reach this fraction of the pooled capacity.
  double target_fill = 0.7;
  GenMode mode = GenMode::Lopsided;
  /// Upper bound on the number of VMs; 0 means unbounded.
  std::int64_t max_vms = 0;
  /// After packing, keep adding sampled VMs by First Fit until none fit.
  bool saturate = true;

  void validate() const;
};

struct WeightedFlavor {
  Flavor flavor;
  double weight = 1.0;
};

/// Flavor ladder: cpu grows with the index, mem is drawn uniformly from
/// [1, cap.mem / 2], and the sampling weight is 1 / index.
std::vector<WeightedFlavor> generate_flavors(const GenConfig& cfg, std::mt19937_64& rng);

/// Samples VMs up to the fill target and packs them first-fit over hosts in id
/// order: sorted by descending load angle (lopsided) or shuffled (uniform).
/// VMs that fit no host are dropped, then the saturation phase tops the
/// cluster up. Empty hosts are dropped.
Instance generate_instance(const GenConfig& cfg);

/// Small random instance for exhaustive cross-checks: at most 4 hosts and
/// 8 VMs, alternating between the two modes by seed.
GenConfig tiny_config(std::uint64_t seed);

/// Balance factor of the initial free space, measured in units of the mean
/// host capacity.
Rational instance_balance_factor(const Instance& inst);

}  // namespace vmc
