#include "vmc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vmc/classify.hpp"

namespace vmc {

std::string_view to_string(GenMode mode) {
  return mode == GenMode::Lopsided ? "lopsided" : "uniform";
}

GenMode parse_gen_mode(std::string_view text) {
  if (text == "lopsided") return GenMode::Lopsided;
  if (text == "uniform") return GenMode::Uniform;
  throw std::invalid_argument("unknown generator mode \"" + std::string(text) + "\"");
}

void GenConfig::validate() const {
  if (num_hosts < 1) throw std::invalid_argument("num_hosts must be >= 1");
  if (host_capacity.cpu < 1 || host_capacity.mem < 2) {
    throw std::invalid_argument("host capacity must be at least (1, 2)");
  }
  if (num_flavors < 1) throw std::invalid_argument("num_flavors must be >= 1");
  if (!(target_fill > 0.0 && target_fill <= 1.0)) {
    throw std::invalid_argument("target_fill must lie in (0, 1]");
  }
  if (max_vms < 0) throw std::invalid_argument("max_vms must be >= 0");
}

std::vector<WeightedFlavor> generate_flavors(const GenConfig& cfg, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> mem_dist(1, std::max<std::int64_t>(1, cfg.host_capacity.mem / 2));
  std::vector<std::int64_t> mem;
  for (std::int64_t i = 1; i <= cfg.num_flavors; ++i) mem.push_back(mem_dist(rng));

  // Ladder step chosen so a sampled VM takes the same expected share of host
  // cpu as of host memory.
  double mem_share = 0.0;
  double index_mean = 0.0;
  for (std::int64_t i = 1; i <= cfg.num_flavors; ++i) {
    const double w = 1.0 / static_cast<double>(i);
    mem_share += w * static_cast<double>(mem[i - 1]) / static_cast<double>(cfg.host_capacity.mem);
    index_mean += w * static_cast<double>(i);
  }
  const double step = mem_share / index_mean * static_cast<double>(cfg.host_capacity.cpu);

  std::vector<WeightedFlavor> out;
  for (std::int64_t i = 1; i <= cfg.num_flavors; ++i) {
    const auto cpu = std::clamp<std::int64_t>(std::llround(step * static_cast<double>(i)), 1,
                                              cfg.host_capacity.cpu);
    out.push_back({{static_cast<FlavorId>(i - 1), {cpu, mem[i - 1]}}, 1.0 / static_cast<double>(i)});
  }
  return out;
}

namespace {

// Allowed difference between the pooled cpu and memory shares, in hosts.
constexpr double kMaxShareDrift = 1.0;
constexpr std::int64_t kMaxRejectedDraws = 1000;
// The saturation phase stops after this many consecutive draws that fit nowhere.
constexpr std::int64_t kSaturationMisses = 100;

class ShareGate {
 public:
  explicit ShareGate(const GenConfig& cfg)
      : cpu_pool_(static_cast<double>(cfg.host_capacity.cpu * cfg.num_hosts)),
        mem_pool_(static_cast<double>(cfg.host_capacity.mem * cfg.num_hosts)),
        drift_(kMaxShareDrift / static_cast<double>(cfg.num_hosts)) {}

  // Rejects a demand that pulls the cpu and memory shares further apart
  // than the drift allowance.
  bool admits(const ResourceVec& sum, const ResourceVec& d) const {
    const double now = gap(sum);
    const double next = gap(sum + d);
    return next <= drift_ || next <= now;
  }

 private:
  double gap(const ResourceVec& v) const {
    return std::abs(static_cast<double>(v.cpu) / cpu_pool_ - static_cast<double>(v.mem) / mem_pool_);
  }

  double cpu_pool_;
  double mem_pool_;
  double drift_;
};

std::vector<FlavorId> sample_vms(const GenConfig& cfg, const std::vector<WeightedFlavor>& flavors,
                                 std::discrete_distribution<std::size_t>& pick, std::mt19937_64& rng) {
  const ShareGate gate(cfg);
  const double cpu_target = cfg.target_fill * static_cast<double>(cfg.host_capacity.cpu * cfg.num_hosts);
  const double mem_target = cfg.target_fill * static_cast<double>(cfg.host_capacity.mem * cfg.num_hosts);
  std::vector<FlavorId> out;
  ResourceVec sum;
  // Draw until both resources reach the target; overshooting draws are rejected.
  std::int64_t rejected = 0;
  while (cfg.max_vms == 0 || static_cast<std::int64_t>(out.size()) < cfg.max_vms) {
    if (static_cast<double>(sum.cpu) >= cpu_target && static_cast<double>(sum.mem) >= mem_target) break;
    const Flavor& f = flavors[pick(rng)].flavor;
    const ResourceVec next = sum + f.demand;
    const bool overshoot = static_cast<double>(next.cpu) > cpu_target || static_cast<double>(next.mem) > mem_target;
    if (overshoot || !gate.admits(sum, f.demand)) {
      if (++rejected > kMaxRejectedDraws) break;
      continue;
    }
    out.push_back(f.id);
    sum = next;
  }
  return out;
}

}  // namespace

Instance generate_instance(const GenConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const std::vector<WeightedFlavor> weighted = generate_flavors(cfg, rng);
  std::vector<Flavor> flavors;
  std::vector<double> weights;
  for (const auto& f : weighted) {
    flavors.push_back(f.flavor);
    weights.push_back(f.weight);
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  std::vector<FlavorId> order = sample_vms(cfg, weighted, pick, rng);
  if (cfg.mode == GenMode::Lopsided) {
    std::stable_sort(order.begin(), order.end(), [&](FlavorId a, FlavorId b) {
      return angle_key(flavors[b].demand) < angle_key(flavors[a].demand);
    });
  } else {
    std::shuffle(order.begin(), order.end(), rng);
  }

  std::vector<ResourceVec> loads(static_cast<std::size_t>(cfg.num_hosts));
  ResourceVec total;
  std::vector<FlavorId> vm_flavor;
  std::vector<std::size_t> vm_host;
  auto first_fit = [&](FlavorId f) {
    const ResourceVec& d = flavors[f].demand;
    auto it = std::find_if(loads.begin(), loads.end(),
                           [&](const ResourceVec& l) { return (l + d).fits_in(cfg.host_capacity); });
    if (it == loads.end()) return false;
    *it += d;
    total += d;
    vm_flavor.push_back(f);
    vm_host.push_back(static_cast<std::size_t>(it - loads.begin()));
    return true;
  };
  // VMs that fit no host are dropped.
  for (FlavorId f : order) first_fit(f);

  // Saturation: keep drawing VMs and placing them by First Fit until the
  // cluster stops accepting them.
  if (cfg.saturate) {
    const ShareGate gate(cfg);
    for (std::int64_t misses = 0; misses < kSaturationMisses;) {
      const FlavorId f = weighted[pick(rng)].flavor.id;
      if (gate.admits(total, flavors[f].demand) && first_fit(f)) {
        misses = 0;
      } else {
        ++misses;
      }
    }
  }

  // Renumber hosts so that empty ones disappear.
  std::vector<HostId> renumber(loads.size(), kUnassigned);
  std::vector<Host> hosts;
  for (std::size_t h = 0; h < loads.size(); ++h) {
    if (loads[h].is_zero()) continue;
    renumber[h] = static_cast<HostId>(hosts.size());
    hosts.push_back({static_cast<HostId>(hosts.size()), cfg.host_capacity});
  }
  std::vector<Vm> vms;
  std::vector<HostId> initial;
  for (std::size_t i = 0; i < vm_flavor.size(); ++i) {
    vms.push_back({static_cast<VmId>(i), vm_flavor[i]});
    initial.push_back(renumber[vm_host[i]]);
  }
  return Instance(std::move(hosts), std::move(flavors), std::move(vms), std::move(initial));
}

GenConfig tiny_config(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  GenConfig cfg;
  cfg.seed = seed;
  cfg.num_hosts = std::uniform_int_distribution<std::int64_t>(2, 4)(rng);
  cfg.host_capacity = {std::uniform_int_distribution<std::int64_t>(6, 16)(rng),
                       std::uniform_int_distribution<std::int64_t>(6, 16)(rng)};
  cfg.num_flavors = std::uniform_int_distribution<std::int64_t>(3, 8)(rng);
  cfg.target_fill = std::uniform_real_distribution<double>(0.45, 0.85)(rng);
  cfg.max_vms = std::uniform_int_distribution<std::int64_t>(3, 8)(rng);
  cfg.mode = seed % 2 == 0 ? GenMode::Lopsided : GenMode::Uniform;
  cfg.saturate = false;
  return cfg;
}

Rational instance_balance_factor(const Instance& inst) {
  if (inst.num_hosts() == 0) throw std::invalid_argument("instance has no hosts");
  // The factor is invariant under scaling of s, so the pooled capacity stands
  // in for the mean and keeps s integral.
  ResourceVec pooled;
  std::vector<HostId> hosts;
  for (const Host& h : inst.hosts()) {
    pooled += h.capacity;
    hosts.push_back(h.id);
  }
  return balance_factor(pooled, hosts, inst.initial_mapping());
}

}  // namespace vmc
