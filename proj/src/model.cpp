#include "vmc/model.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace vmc {

namespace {

const char* dimension_name(bool cpu) { return cpu ? "cpu" : "mem"; }

}  // namespace

Instance::Instance(std::vector<Host> hosts, std::vector<Flavor> flavors, std::vector<Vm> vms,
                   std::vector<HostId> initial_hosts)
    : hosts_(std::move(hosts)),
      flavors_(std::move(flavors)),
      vms_(std::move(vms)),
      initial_hosts_(std::move(initial_hosts)) {
  for (std::size_t i = 0; i < hosts_.size(); ++i) {
    const Host& h = hosts_[i];
    if (h.id != static_cast<HostId>(i)) {
      throw InstanceError("hosts[" + std::to_string(i) + "]: id " + std::to_string(h.id) +
                          " is not the dense index " + std::to_string(i));
    }
    if (h.capacity.cpu < 1 || h.capacity.mem < 1) {
      throw InstanceError("hosts[" + std::to_string(i) + "]: capacity must be positive");
    }
  }
  for (std::size_t i = 0; i < flavors_.size(); ++i) {
    const Flavor& f = flavors_[i];
    if (f.id != static_cast<FlavorId>(i)) {
      throw InstanceError("flavors[" + std::to_string(i) + "]: id " + std::to_string(f.id) +
                          " is not the dense index " + std::to_string(i));
    }
    if (f.demand.cpu < 1 || f.demand.mem < 1) {
      throw InstanceError("flavors[" + std::to_string(i) + "]: demand must be positive");
    }
  }
  if (initial_hosts_.size() != vms_.size()) {
    throw InstanceError("initial mapping size does not match the number of VMs");
  }
  demand_.reserve(vms_.size());
  for (std::size_t i = 0; i < vms_.size(); ++i) {
    const Vm& v = vms_[i];
    const std::string where = "vms[" + std::to_string(i) + "]";
    if (v.id != static_cast<VmId>(i)) {
      throw InstanceError(where + ": id " + std::to_string(v.id) + " is not the dense index " +
                          std::to_string(i));
    }
    if (v.flavor < 0 || static_cast<std::size_t>(v.flavor) >= flavors_.size()) {
      throw InstanceError(where + ": unknown flavor " + std::to_string(v.flavor));
    }
    const HostId h = initial_hosts_[i];
    if (h < 0 || static_cast<std::size_t>(h) >= hosts_.size()) {
      throw InstanceError(where + ": unknown host " + std::to_string(h));
    }
    demand_.push_back(flavors_[v.flavor].demand);
    total_demand_ += demand_.back();
  }

  std::vector<ResourceVec> loads(hosts_.size());
  for (std::size_t i = 0; i < vms_.size(); ++i) loads[initial_hosts_[i]] += demand_[i];
  for (std::size_t h = 0; h < hosts_.size(); ++h) {
    for (bool cpu : {true, false}) {
      const std::int64_t used = cpu ? loads[h].cpu : loads[h].mem;
      const std::int64_t cap = cpu ? hosts_[h].capacity.cpu : hosts_[h].capacity.mem;
      if (used > cap) {
        std::ostringstream msg;
        msg << "initial mapping is infeasible: host " << h << " " << dimension_name(cpu)
            << " load " << used << " exceeds capacity " << cap;
        throw InstanceError(msg.str());
      }
    }
  }

  size_key_.reserve(vms_.size());
  for (const ResourceVec& d : demand_) {
    size_key_.push_back(d.cpu * total_demand_.mem + d.mem * total_demand_.cpu);
  }
}

Mapping Instance::initial_mapping() const { return Mapping(*this, initial_hosts_); }

bool operator==(const Instance& a, const Instance& b) {
  auto same_hosts = std::equal(a.hosts_.begin(), a.hosts_.end(), b.hosts_.begin(),
                               b.hosts_.end(), [](const Host& x, const Host& y) {
                                 return x.id == y.id && x.capacity == y.capacity;
                               });
  auto same_flavors = std::equal(a.flavors_.begin(), a.flavors_.end(), b.flavors_.begin(),
                                 b.flavors_.end(), [](const Flavor& x, const Flavor& y) {
                                   return x.id == y.id && x.demand == y.demand;
                                 });
  auto same_vms = std::equal(a.vms_.begin(), a.vms_.end(), b.vms_.begin(), b.vms_.end(),
                             [](const Vm& x, const Vm& y) {
                               return x.id == y.id && x.flavor == y.flavor;
                             });
  return same_hosts && same_flavors && same_vms && a.initial_hosts_ == b.initial_hosts_;
}

Mapping::Mapping(const Instance& inst)
    : inst_(&inst),
      host_of_(inst.num_vms(), kUnassigned),
      load_(inst.num_hosts()),
      residents_(inst.num_hosts()),
      unassigned_(inst.num_vms()) {}

Mapping::Mapping(const Instance& inst, std::span<const HostId> assignment) : Mapping(inst) {
  if (assignment.size() != inst.num_vms()) {
    throw std::invalid_argument("Mapping: assignment size does not match the instance");
  }
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    if (assignment[v] != kUnassigned) assign(static_cast<VmId>(v), assignment[v]);
  }
}

void Mapping::assign(VmId v, HostId h) {
  if (host_of_[v] != kUnassigned) throw std::logic_error("Mapping::assign: VM already assigned");
  if (h < 0 || static_cast<std::size_t>(h) >= load_.size()) {
    throw std::out_of_range("Mapping::assign: host out of range");
  }
  host_of_[v] = h;
  load_[h] += inst_->demand(v);
  residents_[h].push_back(v);
  --unassigned_;
}

void Mapping::unassign(VmId v) {
  const HostId h = host_of_[v];
  if (h == kUnassigned) throw std::logic_error("Mapping::unassign: VM not assigned");
  host_of_[v] = kUnassigned;
  load_[h] -= inst_->demand(v);
  auto& res = residents_[h];
  res.erase(std::find(res.begin(), res.end(), v));
  ++unassigned_;
}

ResourceVec Mapping::free(HostId h) const {
  const ResourceVec f = inst_->capacity(h) - load_[h];
  if (f.cpu < 0 || f.mem < 0) {
    throw std::logic_error("host " + std::to_string(h) + " is overloaded");
  }
  return f;
}

bool Mapping::fits(VmId v, HostId h) const {
  return (load_[h] + inst_->demand(v)).fits_in(inst_->capacity(h));
}

std::vector<HostId> Mapping::active_hosts() const {
  std::vector<HostId> out;
  for (std::size_t h = 0; h < residents_.size(); ++h) {
    if (!residents_[h].empty()) out.push_back(static_cast<HostId>(h));
  }
  return out;
}

std::size_t Mapping::active_count() const {
  return static_cast<std::size_t>(
      std::count_if(residents_.begin(), residents_.end(), [](const auto& r) { return !r.empty(); }));
}

bool Mapping::is_feasible() const {
  if (!is_total()) return false;
  for (std::size_t h = 0; h < load_.size(); ++h) {
    if (!load_[h].fits_in(inst_->capacity(static_cast<HostId>(h)))) return false;
  }
  return true;
}

bool Mapping::feasible_from_scratch() const {
  std::vector<ResourceVec> loads(inst_->num_hosts());
  for (std::size_t v = 0; v < host_of_.size(); ++v) {
    const HostId h = host_of_[v];
    if (h == kUnassigned) return false;
    loads[h] += inst_->demand(static_cast<VmId>(v));
  }
  for (std::size_t h = 0; h < loads.size(); ++h) {
    if (!loads[h].fits_in(inst_->capacity(static_cast<HostId>(h)))) return false;
  }
  return true;
}

bool Mapping::caches_consistent() const {
  std::vector<ResourceVec> loads(inst_->num_hosts());
  std::vector<std::vector<VmId>> residents(inst_->num_hosts());
  std::size_t unassigned = 0;
  for (std::size_t v = 0; v < host_of_.size(); ++v) {
    const HostId h = host_of_[v];
    if (h == kUnassigned) {
      ++unassigned;
      continue;
    }
    loads[h] += inst_->demand(static_cast<VmId>(v));
    residents[h].push_back(static_cast<VmId>(v));
  }
  if (unassigned != unassigned_ || loads != load_) return false;
  for (std::size_t h = 0; h < residents.size(); ++h) {
    auto cached = residents_[h];
    std::sort(cached.begin(), cached.end());
    if (cached != residents[h]) return false;
  }
  return true;
}

ObjectiveWeights ObjectiveWeights::from_mph(std::int64_t mph_units) {
  if (mph_units < 0) throw std::invalid_argument("MPH must be non-negative");
  return {mph_units, 1, false};
}

ObjectiveWeights ObjectiveWeights::infinite_mph() { return {1, 0, true}; }

ObjectiveWeights ObjectiveWeights::with_weights(std::int64_t w_active, std::int64_t w_migration) {
  if (w_active < 0 || w_migration < 0) throw std::invalid_argument("weights must be non-negative");
  if (w_active == 0 && w_migration == 0) throw std::invalid_argument("weights are both zero");
  return {w_active, w_migration, false};
}

std::optional<Rational> ObjectiveWeights::mph() const {
  if (infinite_ || w_migration_ == 0) return std::nullopt;
  return Rational(w_active_, w_migration_);
}

std::ostream& operator<<(std::ostream& os, const ObjectiveValue& v) {
  if (v.unbounded) return os << "inf";
  os << v.primary;
  if (v.secondary != 0) os << " (+" << v.secondary << " mem)";
  return os;
}

ResourceVec load(HostId h, const Mapping& mu) { return mu.load(h); }
ResourceVec free(HostId h, const Mapping& mu) { return mu.free(h); }
bool fits(VmId v, HostId h, const Mapping& mu) { return mu.fits(v, h); }
std::vector<HostId> active_hosts(const Mapping& mu) { return mu.active_hosts(); }

std::int64_t migrated_memory(const Mapping& mu, const Mapping& initial) {
  const Instance& inst = mu.instance();
  std::int64_t total = 0;
  for (std::size_t v = 0; v < inst.num_vms(); ++v) {
    const VmId id = static_cast<VmId>(v);
    if (mu.is_assigned(id) && mu.host_of(id) != initial.host_of(id)) total += inst.demand(id).mem;
  }
  return total;
}

std::int64_t migrated_memory(const Mapping& mu) {
  const Instance& inst = mu.instance();
  std::int64_t total = 0;
  for (std::size_t v = 0; v < inst.num_vms(); ++v) {
    const VmId id = static_cast<VmId>(v);
    if (mu.is_assigned(id) && mu.host_of(id) != inst.initial_host(id)) total += inst.demand(id).mem;
  }
  return total;
}

ObjectiveValue objective_from_terms(std::int64_t active, std::int64_t migrated,
                                    const ObjectiveWeights& w) {
  if (w.infinite()) return {false, active, migrated};
  return {false, w.w_active() * active + w.w_migration() * migrated, 0};
}

ObjectiveValue objective(const Mapping& mu, const Mapping& initial, const ObjectiveWeights& w) {
  if (!mu.is_total()) return {true, 0, 0};
  return objective_from_terms(static_cast<std::int64_t>(mu.active_count()),
                              migrated_memory(mu, initial), w);
}

ObjectiveValue objective(const Mapping& mu, const ObjectiveWeights& w) {
  if (!mu.is_total()) return {true, 0, 0};
  return objective_from_terms(static_cast<std::int64_t>(mu.active_count()), migrated_memory(mu), w);
}

std::int64_t host_migration_cost(HostId h, const Mapping& mu, const Mapping& initial) {
  std::int64_t cost = 0;
  for (VmId v : mu.residents(h)) {
    if (initial.host_of(v) == h) cost += mu.instance().demand(v).mem;
  }
  return cost;
}

std::int64_t host_migration_cost(HostId h, const Mapping& mu) {
  std::int64_t cost = 0;
  for (VmId v : mu.residents(h)) {
    if (mu.instance().initial_host(v) == h) cost += mu.instance().demand(v).mem;
  }
  return cost;
}

Rational vm_size(VmId v, const Instance& inst) {
  const ResourceVec& total = inst.total_demand();
  const ResourceVec& d = inst.demand(v);
  return Rational(d.cpu, total.cpu) + Rational(d.mem, total.mem);
}

Rational surrogate_load(HostId h, const Mapping& mu) {
  const ResourceVec& cap = mu.instance().capacity(h);
  const ResourceVec& l = mu.load(h);
  return Rational(l.cpu, cap.cpu) + Rational(l.mem, cap.mem);
}

AngleKey angle_key(const ResourceVec& r) {
  if (r.is_zero()) throw std::invalid_argument("angle_key: zero vector has no load angle");
  return {r.cpu, r.mem};
}

}  // namespace vmc
