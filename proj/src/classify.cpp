#include "vmc/classify.hpp"

#include <algorithm>
#include <stdexcept>

namespace vmc {

void Stash::add(VmId v) {
  members_.push_back(v);
  sum_ += inst_->demand(v);
}

void Stash::remove(VmId v) {
  auto it = std::find(members_.begin(), members_.end(), v);
  if (it == members_.end()) throw std::logic_error("Stash::remove: VM not in stash");
  members_.erase(it);
  sum_ -= inst_->demand(v);
}

VmId Stash::peek_largest() const {
  if (members_.empty()) throw std::logic_error("Stash::peek_largest: empty stash");
  VmId best = members_.front();
  for (VmId v : members_) {
    const auto kv = inst_->size_key(v);
    const auto kb = inst_->size_key(best);
    if (kv > kb || (kv == kb && v < best)) best = v;
  }
  return best;
}

std::string_view to_string(ClusterClass c) {
  switch (c) {
    case ClusterClass::Ample:
      return "ample";
    case ClusterClass::Balanced:
      return "balanced";
    case ClusterClass::Lopsided:
      return "lopsided";
  }
  return "?";
}

namespace {

void check_stash_vector(const ResourceVec& s) {
  if (s.cpu < 0 || s.mem < 0 || s.is_zero()) {
    throw std::invalid_argument("stash vector must be non-negative and non-zero");
  }
}

// min(cpu / s.cpu, mem / s.mem), skipping a resource whose stash component is 0.
Rational ratio_min(const ResourceVec& amount, const ResourceVec& s) {
  if (s.cpu == 0) return Rational(amount.mem, s.mem);
  if (s.mem == 0) return Rational(amount.cpu, s.cpu);
  return min(Rational(amount.cpu, s.cpu), Rational(amount.mem, s.mem));
}

}  // namespace

Rational capacity(const ResourceVec& s, std::span<const HostId> hosts, const Mapping& mu) {
  check_stash_vector(s);
  Rational total;
  for (HostId h : hosts) total += ratio_min(mu.free(h), s);
  return total;
}

Rational potential_capacity(const ResourceVec& s, std::span<const HostId> hosts,
                            const Mapping& mu) {
  check_stash_vector(s);
  ResourceVec pooled;
  for (HostId h : hosts) pooled += mu.free(h);
  return ratio_min(pooled, s);
}

Rational balance_factor(const ResourceVec& s, std::span<const HostId> hosts, const Mapping& mu) {
  const Rational pcap = potential_capacity(s, hosts, mu);
  if (pcap == Rational(0)) return Rational(1);
  return capacity(s, hosts, mu) / pcap;
}

ClusterClass classify(const Stash& stash, std::span<const HostId> hosts, const Mapping& mu,
                      VmId v, const Rational& alpha) {
  for (HostId h : hosts) {
    if (mu.fits(v, h)) return ClusterClass::Ample;
  }
  const Rational cap = capacity(stash.vector(), hosts, mu);
  const Rational pcap = potential_capacity(stash.vector(), hosts, mu);
  if (cap < Rational(1) || cap < alpha * pcap) return ClusterClass::Lopsided;
  return ClusterClass::Balanced;
}

}  // namespace vmc
