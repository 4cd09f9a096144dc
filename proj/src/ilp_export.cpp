#include "vmc/ilp_export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace vmc {

namespace {

constexpr double kTolerance = 1e-6;
constexpr std::size_t kTermsPerLine = 8;

std::string alloc_var(std::size_t v, std::size_t h) {
  return "alloc_v" + std::to_string(v) + "_h" + std::to_string(h);
}
std::string active_var(std::size_t h) { return "active_h" + std::to_string(h); }
std::string migr_var(std::size_t v) { return "migr_v" + std::to_string(v); }
std::string in_var(std::size_t f, std::size_t h) {
  return "in_f" + std::to_string(f) + "_h" + std::to_string(h);
}
std::string out_var(std::size_t f, std::size_t h) {
  return "out_f" + std::to_string(f) + "_h" + std::to_string(h);
}

std::string format_coef(double c) {
  std::ostringstream os;
  if (c == std::floor(c) && std::abs(c) < 1e15) {
    os << static_cast<std::int64_t>(c);
  } else {
    os << std::setprecision(12) << c;
  }
  return os.str();
}

struct Term {
  double coef;
  std::string var;
};

// One LP-format linear expression, wrapped so that no line grows unbounded.
void write_expression(std::ostream& out, const std::vector<Term>& terms) {
  std::size_t on_line = 0;
  bool first = true;
  for (const Term& t : terms) {
    if (on_line == kTermsPerLine) {
      out << "\n   ";
      on_line = 0;
    }
    const double mag = std::abs(t.coef);
    if (first) {
      if (t.coef < 0) out << "- ";
    } else {
      out << (t.coef < 0 ? " - " : " + ");
    }
    out << format_coef(mag) << ' ' << t.var;
    first = false;
    ++on_line;
  }
}

void write_row(std::ostream& out, const std::string& name, const std::vector<Term>& terms,
               const char* sense, double rhs) {
  out << ' ' << name << ": ";
  write_expression(out, terms);
  out << ' ' << sense << ' ' << format_coef(rhs) << '\n';
}

void write_section_vars(std::ostream& out, const char* header, const std::vector<std::string>& vars) {
  if (vars.empty()) return;
  out << header << '\n';
  for (std::size_t i = 0; i < vars.size(); ++i) {
    out << (i % kTermsPerLine == 0 ? " " : " ") << vars[i];
    if (i % kTermsPerLine == kTermsPerLine - 1 || i + 1 == vars.size()) out << '\n';
  }
}

struct Coefficients {
  double active;
  double memory;
};

Coefficients objective_coefficients(const Instance& inst, const ObjectiveWeights& w) {
  if (w.infinite()) return {1.0, migration_epsilon(inst)};
  return {static_cast<double>(w.w_active()), static_cast<double>(w.w_migration())};
}

void write_objective(std::ostream& out, std::vector<Term> terms, const std::string& fallback_var) {
  std::erase_if(terms, [](const Term& t) { return t.coef == 0.0; });
  if (terms.empty()) terms.push_back({0.0, fallback_var});
  out << "Minimize\n obj: ";
  write_expression(out, terms);
  out << "\nSubject To\n";
}

bool is_integral(double x) { return std::abs(x - std::round(x)) <= kTolerance; }

class Values {
 public:
  explicit Values(std::map<std::string, double> values) : values_(std::move(values)) {}

  double get(const std::string& name) {
    seen_.insert(name);
    auto it = values_.find(name);
    return it == values_.end() ? 0.0 : it->second;
  }

  void reject_unknown() const {
    for (const auto& [name, value] : values_) {
      if (!seen_.contains(name)) throw SolutionError("unknown variable in solution: " + name);
    }
  }

 private:
  std::map<std::string, double> values_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& row) {
  if (!ok) throw SolutionError("solution violates row " + row);
}

double binary_value(Values& vals, const std::string& name) {
  const double x = vals.get(name);
  if (!is_integral(x) || x < -kTolerance || x > 1 + kTolerance) {
    throw SolutionError("variable " + name + " is not binary");
  }
  return std::round(x);
}

IlpSolution read_allocation(const Instance& inst, const ObjectiveWeights& w, Values& vals) {
  const std::size_t nv = inst.num_vms();
  const std::size_t nh = inst.num_hosts();
  const Coefficients c = objective_coefficients(inst, w);

  std::vector<double> active(nh);
  for (std::size_t h = 0; h < nh; ++h) active[h] = binary_value(vals, active_var(h));

  std::vector<HostId> hosts_of(nv, kUnassigned);
  std::vector<double> cpu(nh, 0.0);
  std::vector<double> mem(nh, 0.0);
  double lp_obj = 0.0;
  for (std::size_t h = 0; h < nh; ++h) lp_obj += c.active * active[h];
  for (std::size_t v = 0; v < nv; ++v) {
    const ResourceVec& d = inst.demand(static_cast<VmId>(v));
    double row = 0.0;
    for (std::size_t h = 0; h < nh; ++h) {
      const double x = binary_value(vals, alloc_var(v, h));
      row += x;
      cpu[h] += static_cast<double>(d.cpu) * x;
      mem[h] += static_cast<double>(d.mem) * x;
      require(x <= active[h], "link_v" + std::to_string(v) + "_h" + std::to_string(h));
      if (x == 1.0) hosts_of[v] = static_cast<HostId>(h);
    }
    require(row == 1.0, "assign_v" + std::to_string(v));
    const double migr = binary_value(vals, migr_var(v));
    const double stay = vals.get(alloc_var(v, static_cast<std::size_t>(inst.initial_host(static_cast<VmId>(v)))));
    require(std::abs(migr + stay - 1.0) <= kTolerance, "migr_v" + std::to_string(v));
    lp_obj += c.memory * static_cast<double>(d.mem) * migr;
  }
  for (std::size_t h = 0; h < nh; ++h) {
    const ResourceVec& cap = inst.capacity(static_cast<HostId>(h));
    require(cpu[h] <= static_cast<double>(cap.cpu) + kTolerance, "cpu_h" + std::to_string(h));
    require(mem[h] <= static_cast<double>(cap.mem) + kTolerance, "mem_h" + std::to_string(h));
  }
  vals.reject_unknown();

  Mapping mu(inst, hosts_of);
  IlpSolution sol{static_cast<std::int64_t>(mu.active_count()),
                  static_cast<double>(migrated_memory(mu)), lp_obj, objective(mu, w),
                  std::nullopt};
  sol.mapping = std::move(mu);
  return sol;
}

IlpSolution read_flow(const Instance& inst, const ObjectiveWeights& w, bool relaxed, Values& vals) {
  const std::size_t nf = inst.num_flavors();
  const std::size_t nh = inst.num_hosts();
  const FlavorCount n = flavor_counts(inst);
  const Coefficients c = objective_coefficients(inst, w);

  std::vector<double> active(nh);
  for (std::size_t h = 0; h < nh; ++h) active[h] = binary_value(vals, active_var(h));

  std::vector<std::vector<double>> in(nf, std::vector<double>(nh));
  std::vector<std::vector<double>> out(nf, std::vector<double>(nh));
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t h = 0; h < nh; ++h) {
      in[f][h] = vals.get(in_var(f, h));
      out[f][h] = vals.get(out_var(f, h));
      for (const auto& [name, x] : {std::pair{in_var(f, h), in[f][h]}, std::pair{out_var(f, h), out[f][h]}}) {
        if (x < -kTolerance) throw SolutionError("variable " + name + " is negative");
        if (!relaxed && !is_integral(x)) throw SolutionError("variable " + name + " is not integral");
      }
    }
  }

  double migrated = 0.0;
  for (std::size_t f = 0; f < nf; ++f) {
    const std::string fs = std::to_string(f);
    double balance = 0.0;
    for (std::size_t h = 0; h < nh; ++h) {
      const std::string tag = "_f" + fs + "_h" + std::to_string(h);
      const double nfh = static_cast<double>(n[f][h]);
      balance += out[f][h] - in[f][h];
      require(out[f][h] <= nfh + kTolerance, "outcap" + tag);
      require(out[f][h] + nfh * active[h] >= nfh - kTolerance, "evac" + tag);
      migrated += static_cast<double>(inst.flavors()[f].demand.mem) * out[f][h];
    }
    require(std::abs(balance) <= kTolerance * static_cast<double>(nh + 1), "flow_f" + fs);
  }
  for (std::size_t h = 0; h < nh; ++h) {
    double cpu = 0.0;
    double mem = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
      const double count = static_cast<double>(n[f][h]) + in[f][h] - out[f][h];
      cpu += static_cast<double>(inst.flavors()[f].demand.cpu) * count;
      mem += static_cast<double>(inst.flavors()[f].demand.mem) * count;
    }
    const ResourceVec& cap = inst.capacity(static_cast<HostId>(h));
    require(cpu <= static_cast<double>(cap.cpu) * active[h] + kTolerance * (1 + cpu),
            "cpu_h" + std::to_string(h));
    require(mem <= static_cast<double>(cap.mem) * active[h] + kTolerance * (1 + mem),
            "mem_h" + std::to_string(h));
  }
  vals.reject_unknown();

  std::int64_t active_count = 0;
  for (double a : active) active_count += static_cast<std::int64_t>(a);
  const double lp_obj = c.active * static_cast<double>(active_count) + c.memory * migrated;

  // Integer models: migrated memory is an integer. Relaxation: round up, which
  // keeps the value a lower bound on every integral objective.
  const auto migrated_int = static_cast<std::int64_t>(
      relaxed ? std::ceil(migrated - kTolerance * (1 + migrated)) : std::llround(migrated));
  ObjectiveValue obj;
  if (w.infinite()) {
    obj = objective_from_terms(active_count, migrated_int, w);
  } else {
    const double weighted = static_cast<double>(w.w_active()) * static_cast<double>(active_count) +
                            static_cast<double>(w.w_migration()) * migrated;
    obj.primary = static_cast<std::int64_t>(
        relaxed ? std::ceil(weighted - kTolerance * (1 + weighted)) : std::llround(weighted));
  }
  return {active_count, migrated, lp_obj, obj, std::nullopt};
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Allocation:
      return "allocation";
    case ModelKind::FlavorFlow:
      return "flavor-flow";
    case ModelKind::RelaxedFlavorFlow:
      return "relaxed-flavor-flow";
  }
  return "?";
}

std::string_view file_suffix(ModelKind kind) {
  switch (kind) {
    case ModelKind::Allocation:
      return "alloc";
    case ModelKind::FlavorFlow:
      return "flow";
    case ModelKind::RelaxedFlavorFlow:
      return "flowlb";
  }
  return "?";
}

FlavorCount flavor_counts(const Instance& inst) {
  FlavorCount n(inst.num_flavors(), std::vector<std::int64_t>(inst.num_hosts(), 0));
  for (const Vm& v : inst.vms()) ++n[v.flavor][inst.initial_host(v.id)];
  return n;
}

ModelCounts expected_counts(ModelKind kind, const Instance& inst) {
  const std::size_t v = inst.num_vms();
  const std::size_t h = inst.num_hosts();
  const std::size_t f = inst.num_flavors();
  if (kind == ModelKind::Allocation) return {v * h + v + h, v * h + 2 * h + 2 * v};
  return {h + 2 * f * h, 2 * f * h + 2 * h + f};
}

double migration_epsilon(const Instance& inst) {
  const double total = static_cast<double>(inst.total_demand().mem);
  return std::min(1e-6, 0.5 / (1.0 + total));
}

ModelCounts emit_allocation_model(const Instance& inst, const ObjectiveWeights& w,
                                  std::ostream& out) {
  const std::size_t nv = inst.num_vms();
  const std::size_t nh = inst.num_hosts();
  const Coefficients c = objective_coefficients(inst, w);
  ModelCounts counts;

  out << "\\ allocation model: " << nv << " VMs, " << nh << " hosts\n";
  std::vector<Term> obj;
  for (std::size_t h = 0; h < nh; ++h) obj.push_back({c.active, active_var(h)});
  for (std::size_t v = 0; v < nv; ++v) {
    obj.push_back({c.memory * static_cast<double>(inst.demand(static_cast<VmId>(v)).mem), migr_var(v)});
  }
  write_objective(out, std::move(obj), active_var(0));

  for (std::size_t v = 0; v < nv; ++v) {
    std::vector<Term> row;
    for (std::size_t h = 0; h < nh; ++h) row.push_back({1.0, alloc_var(v, h)});
    write_row(out, "assign_v" + std::to_string(v), row, "=", 1);
    ++counts.constraints;
  }
  for (bool cpu : {true, false}) {
    for (std::size_t h = 0; h < nh; ++h) {
      std::vector<Term> row;
      for (std::size_t v = 0; v < nv; ++v) {
        const ResourceVec& d = inst.demand(static_cast<VmId>(v));
        row.push_back({static_cast<double>(cpu ? d.cpu : d.mem), alloc_var(v, h)});
      }
      if (row.empty()) row.push_back({0.0, active_var(h)});
      const ResourceVec& cap = inst.capacity(static_cast<HostId>(h));
      write_row(out, (cpu ? "cpu_h" : "mem_h") + std::to_string(h), row, "<=",
                static_cast<double>(cpu ? cap.cpu : cap.mem));
      ++counts.constraints;
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t h = 0; h < nh; ++h) {
      write_row(out, "link_v" + std::to_string(v) + "_h" + std::to_string(h),
                {{1.0, alloc_var(v, h)}, {-1.0, active_var(h)}}, "<=", 0);
      ++counts.constraints;
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    const auto h0 = static_cast<std::size_t>(inst.initial_host(static_cast<VmId>(v)));
    write_row(out, "migr_v" + std::to_string(v), {{1.0, migr_var(v)}, {1.0, alloc_var(v, h0)}}, "=",
              1);
    ++counts.constraints;
  }

  std::vector<std::string> binaries;
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t h = 0; h < nh; ++h) binaries.push_back(alloc_var(v, h));
  }
  for (std::size_t h = 0; h < nh; ++h) binaries.push_back(active_var(h));
  for (std::size_t v = 0; v < nv; ++v) binaries.push_back(migr_var(v));
  write_section_vars(out, "Binary", binaries);
  out << "End\n";
  counts.variables = binaries.size();
  return counts;
}

ModelCounts emit_flavor_flow_model(const Instance& inst, const ObjectiveWeights& w, bool relaxed,
                                   std::ostream& out) {
  const std::size_t nf = inst.num_flavors();
  const std::size_t nh = inst.num_hosts();
  const FlavorCount n = flavor_counts(inst);
  const Coefficients c = objective_coefficients(inst, w);
  ModelCounts counts;

  out << "\\ " << (relaxed ? "relaxed " : "") << "flavor flow model: " << nf << " flavors, " << nh
      << " hosts\n";
  std::vector<Term> obj;
  for (std::size_t h = 0; h < nh; ++h) obj.push_back({c.active, active_var(h)});
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t h = 0; h < nh; ++h) {
      obj.push_back({c.memory * static_cast<double>(inst.flavors()[f].demand.mem), out_var(f, h)});
    }
  }
  write_objective(out, std::move(obj), active_var(0));

  for (std::size_t f = 0; f < nf; ++f) {
    std::vector<Term> row;
    for (std::size_t h = 0; h < nh; ++h) row.push_back({1.0, out_var(f, h)});
    for (std::size_t h = 0; h < nh; ++h) row.push_back({-1.0, in_var(f, h)});
    write_row(out, "flow_f" + std::to_string(f), row, "=", 0);
    ++counts.constraints;
  }
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t h = 0; h < nh; ++h) {
      write_row(out, "outcap_f" + std::to_string(f) + "_h" + std::to_string(h),
                {{1.0, out_var(f, h)}}, "<=", static_cast<double>(n[f][h]));
      ++counts.constraints;
    }
  }
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t h = 0; h < nh; ++h) {
      const auto nfh = static_cast<double>(n[f][h]);
      write_row(out, "evac_f" + std::to_string(f) + "_h" + std::to_string(h),
                {{1.0, out_var(f, h)}, {nfh, active_var(h)}}, ">=", nfh);
      ++counts.constraints;
    }
  }
  for (bool cpu : {true, false}) {
    for (std::size_t h = 0; h < nh; ++h) {
      std::vector<Term> row;
      double initial = 0.0;
      for (std::size_t f = 0; f < nf; ++f) {
        const ResourceVec& d = inst.flavors()[f].demand;
        const auto amount = static_cast<double>(cpu ? d.cpu : d.mem);
        row.push_back({amount, in_var(f, h)});
        row.push_back({-amount, out_var(f, h)});
        initial += amount * static_cast<double>(n[f][h]);
      }
      const ResourceVec& cap = inst.capacity(static_cast<HostId>(h));
      row.push_back({-static_cast<double>(cpu ? cap.cpu : cap.mem), active_var(h)});
      write_row(out, (cpu ? "cpu_h" : "mem_h") + std::to_string(h), row, "<=", -initial);
      ++counts.constraints;
    }
  }

  std::vector<std::string> flows;
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t h = 0; h < nh; ++h) {
      flows.push_back(in_var(f, h));
      flows.push_back(out_var(f, h));
    }
  }
  std::vector<std::string> binaries;
  for (std::size_t h = 0; h < nh; ++h) binaries.push_back(active_var(h));
  if (!relaxed) write_section_vars(out, "General", flows);
  write_section_vars(out, "Binary", binaries);
  out << "End\n";
  counts.variables = flows.size() + binaries.size();
  return counts;
}

ModelCounts emit_model(ModelKind kind, const Instance& inst, const ObjectiveWeights& w,
                       std::ostream& out) {
  switch (kind) {
    case ModelKind::Allocation:
      return emit_allocation_model(inst, w, out);
    case ModelKind::FlavorFlow:
      return emit_flavor_flow_model(inst, w, false, out);
    case ModelKind::RelaxedFlavorFlow:
      return emit_flavor_flow_model(inst, w, true, out);
  }
  throw std::invalid_argument("unknown model kind");
}

std::map<std::string, double> parse_variable_dump(std::string_view text) {
  std::map<std::string, double> values;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    std::string value;
    if (!(fields >> name)) continue;
    std::string extra;
    if (!(fields >> value) || (fields >> extra)) {
      throw SolutionError("line " + std::to_string(lineno) + ": expected \"name value\"");
    }
    double x = 0.0;
    try {
      std::size_t used = 0;
      x = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw SolutionError("line " + std::to_string(lineno) + ": bad value \"" + value + "\"");
    }
    if (!values.emplace(name, x).second) {
      throw SolutionError("line " + std::to_string(lineno) + ": duplicate variable " + name);
    }
  }
  return values;
}

IlpSolution read_solution(ModelKind kind, const Instance& inst, const ObjectiveWeights& w,
                          std::string_view solver_output) {
  Values vals(parse_variable_dump(solver_output));
  switch (kind) {
    case ModelKind::Allocation:
      return read_allocation(inst, w, vals);
    case ModelKind::FlavorFlow:
      return read_flow(inst, w, false, vals);
    case ModelKind::RelaxedFlavorFlow:
      return read_flow(inst, w, true, vals);
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace vmc
