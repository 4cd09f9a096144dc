#include "vmc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "vmc/balcon.hpp"
#include "vmc/datagen.hpp"
#include "vmc/eval.hpp"
#include "vmc/ilp_export.hpp"
#include "vmc/instance_io.hpp"
#include "vmc/oracle.hpp"
#include "vmc/sercon.hpp"

namespace vmc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int unit_exponent(std::string_view unit) {
  if (unit == "B" || unit.empty()) return 0;
  if (unit == "KiB") return 1;
  if (unit == "MiB") return 2;
  if (unit == "GiB") return 3;
  if (unit == "TiB") return 4;
  throw std::invalid_argument("unknown memory unit \"" + std::string(unit) + "\"");
}

std::int64_t parse_int(std::string_view text, const char* what) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument(std::string(what) + ": expected an integer, got \"" +
                                std::string(text) + "\"");
  }
  return value;
}

// Rejected input (as opposed to a malformed command line).
class Rejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

struct SolverFlags {
  std::string mph = "inf";
  std::string mem_unit = "B";
  std::string alpha = "19/20";
  std::int64_t force_steps = 4000;
  std::int64_t gamma = 3;
  std::int64_t max_migrations = std::numeric_limits<std::int64_t>::max();
  std::string min_efficiency = "0";

  void add_to(CLI::App& app, bool with_mph = true) {
    if (with_mph) {
      app.add_option("--mph", mph, "Migration budget per released host: units, KiB/MiB/GiB/TiB, or inf")
          ->capture_default_str();
    }
    app.add_option("--mem-unit", mem_unit, "Size of one instance memory unit (B, KiB, MiB, GiB, TiB)")
        ->capture_default_str();
    app.add_option("--alpha", alpha, "Balanced/lopsided threshold (p/q or decimal)")->capture_default_str();
    app.add_option("-b,--force-steps", force_steps, "Force Step budget per release attempt")
        ->capture_default_str();
    app.add_option("--gamma", gamma, "Max consecutive Force Steps into one host")->capture_default_str();
    app.add_option("--max-migrations", max_migrations, "sercon-orig: total migrated VM budget");
    app.add_option("--min-efficiency", min_efficiency,
                   "sercon-orig: fraction of a host's VMs that must fit before giving up")
        ->capture_default_str();
  }

  [[nodiscard]] SolverParams params(const MphValue& m) const {
    SolverParams p;
    p.alpha = parse_rational(alpha);
    p.max_force_steps = force_steps;
    p.gamma = gamma;
    p.weights = weights_for(m);
    p.validate();
    return p;
  }

  [[nodiscard]] SolverParams params() const { return params(parse_mph(mph, mem_unit)); }

  [[nodiscard]] SerconOriginalParams sercon() const {
    SerconOriginalParams sp;
    sp.max_total_migrations = max_migrations;
    sp.min_migration_efficiency = parse_rational(min_efficiency);
    sp.validate();
    return sp;
  }
};

json report_json(const SolveResult& res, Algorithm algo, bool with_trace) {
  json rep;
  rep["algorithm"] = to_string(algo);
  rep["force_steps"] = res.report.force_steps;
  rep["released_hosts"] = res.report.released_hosts();
  rep["releases"] = json::array();
  for (const ReleaseRecord& r : res.report.releases) {
    rep["releases"].push_back({{"host", r.host},
                               {"accepted", r.accepted},
                               {"force_steps", r.force_steps},
                               {"ample", r.class_counts[0]},
                               {"balanced", r.class_counts[1]},
                               {"lopsided", r.class_counts[2]},
                               {"migrated_after", r.migrated_after}});
  }
  if (with_trace) {
    rep["trace"] = json::array();
    for (const TraceEvent& e : res.report.trace) {
      rep["trace"].push_back({{"released_host", e.released_host},
                              {"vm", e.vm},
                              {"class", to_string(e.cls)},
                              {"destination", e.destination},
                              {"evicted", e.evicted}});
    }
  }
  return rep;
}

std::optional<ObjectiveValue> lower_bound_from(const fs::path& file, const Instance& inst,
                                               const ObjectiveWeights& w) {
  if (!fs::exists(file)) return std::nullopt;
  return read_solution(ModelKind::RelaxedFlavorFlow, inst, w, read_text_file(file)).objective;
}

std::vector<Rational> default_thresholds() {
  std::vector<Rational> t;
  for (int i = 0; i <= 20; ++i) t.emplace_back(i, 20);
  return t;
}

}  // namespace

std::optional<std::int64_t> parse_mph(std::string_view text, std::string_view mem_unit) {
  if (text == "inf" || text == "infinity") return std::nullopt;
  std::size_t digits = 0;
  while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits]))) ++digits;
  const std::int64_t value = parse_int(text.substr(0, digits), "MPH");
  const int shift = 10 * (unit_exponent(text.substr(digits)) - unit_exponent(mem_unit));
  if (shift >= 0) {
    if (shift >= 63 || value > (std::numeric_limits<std::int64_t>::max() >> shift)) {
      throw std::invalid_argument("MPH value overflows: " + std::string(text));
    }
    return value << shift;
  }
  const std::int64_t divisor = std::int64_t{1} << (-shift);
  if (value % divisor != 0) {
    throw std::invalid_argument("MPH " + std::string(text) + " is not a whole number of " +
                                std::string(mem_unit) + " units");
  }
  return value / divisor;
}

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::int64_t den = parse_int(text.substr(slash + 1), "rational");
    if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    return Rational(parse_int(text.substr(0, slash), "rational"), den);
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_int(text, "rational"));
  const std::string_view frac = text.substr(dot + 1);
  if (frac.size() > 15) throw std::invalid_argument("too many decimals: " + std::string(text));
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  const std::int64_t whole = dot == 0 ? 0 : parse_int(text.substr(0, dot), "rational");
  const std::int64_t part = frac.empty() ? 0 : parse_int(frac, "rational");
  if (part < 0 || whole < 0) throw std::invalid_argument("negative decimal: " + std::string(text));
  return Rational(whole) + Rational(part, scale);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Virtual machine consolidation toolkit"};
  app.require_subcommand(1);
  std::function<void()> action;

  // solve
  auto* solve = app.add_subcommand("solve", "Consolidate an instance and write the new mapping");
  std::string solve_algo = "balcon";
  std::string solve_in;
  std::string solve_out;
  bool solve_trace = false;
  SolverFlags solve_flags;
  solve->add_option("instance", solve_in, "Instance JSON")->required();
  solve->add_option("--algo", solve_algo, "balcon, sercon-mod or sercon-orig")->capture_default_str();
  solve->add_option("-o,--output", solve_out, "Output mapping JSON (default: stdout)");
  solve->add_flag("--trace", solve_trace, "Include every stash step in the report");
  solve_flags.add_to(*solve);
  solve->callback([&] {
    action = [&] {
      const Algorithm algo = parse_algorithm(solve_algo);
      SolverParams params = solve_flags.params();
      params.trace = solve_trace;
      const SerconOriginalParams sp = solve_flags.sercon();
      const Instance inst = load_instance(solve_in);
      const SolveResult res = run_algorithm(algo, inst, params, sp);
      json doc = json::parse(mapping_to_json(res.mapping, params.weights));
      doc["report"] = report_json(res, algo, solve_trace);
      emit(solve_out, doc.dump(1) + "\n", out);
    };
  });

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic instance");
  GenConfig gcfg;
  std::string gen_mode = "lopsided";
  std::string gen_out;
  gen->add_option("--mode", gen_mode, "lopsided or uniform")->capture_default_str();
  gen->add_option("--seed", gcfg.seed, "Random seed")->capture_default_str();
  gen->add_option("--hosts", gcfg.num_hosts, "Number of hosts")->capture_default_str();
  gen->add_option("--cpu", gcfg.host_capacity.cpu, "Host cpu capacity")->capture_default_str();
  gen->add_option("--mem", gcfg.host_capacity.mem, "Host memory capacity")->capture_default_str();
  gen->add_option("--flavors", gcfg.num_flavors, "Number of flavors")->capture_default_str();
  gen->add_option("--fill", gcfg.target_fill, "Target fraction of pooled capacity")->capture_default_str();
  gen->add_option("--max-vms", gcfg.max_vms, "Cap on the number of VMs (0: none)")->capture_default_str();
  bool no_saturate = false;
  gen->add_flag("--no-saturate", no_saturate, "Skip the saturation phase");
  gen->add_option("-o,--output", gen_out, "Output instance JSON (default: stdout)");
  gen->callback([&] {
    action = [&] {
      gcfg.mode = parse_gen_mode(gen_mode);
      gcfg.saturate = !no_saturate;
      gcfg.validate();
      const Instance inst = generate_instance(gcfg);
      emit(gen_out, instance_to_json(inst), out);
    };
  });

  // oracle
  auto* orc = app.add_subcommand("oracle", "Exhaustively solve a tiny instance");
  std::string orc_in;
  std::string orc_out;
  std::string orc_mph = "inf";
  std::string orc_unit = "B";
  orc->add_option("instance", orc_in, "Instance JSON")->required();
  orc->add_option("--mph", orc_mph, "Migration budget per released host")->capture_default_str();
  orc->add_option("--mem-unit", orc_unit, "Size of one instance memory unit")->capture_default_str();
  orc->add_option("-o,--output", orc_out, "Output mapping JSON (default: stdout)");
  orc->callback([&] {
    action = [&] {
      const ObjectiveWeights w = weights_for(parse_mph(orc_mph, orc_unit));
      const Instance inst = load_instance(orc_in);
      const OracleResult res = brute_force_optimal(inst, w);
      json doc = json::parse(mapping_to_json(res.mapping, w));
      doc["report"] = {{"algorithm", "oracle"}, {"nodes_explored", res.nodes_explored}};
      emit(orc_out, doc.dump(1) + "\n", out);
    };
  });

  // export-ilp
  auto* ilp = app.add_subcommand("export-ilp", "Write LP models or read back a solver variable dump");
  std::string ilp_in;
  std::string ilp_model = "all";
  std::string ilp_dir = ".";
  std::string ilp_solution;
  std::string ilp_out;
  std::string ilp_mph = "inf";
  std::string ilp_unit = "B";
  ilp->add_option("instance", ilp_in, "Instance JSON")->required();
  ilp->add_option("--model", ilp_model, "all, alloc, flow or flowlb")->capture_default_str();
  ilp->add_option("--mph", ilp_mph, "Migration budget per released host")->capture_default_str();
  ilp->add_option("--mem-unit", ilp_unit, "Size of one instance memory unit")->capture_default_str();
  ilp->add_option("--out-dir", ilp_dir, "Directory for <stem>.<model>.lp files")->capture_default_str();
  ilp->add_option("--solution", ilp_solution, "Variable dump (\"name value\" lines) to validate");
  ilp->add_option("-o,--output", ilp_out, "With --solution --model alloc: write the mapping JSON here");
  ilp->callback([&] {
    action = [&] {
      const ObjectiveWeights w = weights_for(parse_mph(ilp_mph, ilp_unit));
      std::vector<ModelKind> kinds;
      for (ModelKind k : {ModelKind::Allocation, ModelKind::FlavorFlow, ModelKind::RelaxedFlavorFlow}) {
        if (ilp_model == "all" || ilp_model == file_suffix(k)) kinds.push_back(k);
      }
      if (kinds.empty()) throw std::invalid_argument("unknown model \"" + ilp_model + "\"");
      const Instance inst = load_instance(ilp_in);

      if (!ilp_solution.empty()) {
        if (kinds.size() != 1) throw std::invalid_argument("--solution needs a single --model");
        const IlpSolution sol = read_solution(kinds[0], inst, w, read_text_file(ilp_solution));
        json doc = {{"model", to_string(kinds[0])},
                    {"active_hosts", sol.active_hosts},
                    {"migrated_memory", sol.migrated_memory},
                    {"lp_objective", sol.lp_objective},
                    {"objective", sol.objective.primary},
                    {"objective_tiebreak", sol.objective.secondary}};
        if (sol.mapping && !ilp_out.empty()) write_text_file(ilp_out, mapping_to_json(*sol.mapping, w));
        out << doc.dump(1) << '\n';
        return;
      }

      fs::create_directories(ilp_dir);
      const std::string stem = fs::path(ilp_in).stem().string();
      for (ModelKind k : kinds) {
        const fs::path path = fs::path(ilp_dir) / (stem + "." + std::string(file_suffix(k)) + ".lp");
        std::ostringstream text;
        const ModelCounts counts = emit_model(k, inst, w, text);
        write_text_file(path, text.str());
        out << path.string() << ": " << counts.variables << " variables, " << counts.constraints
            << " constraints\n";
      }
    };
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Gap table and performance profile over many instances");
  std::vector<std::string> ev_in;
  std::vector<std::string> ev_algos{"balcon", "sercon-mod", "sercon-orig"};
  std::string ev_dir = ".";
  std::string ev_lb_dir;
  unsigned ev_jobs = 1;
  bool ev_all = false;
  bool ev_no_oracle = false;
  SolverFlags ev_flags;
  ev->add_option("instances", ev_in, "Instance JSON files")->required();
  ev->add_option("--algo", ev_algos, "Algorithms to compare")->capture_default_str();
  ev->add_option("--out-dir", ev_dir, "Directory for gaps.csv and profile.csv")->capture_default_str();
  ev->add_option("--lb-dir", ev_lb_dir, "Directory with <stem>.flowlb.sol relaxed solutions");
  ev->add_option("-j,--jobs", ev_jobs, "Parallel workers")->capture_default_str();
  ev->add_flag("--include-trivial", ev_all, "Average gaps over all instances, not only non-trivial ones");
  ev->add_flag("--no-oracle", ev_no_oracle, "Never run the exhaustive oracle");
  ev_flags.add_to(*ev);
  ev->callback([&] {
    action = [&] {
      const SolverParams params = ev_flags.params();
      const SerconOriginalParams sp = ev_flags.sercon();
      std::vector<Algorithm> algos;
      for (const auto& a : ev_algos) algos.push_back(parse_algorithm(a));
      std::vector<Instance> instances;
      for (const auto& p : ev_in) instances.push_back(load_instance(p));

      std::vector<GapRecord> records(instances.size() * algos.size());
      parallel_for(instances.size(), ev_jobs, [&](std::size_t i) {
        const Instance& inst = instances[i];
        const std::string stem = fs::path(ev_in[i]).stem().string();
        ReferenceKind kind = ReferenceKind::Initial;
        ObjectiveValue ref;
        if (!ev_no_oracle) {
          try {
            ref = brute_force_optimal(inst, params.weights).objective;
            kind = ReferenceKind::Oracle;
          } catch (const OracleRefused&) {
          }
        }
        if (kind == ReferenceKind::Initial && !ev_lb_dir.empty()) {
          if (auto lb = lower_bound_from(fs::path(ev_lb_dir) / (stem + ".flowlb.sol"), inst, params.weights)) {
            ref = *lb;
            kind = ReferenceKind::LowerBound;
          }
        }
        for (std::size_t a = 0; a < algos.size(); ++a) {
          const auto start = std::chrono::steady_clock::now();
          const SolveResult res = run_algorithm(algos[a], inst, params, sp);
          GapRecord rec = make_gap_record(stem, std::string(to_string(algos[a])), res.report.objective,
                                          ref, res.report.initial_objective, kind,
                                          res.report.released_hosts() > 0);
          rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          records[i * algos.size() + a] = std::move(rec);
        }
      });

      fs::create_directories(ev_dir);
      std::ostringstream gaps;
      write_gaps_csv(gaps, records);
      write_text_file(fs::path(ev_dir) / "gaps.csv", gaps.str());

      std::ostringstream profile;
      profile << "algorithm,";
      bool header = true;
      for (Algorithm a : algos) {
        std::vector<GapRecord> mine;
        for (const auto& r : records) {
          if (r.algorithm == to_string(a) && r.reference != ReferenceKind::Initial) mine.push_back(r);
        }
        std::ostringstream one;
        write_profile_csv(one, performance_profile(mine, default_thresholds()));
        std::istringstream lines(one.str());
        std::string line;
        std::getline(lines, line);
        if (header) {
          profile << line << '\n';
          header = false;
        }
        while (std::getline(lines, line)) profile << to_string(a) << ',' << line << '\n';

        const auto mean = mean_gap(mine, !ev_all);
        const auto optimal = std::count_if(mine.begin(), mine.end(), [](const GapRecord& r) {
          return r.gap && *r.gap == Rational(0);
        });
        out << to_string(a) << ": mean gap " << (mean ? std::to_string(mean->to_double()) : "n/a")
            << ", at reference on " << optimal << " of " << mine.size() << " referenced instances\n";
      }
      write_text_file(fs::path(ev_dir) / "profile.csv", profile.str());
    };
  });

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run algorithms over a grid of MPH values");
  std::string sw_in;
  std::vector<std::string> sw_algos{"balcon", "sercon-mod"};
  std::vector<std::string> sw_grid{"0", "1", "2", "4", "8", "16", "32", "inf"};
  std::string sw_out;
  std::string sw_lb_dir;
  unsigned sw_jobs = 1;
  bool sw_no_oracle = false;
  SolverFlags sw_flags;
  sw->add_option("instance", sw_in, "Instance JSON")->required();
  sw->add_option("--algo", sw_algos, "Algorithms to run")->capture_default_str();
  sw->add_option("--grid", sw_grid, "MPH grid values")->delimiter(',')->capture_default_str();
  sw->add_option("-o,--output", sw_out, "sweep.csv path (default: stdout)");
  sw->add_option("--lb-dir", sw_lb_dir, "Directory with <stem>.mph-<value>.flowlb.sol relaxed solutions");
  sw->add_option("-j,--jobs", sw_jobs, "Parallel workers")->capture_default_str();
  sw->add_flag("--no-oracle", sw_no_oracle, "Never run the exhaustive oracle");
  sw_flags.add_to(*sw, false);
  sw->callback([&] {
    action = [&] {
      SweepOptions opts;
      opts.params = sw_flags.params(std::nullopt);
      opts.sercon = sw_flags.sercon();
      opts.use_oracle = !sw_no_oracle;
      opts.jobs = sw_jobs;
      std::vector<MphValue> grid;
      for (const auto& g : sw_grid) grid.push_back(parse_mph(g, sw_flags.mem_unit));
      std::vector<Algorithm> algos;
      for (const auto& a : sw_algos) algos.push_back(parse_algorithm(a));
      const Instance inst = load_instance(sw_in);
      if (!sw_lb_dir.empty()) {
        const std::string stem = fs::path(sw_in).stem().string();
        for (const MphValue& m : grid) {
          const fs::path file = fs::path(sw_lb_dir) / (stem + ".mph-" + mph_label(m) + ".flowlb.sol");
          if (auto lb = lower_bound_from(file, inst, weights_for(m))) opts.lower_bounds[mph_label(m)] = *lb;
        }
      }
      std::ostringstream csv;
      write_sweep_csv(csv, mph_sweep(inst, algos, grid, opts));
      emit(sw_out, csv.str(), out);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InstanceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRejected;
  } catch (const OracleRefused& e) {
    err << "error: " << e.what() << '\n';
    return kExitRejected;
  } catch (const SolutionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRejected;
  } catch (const Rejected& e) {
    err << "error: " << e.what() << '\n';
    return kExitRejected;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRejected;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace vmc::cli
