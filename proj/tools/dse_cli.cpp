#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "dse/codesign.hpp"
#include "dse/drivers.hpp"
#include "dse/errors.hpp"
#include "dse/explorer.hpp"
#include "dse/io.hpp"
#include "dse/oracle.hpp"
#include "dse/report.hpp"

namespace fs = std::filesystem;
using namespace dse;

namespace {

struct Inputs {
  std::vector<std::string> workload_files;
  std::string db_file;
  std::string budget_file;
  std::string config_file;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;

  // Raw text of everything read, hashed into the run id.
  std::string digest_text;

  WorkloadSet workloads() {
    WorkloadSet w;
    for (const auto& f : workload_files) {
      digest_text += read_text(f);
      w.push_back(load_workload(f));
    }
    return w;
  }
  IpDatabase db() {
    digest_text += read_text(db_file);
    return load_database(db_file);
  }
  Budget budget() {
    digest_text += read_text(budget_file);
    return load_budget(budget_file);
  }
  ExplorerConfig config() {
    ExplorerConfig c;
    if (!config_file.empty()) {
      digest_text += read_text(config_file);
      c = config_from_json(read_json(config_file));
    }
    if (seed) c.seed = *seed;
    return c;
  }
  RunInfo info(const std::string& mode, std::uint64_t s) const {
    return {fnv1a_hex(mode + "\n" + digest_text), s, tool_version()};
  }
  fs::path out(const std::string& name) const {
    fs::create_directories(out_dir);
    return fs::path(out_dir) / name;
  }
};

void add_workloads(CLI::App* c, Inputs& in) {
  c->add_option("--workloads,-w", in.workload_files, "Workload JSON files")->required()->check(CLI::ExistingFile);
}
void add_db(CLI::App* c, Inputs& in) {
  c->add_option("--db", in.db_file, "IP database JSON")->required()->check(CLI::ExistingFile);
}
void add_budget(CLI::App* c, Inputs& in) {
  c->add_option("--budget", in.budget_file, "Budget JSON")->required()->check(CLI::ExistingFile);
}
void add_config(CLI::App* c, Inputs& in) {
  c->add_option("--config", in.config_file, "Explorer config JSON")->check(CLI::ExistingFile);
  c->add_option("--seed", in.seed, "Overrides the config seed");
}
void add_out(CLI::App* c, Inputs& in) { c->add_option("--out,-o", in.out_dir, "Output directory"); }

template <class F>
void write_stream(const fs::path& path, F&& body) {
  std::ostringstream os;
  body(os);
  write_text(path, os.str());
  spdlog::info("wrote {}", path.string());
}

json metrics_json(const MetricValues& m) {
  return {{"latency_s", m.latency_s}, {"power_w", m.power_w}, {"area_mm2", m.area_mm2}};
}

json stamp(const RunInfo& info) {
  return {{"spec_hash", info.spec_hash}, {"seed", info.seed}, {"version", info.version}};
}

void write_exploration(Inputs& in, const std::string& mode, const ExploreResult& r, const ExplorerConfig& cfg,
                       const Budget& budget) {
  const RunInfo info = in.info(mode, cfg.seed);
  write_json(in.out("best_design.json"), design_to_json(r.best));
  write_json(in.out("trace.json"), trace_to_json(r.trace));
  write_stream(in.out("trace.csv"), [&](std::ostream& os) { write_trace_csv(os, r.trace, info); });
  const json summary = {{"run", stamp(info)},
                        {"config", config_to_json(cfg)},
                        {"budget", budget_to_json(budget)},
                        {"best_distance", r.best_distance},
                        {"met", r.met},
                        {"metrics", metrics_json(r.best_metrics)},
                        {"iterations", r.trace.records.size()},
                        {"simulations", r.simulations}};
  write_json(in.out("summary.json"), summary);
  std::cout << "best distance " << r.best_distance << (r.met ? " (budget met)" : " (budget not met)") << " after "
            << r.trace.records.size() << " iterations, " << r.simulations << " simulations\n";
}

// ---------------------------------------------------------------- commands

int cmd_simulate(Inputs& in, const std::string& design_file, double oracle_dt, bool phases) {
  in.digest_text += read_text(design_file);
  const auto w = in.workloads();
  const auto db = in.db();
  const auto d = load_design(design_file);
  SimOptions opt;
  opt.record_phases = phases;
  const auto t0 = std::chrono::steady_clock::now();
  const SimResult r = simulate(d, w, db, opt);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json out = result_to_json(r);
  out["run"] = stamp(in.info("simulate", 0));
  out["wall_s"] = wall;
  if (oracle_dt > 0.0) {
    const SimResult o = oracle_simulate_relative(d, w, db, oracle_dt);
    out["oracle"] = {{"dt_rel", oracle_dt},
                     {"makespan_s", o.makespan_s},
                     {"workload_latency_s", o.workload_latency_s},
                     {"power_w", o.power_w}};
  }
  if (in.out_dir == "-") {
    std::cout << out.dump(2) << "\n";
  } else {
    write_json(in.out("result.json"), out);
    std::cout << "makespan_s " << r.makespan_s << " power_w " << r.power_w << " area_mm2 " << r.area_mm2 << "\n";
  }
  return 0;
}

int cmd_explore(Inputs& in, const std::string& start_file, const std::string& resume_file, std::size_t ckpt_every) {
  const auto w = in.workloads();
  const auto db = in.db();
  const auto budget = in.budget();
  auto cfg = in.config();
  if (ckpt_every) cfg.checkpoint_every = ckpt_every;
  std::optional<DesignPoint> start;
  if (!start_file.empty()) start = load_design(start_file);
  std::optional<AnnealState> resume;
  if (!resume_file.empty()) resume = checkpoint_from_json(read_json(resume_file));

  AnnealHooks hooks;
  if (cfg.checkpoint_every) {
    const fs::path ckpt = in.out("checkpoint.json");
    hooks.on_checkpoint = [ckpt](const AnnealState& s) {
      write_json(ckpt, checkpoint_to_json(s));
      spdlog::debug("checkpoint at iteration {}", s.next_iteration);
    };
  }
  spdlog::info("exploring {} workload(s), awareness {}, seed {}", w.size(), to_string(cfg.awareness), cfg.seed);
  const auto r = anneal(w, db, budget, cfg, hooks, start ? &*start : nullptr, resume ? &*resume : nullptr);
  write_exploration(in, "explore", r, cfg, budget);
  return 0;
}

int cmd_ablate(Inputs& in, const std::string& level, std::size_t seeds, double target) {
  const auto w = in.workloads();
  const auto db = in.db();
  const auto budget = in.budget();
  auto cfg = in.config();
  const Awareness a = parse_awareness(level);
  if (seeds <= 1) {
    const auto r = naive_sa_baseline(w, db, budget, cfg, a);
    write_exploration(in, std::string("ablate-") + level, r, cfg, budget);
    return 0;
  }
  cfg.stop_distance = target;
  const std::uint64_t first = cfg.seed;
  std::vector<double> iters;
  write_stream(in.out("ablation.csv"), [&](std::ostream& os) {
    os << provenance_line(in.info("ablate-" + level, first)) << "\n"
       << "level,seed,iterations_to_target,best_distance,met\n";
    for (std::size_t s = 0; s < seeds; ++s) {
      cfg.seed = first + s;
      const auto r = naive_sa_baseline(w, db, budget, cfg, a);
      std::size_t n = r.trace.records.size();
      if (r.best_distance > target && !r.met) n = cfg.max_iterations;
      else
        for (const auto& rec : r.trace.records)
          if (rec.best_distance <= target) {
            n = rec.iteration + 1;
            break;
          }
      iters.push_back(static_cast<double>(n));
      os << level << ',' << cfg.seed << ',' << n << ',' << r.best_distance << ',' << (r.met ? 1 : 0) << "\n";
    }
  });
  std::cout << level << ": median iterations to distance " << target << " = " << median(iters) << " over " << seeds
            << " seeds\n";
  return 0;
}

int cmd_sweep(Inputs& in, double grid_pct, std::size_t max_perm) {
  const auto w = in.workloads();
  const auto db = in.db();
  const auto budget = in.budget();
  SweepConfig sc;
  sc.grid_pct = grid_pct;
  sc.explorer = in.config();
  sc.max_permutations = max_perm;
  const auto r = run_sweep(w, db, budget, sc);
  write_stream(in.out("pareto.csv"),
               [&](std::ostream& os) { write_sweep_csv(os, r, in.info("sweep", sc.explorer.seed)); });
  std::cout << r.runs << " runs, " << r.combined.size() << " system candidates, " << r.combined_front.size()
            << " on the combined front\n";
  return 0;
}

int cmd_divide_conquer(Inputs& in, const std::string& sub_file) {
  const auto w = in.workloads();
  const auto db = in.db();
  const auto budget = in.budget();
  const auto cfg = in.config();
  std::optional<std::map<std::string, SubBudget>> subs;
  if (!sub_file.empty()) {
    in.digest_text += read_text(sub_file);
    const json j = read_json(sub_file);
    if (!j.is_object()) throw SchemaError("sub-budgets: expected an object keyed by workload");
    subs.emplace();
    for (const auto& [name, v] : j.items()) {
      if (!v.is_object() || !v.contains("power_mw") || !v.contains("area_mm2") || v.size() != 2)
        throw SchemaError("sub-budgets: '" + name + "' needs exactly power_mw and area_mm2");
      (*subs)[name] = {v["power_mw"].get<double>() * 1e-3, v["area_mm2"].get<double>()};
    }
  }
  const auto r = run_divide_conquer(w, db, budget, cfg, subs);
  write_stream(in.out("divide_conquer.csv"),
               [&](std::ostream& os) { write_divide_conquer_csv(os, r, in.info("divide-conquer", cfg.seed)); });
  std::cout << "myopic distance " << r.myopic.distance << ", holistic " << r.holistic.distance
            << "; power degradation " << r.power_degradation << ", area degradation " << r.area_degradation << "\n";
  return 0;
}

int cmd_validate(Inputs& in, double dt, std::size_t trials, std::uint64_t seed, std::size_t max_tasks,
                 std::size_t max_blocks) {
  const auto s = run_validation(trials, dt, seed, max_tasks, max_blocks);
  in.digest_text = "dt=" + std::to_string(dt) + " trials=" + std::to_string(trials) + " tasks=" +
                   std::to_string(max_tasks) + " blocks=" + std::to_string(max_blocks);
  write_stream(in.out("validation.csv"),
               [&](std::ostream& os) { write_validation_csv(os, s, in.info("validate", seed)); });
  std::cout << trials << " cases: max makespan error " << s.max_makespan_rel_error << ", max workload error "
            << s.max_rel_error << ", median speedup " << s.median_speedup << "x, " << s.total_wall_s << " s\n";
  return 0;
}

int cmd_report(Inputs& in, const std::string& trace_file, const std::string& design_file) {
  in.digest_text += read_text(trace_file);
  const auto trace = trace_from_json(read_json(trace_file));
  const RunInfo info = in.info("report", trace.seed);

  write_stream(in.out("convergence.csv"), [&](std::ostream& os) {
    os << provenance_line(info) << "\niteration,best_distance\n";
    for (const auto& [i, d] : convergence_curve(trace)) os << i << ',' << d << "\n";
  });

  json out = {{"run", stamp(info)}, {"iterations", trace.records.size()}};
  if (!trace.records.empty()) {
    const auto cr = analyze_codesign(trace);
    write_stream(in.out("codesign.csv"), [&](std::ostream& os) {
      os << provenance_line(info) << "\nvector,switches,deployment_rate,convergence_attribution\n";
      for (const auto& v : cr.vectors)
        os << v.vector << ',' << v.switches << ',' << v.deployment_rate << ',' << v.convergence_attribution << "\n";
    });
    out["convergence_rate"] = cr.convergence_rate;
  }

  if (!design_file.empty()) {
    if (in.workload_files.empty() || in.db_file.empty())
      throw InvalidSpecError("report --design also needs --workloads and --db");
    in.digest_text += read_text(design_file);
    const auto w = in.workloads();
    const auto db = in.db();
    const auto d = load_design(design_file);
    const auto r = simulate(d, w, db);
    const auto s = summarize(d, r);
    json mem = json::object();
    for (const auto& [id, a] : s.mem_area_mm2) mem[id] = a;
    out["design"] = {{"block_counts", s.block_counts},
                     {"total_blocks", s.total_blocks},
                     {"cv_pe_freq", s.cv_pe_freq},
                     {"cv_noc_freq", s.cv_noc_freq},
                     {"cv_noc_width", s.cv_noc_width},
                     {"cv_mem_freq", s.cv_mem_freq},
                     {"cv_mem_width", s.cv_mem_width},
                     {"mem_area_mm2", mem},
                     {"alp", s.alp},
                     {"bottleneck_share", s.bottleneck_share}};
  }
  write_json(in.out("report.json"), out);
  return 0;
}

int cmd_synth(Inputs& in, SynthSpec spec, const std::string& shape, const std::string& db_out) {
  spec.shape = parse_shape(shape);
  const auto g = synth_workload(spec);
  write_json(in.out(spec.name + ".json"), workload_to_json(g));
  if (!db_out.empty()) write_json(in.out(db_out), database_to_json(synth_database({g})));
  std::cout << spec.name << ": " << g.size() << " tasks\n";
  return 0;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("dse");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("DSE_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"SoC design-space exploration"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  Inputs in;

  auto* sim = app.add_subcommand("simulate", "Phase-simulate one design");
  std::string design_file;
  double oracle_dt = 0.0;
  bool phases = false;
  sim->add_option("--design,-d", design_file, "Design JSON")->required()->check(CLI::ExistingFile);
  add_workloads(sim, in);
  add_db(sim, in);
  sim->add_option("--oracle-dt", oracle_dt, "Also run the fixed-step oracle at this dt / makespan");
  sim->add_flag("--phases", phases, "Record the phase list in the result");
  sim->add_option("--out,-o", in.out_dir, "Output directory, or - for stdout");

  auto* exp = app.add_subcommand("explore", "Anneal towards a budget");
  std::string start_file, resume_file;
  std::size_t ckpt_every = 0;
  add_workloads(exp, in);
  add_db(exp, in);
  add_budget(exp, in);
  add_config(exp, in);
  add_out(exp, in);
  exp->add_option("--start", start_file, "Start from this design instead of the base design")
      ->check(CLI::ExistingFile);
  exp->add_option("--resume", resume_file, "Continue from a checkpoint")->check(CLI::ExistingFile);
  exp->add_option("--checkpoint-every", ckpt_every, "Write checkpoint.json every N iterations");

  auto* abl = app.add_subcommand("ablate", "Anneal at a reduced awareness level");
  std::string level = "sa";
  std::size_t seeds = 1;
  double target = 0.5;
  add_workloads(abl, in);
  add_db(abl, in);
  add_budget(abl, in);
  add_config(abl, in);
  add_out(abl, in);
  abl->add_option("--level", level, "Awareness level")
      ->check(CLI::IsMember({"sa", "task", "taskblock", "full"}))
      ->capture_default_str();
  abl->add_option("--seeds", seeds, "Run this many consecutive seeds and tabulate iterations to --target");
  abl->add_option("--target", target, "Distance threshold for --seeds")->capture_default_str();

  auto* swp = app.add_subcommand("sweep", "Per-workload budget sweep and combined Pareto front");
  double grid_pct = 5.0;
  std::size_t max_perm = 1'000'000;
  add_workloads(swp, in);
  add_db(swp, in);
  add_budget(swp, in);
  add_config(swp, in);
  add_out(swp, in);
  swp->add_option("--grid-pct", grid_pct, "Budget grid step in percent")->capture_default_str();
  swp->add_option("--max-permutations", max_perm)->capture_default_str();

  auto* dc = app.add_subcommand("divide-conquer", "Myopic per-workload runs against one holistic run");
  std::string sub_file;
  add_workloads(dc, in);
  add_db(dc, in);
  add_budget(dc, in);
  add_config(dc, in);
  add_out(dc, in);
  dc->add_option("--sub-budgets", sub_file, "JSON {workload: {power_mw, area_mm2}}; even split when absent")
      ->check(CLI::ExistingFile);

  auto* val = app.add_subcommand("validate", "Phase simulator against the fixed-step oracle");
  double dt = 1e-4;
  std::size_t trials = 100, max_tasks = 30, max_blocks = 20;
  std::uint64_t vseed = 1;
  add_out(val, in);
  val->add_option("--dt", dt, "Oracle step as a fraction of the makespan")->capture_default_str();
  val->add_option("--trials", trials)->capture_default_str();
  val->add_option("--seed", vseed)->capture_default_str();
  val->add_option("--max-tasks", max_tasks)->capture_default_str();
  val->add_option("--max-blocks", max_blocks)->capture_default_str();

  auto* rep = app.add_subcommand("report", "Convergence, co-design and design summaries");
  std::string trace_file, rep_design;
  add_out(rep, in);
  rep->add_option("--trace,-t", trace_file, "trace.json from explore")->required()->check(CLI::ExistingFile);
  rep->add_option("--design,-d", rep_design, "Design to summarize")->check(CLI::ExistingFile);
  rep->add_option("--workloads,-w", in.workload_files)->check(CLI::ExistingFile);
  rep->add_option("--db", in.db_file)->check(CLI::ExistingFile);

  auto* syn = app.add_subcommand("synth", "Generate a synthetic workload");
  SynthSpec spec;
  std::string shape = "chain", db_out;
  add_out(syn, in);
  syn->add_option("--name", spec.name)->capture_default_str();
  syn->add_option("--shape", shape)
      ->check(CLI::IsMember({"chain", "diamond", "fanout", "independent", "random"}))
      ->capture_default_str();
  syn->add_option("--tasks", spec.tasks)->capture_default_str();
  syn->add_option("--seed", spec.seed)->capture_default_str();
  syn->add_option("--edge-probability", spec.edge_probability)->capture_default_str();
  syn->add_option("--db-out", db_out, "Also write a matching database under this name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(in, design_file, oracle_dt, phases);
    if (*exp) return cmd_explore(in, start_file, resume_file, ckpt_every);
    if (*abl) return cmd_ablate(in, level, seeds, target);
    if (*swp) return cmd_sweep(in, grid_pct, max_perm);
    if (*dc) return cmd_divide_conquer(in, sub_file);
    if (*val) return cmd_validate(in, dt, trials, vseed, max_tasks, max_blocks);
    if (*rep) return cmd_report(in, trace_file, rep_design);
    if (*syn) return cmd_synth(in, spec, shape, db_out);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
