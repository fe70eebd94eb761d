#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dse/budget.hpp"
#include "dse/codesign.hpp"
#include "dse/drivers.hpp"
#include "dse/errors.hpp"
#include "dse/explorer.hpp"
#include "dse/io.hpp"
#include "dse/moves.hpp"
#include "dse/oracle.hpp"
#include "dse/report.hpp"
#include "fixtures.hpp"

using namespace dse;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

// Every simulation the suite runs reports here.
AnnealHooks tallying() {
  AnnealHooks h;
  h.on_simulate = [](const SimResult& r) { fx::tally(r); };
  return h;
}

// ---------------------------------------------------------------- 1, 2

ValidationSummary validation;
double validation_conservation = 0.0;

void run_validation_corpus() {
  validation = run_validation(100, 1e-4, 2024, 30, 20);
  for (const auto& r : validation.rows) validation_conservation = std::max(validation_conservation, r.conservation_error);
}

Verdict oracle_fidelity() {
  Verdict v;
  // Judged on design latency (the makespan that sets dt); per-workload error reported alongside.
  std::size_t workload_misses = 0;
  for (const auto& row : validation.rows) workload_misses += row.rel_error > 0.01 ? 1 : 0;
  v.pass = validation.rows.size() >= 100 && validation.max_makespan_rel_error <= 0.01 &&
           validation.total_wall_s <= 300.0;
  v.detail = std::to_string(validation.rows.size()) + " cases, max rel error " +
             num(validation.max_makespan_rel_error) + " (per-workload worst " + num(validation.max_rel_error) + ", " +
             std::to_string(workload_misses) + " cases over 1%), " + num(validation.total_wall_s, 3) + " s";
  return v;
}

Verdict oracle_speed() {
  Verdict v;
  v.pass = validation.median_speedup >= 100.0;
  v.detail = "median speedup " + num(validation.median_speedup, 5) + "x";
  return v;
}

// ---------------------------------------------------------------- 4

Verdict closed_forms() {
  auto db = fx::round_db();
  Rng rng(4);
  std::uniform_real_distribution<double> work(1e3, 1e8), inten(0.01, 100.0);
  auto ladder = [&](auto& values) { return values[std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng)]; };
  std::size_t checked = 0, wrong = 0;
  for (int i = 0; i < 500; ++i) {
    const double f = work(rng);
    const double ir = i % 5 == 0 ? 0.0 : inten(rng);
    const double iw = i % 7 == 0 ? 0.0 : inten(rng);
    const int pe = ladder(kFreqLadderMhz), noc = ladder(kFreqLadderMhz), mem = ladder(kFreqLadderMhz);
    const int nw = ladder(kBusWidthLadder), mw = ladder(kBusWidthLadder);
    WorkloadSet w{TaskGraph::build("w", {fx::task("T", f, ir, iw)}, {})};
    auto r = fx::sim(fx::single(w, pe, noc, nw, mem, mw), w, db);
    const double p = pe * 1e6;
    const double b = std::min(noc * 1e6 * nw, mem * 1e6 * mw);
    const double dr = ir > 0 ? f / ir : 0.0, dw = iw > 0 ? f / iw : 0.0;
    ++checked;
    if (!fx::same(r.makespan_s, std::max({f / p, dr / b, dw / b}))) ++wrong;
  }
  for (std::size_t n = 1; n <= 16; ++n) {
    for (int i = 0; i < 10; ++i) {
      const double f = work(rng);
      const int pe = ladder(kFreqLadderMhz);
      WorkloadSet w{fx::independent("w", n, f)};
      auto r = fx::sim(fx::single(w, pe), w, db);
      ++checked;
      if (!fx::same(r.makespan_s, static_cast<double>(n) * f / (pe * 1e6))) ++wrong;
    }
  }
  return {wrong == 0, std::to_string(checked - wrong) + "/" + std::to_string(checked) + " bit-exact"};
}

// ---------------------------------------------------------------- 5

bool same_metrics(const SimResult& a, const SimResult& b) {
  if (a.workload_latency_s.size() != b.workload_latency_s.size()) return false;
  for (const auto& [w, l] : a.workload_latency_s)
    if (!fx::same(l, b.workload_latency_s.at(w))) return false;
  return fx::same(a.power_w, b.power_w) && fx::same(a.area_mm2, b.area_mm2);
}

Verdict move_symmetry() {
  Rng rng(5);
  ExplorerConfig cfg;
  cfg.awareness = Awareness::Sa;  // every family, both swap directions
  std::size_t triples = 0, restored = 0, attempts = 0;
  std::array<std::size_t, kMoveTypeCount> by_type{};
  std::uint64_t seed = 0;
  while (triples < 1000 && attempts < 20000) {
    ++attempts;
    auto c = random_case(seed++, 12, 12);
    MoveContext ctx{c.workloads, c.db, cfg.bounds};
    SimResult before = fx::sim(c.design, c.workloads, c.db);
    // A handful of random selections per case.
    for (int s = 0; s < 4 && triples < 1000; ++s) {
      Selection sel;
      sel.metric = {MetricKind::Latency, c.workloads.front().name()};
      sel.task = before.tasks[std::uniform_int_distribution<std::size_t>(0, before.tasks.size() - 1)(rng)].key;
      std::vector<BlockId> ids;
      for (const auto& [id, _] : c.design.topology.blocks()) ids.push_back(id);
      sel.block = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
      MoveMenu menu = build_menu(sel, c.design, before, ctx, cfg);
      std::vector<std::pair<std::size_t, std::size_t>> all;
      for (std::size_t t = 0; t < kMoveTypeCount; ++t)
        for (std::size_t i = 0; i < menu.options[t].size(); ++i) all.emplace_back(t, i);
      if (all.empty()) continue;
      auto [t, i] = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
      const Move& m = menu.options[t][i];
      ++triples;
      ++by_type[t];
      try {
        DesignPoint moved = apply_move(c.design, m, ctx);
        fx::sim(moved, c.workloads, c.db);
        DesignPoint back = apply_move(moved, invert_move(m), ctx);
        SimResult after = fx::sim(back, c.workloads, c.db);
        if (back.same_hardware_and_mapping(c.design) && same_metrics(before, after)) ++restored;
      } catch (const Error&) {
      }
    }
  }
  std::string mix;
  for (std::size_t t = 0; t < kMoveTypeCount; ++t)
    mix += std::string(mix.empty() ? "" : " ") + to_string(static_cast<MoveType>(t)) + "=" + std::to_string(by_type[t]);
  return {triples >= 1000 && restored == triples,
          std::to_string(restored) + "/" + std::to_string(triples) + " restored (" + mix + ")"};
}

// ---------------------------------------------------------------- 6

struct SmallSpace {
  IpDatabase db = fx::round_db({"C"});
  WorkloadSet w{fx::diamond("d", 2e6, 4e4)};
  DesignBounds bounds;
  Budget budget;

  SmallSpace() {
    bounds.max_pes = 2;
    bounds.max_nocs = 1;
    bounds.max_mems = 1;
    bounds.max_unroll = 2;
    bounds.allow_sram = false;
    bounds.noc_freqs = {100, 200};
    bounds.noc_widths = {4, 8};
    bounds.mem_freqs = {100};
    bounds.mem_widths = {4, 8};
  }
};

Verdict exhaustive_optimality() {
  const auto t0 = Clock::now();
  SmallSpace s;
  auto designs = enumerate_space(s.w, s.db, s.bounds, 2000);
  std::vector<MetricValues> values;
  double best_latency = 1e300;
  std::vector<double> powers, areas;
  for (const auto& d : designs) {
    values.push_back(MetricValues::from(fx::sim(d, s.w, s.db)));
    best_latency = std::min(best_latency, values.back().latency_s.at("d"));
    powers.push_back(values.back().power_w);
    areas.push_back(values.back().area_mm2);
  }
  // Latency just out of reach, power and area at the space's medians: no
  // design meets everything, so the optimum is a strictly positive trade-off.
  s.budget.latency_s["d"] = best_latency * 0.9;
  s.budget.power_w = median(powers);
  s.budget.area_mm2 = median(areas);
  double optimum = 1e300;
  for (const auto& v : values) optimum = std::min(optimum, distance_to_budget(v, s.budget));

  ExplorerConfig cfg;
  cfg.bounds = s.bounds;
  cfg.max_iterations = 300;
  int good = 0;
  std::string ratios;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.seed = seed;
    auto r = anneal(s.w, s.db, s.budget, cfg, tallying());
    const double ratio = r.best_distance / optimum;
    if (r.best_distance <= 1.10 * optimum) ++good;
    ratios += (ratios.empty() ? "" : " ") + num(ratio, 3);
  }
  const double wall = seconds_since(t0);
  return {optimum > 0.0 && good >= 9 && wall <= 120.0,
          std::to_string(designs.size()) + " designs, optimum " + num(optimum) + ", " + std::to_string(good) +
              "/10 seeds within 1.10x (ratios " + ratios + "), " + num(wall, 3) + " s"};
}

// ---------------------------------------------------------------- 7

struct Ablation {
  WorkloadSet w;
  IpDatabase db;
  Budget budget;

  Ablation() {
    SynthSpec a, b, c;
    a.name = "alpha";
    a.shape = GraphShape::RandomDag;
    a.tasks = 8;
    a.seed = 71;
    b.name = "beta";
    b.shape = GraphShape::Diamond;
    b.tasks = 6;
    b.seed = 72;
    c.name = "gamma";
    c.shape = GraphShape::Chain;
    c.tasks = 5;
    c.seed = 73;
    w = {synth_workload(a), synth_workload(b), synth_workload(c)};
    db = synth_database(w);
    auto base = simulate(base_design(w, db), w, db);
    for (const auto& [name, lat] : base.workload_latency_s) budget.latency_s[name] = lat * 0.2;
    budget.power_w = base.power_w * 1.5;
    budget.area_mm2 = base.area_mm2 * 4.0;
  }
};

constexpr double kAblationTarget = 0.5;

std::size_t iterations_to_target(const Ablation& ab, Awareness level, std::uint64_t seed, std::size_t cap) {
  ExplorerConfig cfg;
  cfg.seed = seed;
  cfg.max_iterations = cap;
  cfg.stop_distance = kAblationTarget;
  auto r = naive_sa_baseline(ab.w, ab.db, ab.budget, cfg, level, tallying());
  if (r.best_distance > kAblationTarget && !r.met) return cap;  // censored at the cap
  for (const auto& rec : r.trace.records)
    if (rec.best_distance <= kAblationTarget) return rec.iteration + 1;
  return r.trace.records.size();
}

Verdict awareness_ablation() {
  const auto t0 = Clock::now();
  Ablation ab;
  const std::size_t cap = 2000;
  std::map<Awareness, std::vector<double>> iters;
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    for (Awareness a : {Awareness::Full, Awareness::Task, Awareness::Sa})
      iters[a].push_back(static_cast<double>(iterations_to_target(ab, a, seed, cap)));
  const double full = median(iters[Awareness::Full]);
  const double task = median(iters[Awareness::Task]);
  const double sa = median(iters[Awareness::Sa]);
  const double wall = seconds_since(t0);
  return {sa >= 3.0 * full && task >= full && task <= sa && wall <= 900.0,
          "median iterations to distance " + num(kAblationTarget) + ": full " + num(full) + ", task " + num(task) +
              ", sa " + num(sa) + " (cap " + std::to_string(cap) + "), " + num(wall, 3) + " s"};
}

// ---------------------------------------------------------------- 8

Verdict development_cost() {
  Ablation ab;
  // Latency at 0.05x of the base design: no single move meets the 1x budget.
  Budget tight = ab.budget;
  for (auto& [_, l] : tight.latency_s) l *= 0.25;
  std::vector<double> blocks1, blocks4, cv1, cv4;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (double relax : {1.0, 4.0}) {
      Budget b = tight;
      for (auto& [_, l] : b.latency_s) l *= relax;
      b.power_w *= relax;
      ExplorerConfig cfg;
      cfg.seed = seed;
      cfg.max_iterations = 400;
      auto r = anneal(ab.w, ab.db, b, cfg, tallying());
      auto sim = fx::sim(r.best, ab.w, ab.db);
      auto s = summarize(r.best, sim);
      (relax == 1.0 ? blocks1 : blocks4).push_back(static_cast<double>(s.total_blocks));
      (relax == 1.0 ? cv1 : cv4).push_back(s.cv_noc_freq);
    }
  }
  const double b1 = median(blocks1), b4 = median(blocks4), c1 = median(cv1), c4 = median(cv4);
  return {b4 <= b1 && c4 <= c1, "median blocks 1x " + num(b1) + " vs 4x " + num(b4) + ", median NoC-frequency CV 1x " +
                                    num(c1) + " vs 4x " + num(c4)};
}

// ---------------------------------------------------------------- 9

Verdict codesign_analytics() {
  auto rep = analyze_codesign(fx::scripted_trace());
  struct Expect {
    const char* vector;
    std::size_t switches;
    double attribution;
  };
  const Expect expect[] = {{"metric", 1, 0.10},
                           {"workload", 19, 0.10},
                           {"high_level", 4, 0.10},
                           {"low_level", 2, 0.06},
                           {"boundedness", 1, 0.15}};
  bool ok = rep.iterations == 20;
  std::string detail;
  for (const auto& e : expect) {
    const auto& v = rep.at(e.vector);
    ok = ok && v.switches == e.switches && v.deployment_rate == static_cast<double>(e.switches) / 19.0 &&
         std::abs(v.convergence_attribution - e.attribution) <= 1e-12;
    detail += std::string(detail.empty() ? "" : ", ") + e.vector + " " + std::to_string(v.switches) + "/19";
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 10

Verdict distance_metric() {
  bool ok = true;
  auto vals = [](double l, double p, double a) {
    MetricValues v;
    v.latency_s["w"] = l;
    v.power_w = p;
    v.area_mm2 = a;
    return v;
  };
  Budget b;
  b.latency_s["w"] = 10;
  b.power_w = 2;
  b.area_mm2 = 4;
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12; };
  ok = ok && close(distance_to_budget(vals(20, 3, 4), b), 1.5);
  ok = ok && distance_to_budget(vals(10, 2, 4), b) == 0.0;
  ok = ok && close(distance_to_budget(vals(5, 3, 4), b), 0.5 - 0.025);
  ok = ok && meets_budget(vals(10, 2, 4), b) && !meets_budget(vals(10.0001, 2, 4), b);
  const bool examples = ok;

  Rng rng(10);
  std::uniform_real_distribution<double> u(1e-3, 1e3), grow(0.0, 2.0), alpha(0.0, 1.0);
  std::size_t violations = 0;
  const std::size_t samples = 10000;
  for (std::size_t i = 0; i < samples; ++i) {
    Budget bb;
    bb.latency_s["w"] = u(rng);
    bb.latency_s["x"] = u(rng);
    bb.power_w = u(rng);
    bb.area_mm2 = u(rng);
    bb.alpha_met = alpha(rng);
    MetricValues v;
    v.latency_s["w"] = u(rng);
    v.latency_s["x"] = u(rng);
    v.power_w = u(rng);
    v.area_mm2 = u(rng);
    const double d0 = distance_to_budget(v, bb);
    MetricValues worse = v;
    switch (i % 4) {
      case 0: worse.latency_s["w"] *= 1.0 + grow(rng); break;
      case 1: worse.latency_s["x"] *= 1.0 + grow(rng); break;
      case 2: worse.power_w *= 1.0 + grow(rng); break;
      default: worse.area_mm2 *= 1.0 + grow(rng); break;
    }
    if (distance_to_budget(worse, bb) < d0) ++violations;
  }
  ok = ok && violations == 0;
  return {ok, std::string("examples ") + (examples ? "ok" : "wrong") + ", " + std::to_string(violations) +
                  " monotonicity violations in " + std::to_string(samples) + " samples"};
}

// ---------------------------------------------------------------- 11

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

std::string csv_header(const std::string& csv) {
  std::istringstream is(csv);
  std::string header;
  read_csv_rows(is, &header);
  return header;
}

Verdict format_stability() {
  const fs::path dir = fs::temp_directory_path() / "dse_acceptance";
  fs::create_directories(dir);
  std::size_t files = 0, stable = 0;
  auto check = [&](bool same) {
    ++files;
    if (same) ++stable;
  };

  // Shipped sample files: parse, write, parse again, compare.
  const fs::path data(DSE_DATA_DIR);
  for (const auto& e : fs::directory_iterator(data / "workloads")) {
    auto g = load_workload(e.path());
    write_json(dir / "w.json", workload_to_json(g));
    check(load_workload(dir / "w.json") == g);
  }
  auto db = load_database(data / "db.json");
  write_json(dir / "db.json", database_to_json(db));
  check(database_to_json(load_database(dir / "db.json")) == database_to_json(db));
  auto budget = load_budget(data / "budget.json");
  write_json(dir / "budget.json", budget_to_json(budget));
  auto b2 = load_budget(dir / "budget.json");
  bool budget_same = b2.latency_s.size() == budget.latency_s.size() && b2.alpha_met == budget.alpha_met &&
                     std::abs(b2.power_w - budget.power_w) <= 1e-15 * budget.power_w && b2.area_mm2 == budget.area_mm2;
  for (const auto& [w, l] : budget.latency_s) budget_same = budget_same && std::abs(b2.latency_s.at(w) - l) <= 1e-15 * l;
  check(budget_same);

  // Generated documents.
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto c = random_case(seed, 30, 20);
    for (const auto& g : c.workloads) check(workload_from_json(workload_to_json(g)) == g);
    check(database_to_json(database_from_json(database_to_json(c.db))) == database_to_json(c.db));
    check(design_from_json(design_to_json(c.design)).same_hardware_and_mapping(c.design));
  }

  const fs::path golden(DSE_GOLDEN_DIR);
  const RunInfo info{"0", 0, tool_version()};
  std::ostringstream t, p, v, d;
  write_trace_csv(t, fx::scripted_trace(), info);
  write_sweep_csv(p, SweepResult{}, info);
  write_validation_csv(v, ValidationSummary{}, info);
  write_divide_conquer_csv(d, DivideConquerResult{}, info);
  std::size_t schemas = 0;
  schemas += csv_header(t.str()) == first_line(golden / "trace.csv");
  schemas += csv_header(p.str()) == first_line(golden / "pareto.csv");
  schemas += csv_header(v.str()) == first_line(golden / "validation.csv");
  schemas += csv_header(d.str()) == first_line(golden / "divide_conquer.csv");

  return {stable == files && schemas == 4, std::to_string(stable) + "/" + std::to_string(files) +
                                               " documents round-trip, " + std::to_string(schemas) +
                                               "/4 CSV schemas match golden files"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only.push_back(std::atoi(argv[++i]));
  auto wanted = [&](int n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };

  const char* names[] = {"",
                         "oracle fidelity",
                         "oracle speed ratio",
                         "conservation",
                         "closed forms",
                         "move symmetry",
                         "exhaustive optimality",
                         "awareness ablation",
                         "development-cost policy",
                         "co-design analytics",
                         "distance metric",
                         "format stability"};
  std::map<int, std::function<Verdict()>> checks{{4, closed_forms},        {5, move_symmetry},
                                                 {6, exhaustive_optimality}, {7, awareness_ablation},
                                                 {8, development_cost},     {9, codesign_analytics},
                                                 {10, distance_metric},     {11, format_stability}};
  std::map<int, Verdict> verdicts;
  auto guarded = [](const std::function<Verdict()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Verdict{false, std::string("threw: ") + e.what()};
    }
  };

  if (wanted(1) || wanted(2) || wanted(3)) {
    try {
      run_validation_corpus();
      if (wanted(1)) verdicts[1] = oracle_fidelity();
      if (wanted(2)) verdicts[2] = oracle_speed();
    } catch (const std::exception& e) {
      verdicts[1] = verdicts[2] = {false, std::string("threw: ") + e.what()};
    }
  }
  for (auto& [n, f] : checks)
    if (wanted(n)) verdicts[n] = guarded(f);
  if (wanted(3)) {
    const double worst = std::max(fx::tally_max_error(), validation_conservation);
    verdicts[3] = {worst <= 1e-9 && fx::tally_count() > 0,
                   "max relative error " + num(worst) + " over " + std::to_string(fx::tally_count()) +
                       " simulations plus " + std::to_string(validation.rows.size() * 2) + " validation runs"};
  }

  int failed = 0;
  for (const auto& [n, v] : verdicts) {
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", n, names[n], v.detail.c_str());
    if (!v.pass) ++failed;
  }
  std::fflush(stdout);
  return failed ? 1 : 0;
}
