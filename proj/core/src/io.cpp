#include "dse/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "dse/errors.hpp"

#ifndef DSE_VERSION
#define DSE_VERSION "0.0.0"
#endif

namespace dse {

std::string tool_version() { return DSE_VERSION; }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << text;
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw SchemaError(where + ": unknown field '" + k + "'");
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

double num(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) throw SchemaError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? num(j, key, where) : fallback;
}

int integer(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) throw SchemaError(where + ": '" + key + "' must be an integer");
  return v.get<int>();
}

int integer_or(const json& j, const char* key, int fallback, const std::string& where) {
  return j.contains(key) ? integer(j, key, where) : fallback;
}

std::uint64_t uinteger(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_unsigned()) throw SchemaError(where + ": '" + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string str(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) throw SchemaError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

bool boolean(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_boolean()) throw SchemaError(where + ": '" + key + "' must be a boolean");
  return v.get<bool>();
}

const json& array(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_array()) throw SchemaError(where + ": '" + key + "' must be an array");
  return v;
}

std::vector<std::string> strings(const json& j, const char* key, const std::string& where) {
  std::vector<std::string> out;
  for (const auto& v : array(j, key, where)) {
    if (!v.is_string()) throw SchemaError(where + ": '" + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<int> ints(const json& j, const char* key, const std::string& where) {
  std::vector<int> out;
  for (const auto& v : array(j, key, where)) {
    if (!v.is_number_integer()) throw SchemaError(where + ": '" + key + "' must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

MemKind parse_mem_kind(const std::string& s, const std::string& where) {
  if (s == "DRAM") return MemKind::Dram;
  if (s == "SRAM") return MemKind::Sram;
  throw SchemaError(where + ": memory kind must be DRAM or SRAM, got '" + s + "'");
}

json key_to_json(const TaskKey& k) { return {{"workload", k.workload}, {"task", k.task}}; }

TaskKey key_from_json(const json& j, const std::string& where) {
  only_keys(j, {"workload", "task"}, where);
  return {str(j, "workload", where), str(j, "task", where)};
}

}  // namespace

// ---------------------------------------------------------------- workloads

TaskGraph workload_from_json(const json& j) {
  const std::string where = "workload";
  only_keys(j, {"name", "tasks", "edges"}, where);
  std::string name = str(j, "name", where);
  std::vector<Task> tasks;
  for (const auto& t : array(j, "tasks", where)) {
    const std::string w = where + " '" + name + "' task";
    only_keys(t, {"id", "f_ops", "i_read", "i_write", "llp", "burst"}, w);
    Task task;
    task.id = str(t, "id", w);
    task.f_ops = num(t, "f_ops", w);
    if (t.contains("i_read")) task.i_read = num(t, "i_read", w);
    if (t.contains("i_write")) task.i_write = num(t, "i_write", w);
    task.llp = num(t, "llp", w);
    task.burst = num_or(t, "burst", kDefaultBurstBytes, w);
    tasks.push_back(std::move(task));
  }
  std::vector<DataEdge> edges;
  if (j.contains("edges"))
    for (const auto& e : array(j, "edges", where)) {
      const std::string w = where + " '" + name + "' edge";
      only_keys(e, {"src", "dst", "bytes"}, w);
      edges.push_back({str(e, "src", w), str(e, "dst", w), num(e, "bytes", w)});
    }
  return TaskGraph::build(std::move(name), std::move(tasks), std::move(edges));
}

json workload_to_json(const TaskGraph& g) {
  json tasks = json::array();
  for (const auto& t : g.tasks()) {
    json o = {{"id", t.id}, {"f_ops", t.f_ops}};
    if (t.i_read) o["i_read"] = *t.i_read;
    if (t.i_write) o["i_write"] = *t.i_write;
    o["llp"] = t.llp;
    o["burst"] = t.burst;
    tasks.push_back(std::move(o));
  }
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({{"src", e.src}, {"dst", e.dst}, {"bytes", e.bytes}});
  return {{"name", g.name()}, {"tasks", std::move(tasks)}, {"edges", std::move(edges)}};
}

TaskGraph load_workload(const std::filesystem::path& path) { return workload_from_json(read_json(path)); }

// ---------------------------------------------------------------- database

IpDatabase database_from_json(const json& j) {
  const std::string where = "database";
  only_keys(j, {"gpp", "acc", "noc", "mem"}, where);
  std::vector<GppEntry> gpp;
  std::vector<AccEntry> acc;
  std::vector<NocEntry> noc;
  std::vector<MemEntry> mem;
  if (j.contains("gpp"))
    for (const auto& e : array(j, "gpp", where)) {
      only_keys(e, {"freq_mhz", "p_peak_ops_s", "e_op_j", "leak_w", "area_mm2"}, "gpp entry");
      gpp.push_back({integer(e, "freq_mhz", "gpp entry"), num(e, "p_peak_ops_s", "gpp entry"),
                     num(e, "e_op_j", "gpp entry"), num(e, "leak_w", "gpp entry"), num(e, "area_mm2", "gpp entry")});
    }
  if (j.contains("acc"))
    for (const auto& e : array(j, "acc", where)) {
      only_keys(e, {"task", "unroll", "a_peak", "e_op_j", "leak_w", "area_mm2"}, "acc entry");
      acc.push_back({str(e, "task", "acc entry"), integer(e, "unroll", "acc entry"), num(e, "a_peak", "acc entry"),
                     num(e, "e_op_j", "acc entry"), num(e, "leak_w", "acc entry"), num(e, "area_mm2", "acc entry")});
    }
  if (j.contains("noc"))
    for (const auto& e : array(j, "noc", where)) {
      only_keys(e, {"freq_mhz", "width_b", "e_byte_j", "leak_w", "area_mm2"}, "noc entry");
      noc.push_back({integer(e, "freq_mhz", "noc entry"), integer(e, "width_b", "noc entry"),
                     num(e, "e_byte_j", "noc entry"), num(e, "leak_w", "noc entry"), num(e, "area_mm2", "noc entry")});
    }
  if (j.contains("mem"))
    for (const auto& e : array(j, "mem", where)) {
      only_keys(e, {"kind", "freq_mhz", "width_b", "e_byte_j", "leak_w", "area_mm2"}, "mem entry");
      mem.push_back({parse_mem_kind(str(e, "kind", "mem entry"), "mem entry"), integer(e, "freq_mhz", "mem entry"),
                     integer(e, "width_b", "mem entry"), num(e, "e_byte_j", "mem entry"), num(e, "leak_w", "mem entry"),
                     num(e, "area_mm2", "mem entry")});
    }
  try {
    return IpDatabase(std::move(gpp), std::move(acc), std::move(noc), std::move(mem));
  } catch (const InvalidSpecError& e) {
    throw SchemaError(std::string("database: ") + e.what());
  }
}

json database_to_json(const IpDatabase& db) {
  json gpp = json::array(), acc = json::array(), noc = json::array(), mem = json::array();
  for (const auto& e : db.gpp())
    gpp.push_back({{"freq_mhz", e.freq_mhz}, {"p_peak_ops_s", e.p_peak_ops_s}, {"e_op_j", e.e_op_j},
                   {"leak_w", e.leak_w}, {"area_mm2", e.area_mm2}});
  for (const auto& e : db.acc())
    acc.push_back({{"task", e.task}, {"unroll", e.unroll}, {"a_peak", e.a_peak}, {"e_op_j", e.e_op_j},
                   {"leak_w", e.leak_w}, {"area_mm2", e.area_mm2}});
  for (const auto& e : db.noc())
    noc.push_back({{"freq_mhz", e.freq_mhz}, {"width_b", e.width_b}, {"e_byte_j", e.e_byte_j}, {"leak_w", e.leak_w},
                   {"area_mm2", e.area_mm2}});
  for (const auto& e : db.mem())
    mem.push_back({{"kind", to_string(e.kind)}, {"freq_mhz", e.freq_mhz}, {"width_b", e.width_b},
                   {"e_byte_j", e.e_byte_j}, {"leak_w", e.leak_w}, {"area_mm2", e.area_mm2}});
  return {{"gpp", gpp}, {"acc", acc}, {"noc", noc}, {"mem", mem}};
}

IpDatabase load_database(const std::filesystem::path& path) { return database_from_json(read_json(path)); }

// ---------------------------------------------------------------- budget

Budget budget_from_json(const json& j) {
  const std::string where = "budget";
  only_keys(j, {"workloads", "power_mw", "area_mm2", "alpha_met"}, where);
  Budget b;
  const json& wl = field(j, "workloads", where);
  if (!wl.is_object()) throw SchemaError(where + ": 'workloads' must map names to latencies in ms");
  for (const auto& [name, ms] : wl.items()) {
    if (!ms.is_number()) throw SchemaError(where + ": latency of '" + name + "' must be a number");
    b.latency_s[name] = ms.get<double>() / 1000.0;
  }
  b.power_w = num(j, "power_mw", where) / 1000.0;
  b.area_mm2 = num(j, "area_mm2", where);
  b.alpha_met = num_or(j, "alpha_met", kDefaultAlphaMet, where);
  try {
    b.validate();
  } catch (const InvalidSpecError& e) {
    throw SchemaError(std::string("budget: ") + e.what());
  }
  return b;
}

json budget_to_json(const Budget& b) {
  json wl = json::object();
  for (const auto& [name, s] : b.latency_s) wl[name] = s * 1000.0;
  return {{"workloads", wl}, {"power_mw", b.power_w * 1000.0}, {"area_mm2", b.area_mm2}, {"alpha_met", b.alpha_met}};
}

Budget load_budget(const std::filesystem::path& path) { return budget_from_json(read_json(path)); }

// ---------------------------------------------------------------- design

DesignPoint design_from_json(const json& j) {
  const std::string where = "design";
  only_keys(j, {"blocks", "connections", "mapping", "provenance"}, where);
  DesignPoint d;
  for (const auto& b : array(j, "blocks", where)) {
    only_keys(b, {"id", "kind", "freq_mhz", "bus_width_b", "links", "unroll"}, "design block");
    HardwareBlock hb;
    hb.id = str(b, "id", "design block");
    hb.kind = parse_block_kind(str(b, "kind", "design block"));
    hb.freq_mhz = integer(b, "freq_mhz", "design block");
    hb.bus_width_b = integer_or(b, "bus_width_b", 0, "design block");
    hb.links = integer_or(b, "links", 1, "design block");
    hb.unroll = integer_or(b, "unroll", 1, "design block");
    if (d.topology.has(hb.id)) throw SchemaError("design: duplicate block id '" + hb.id + "'");
    d.topology.add(hb);
  }
  for (const auto& c : array(j, "connections", where)) {
    if (!c.is_array() || c.size() != 2 || !c[0].is_string() || !c[1].is_string())
      throw SchemaError("design: each connection is a pair of block ids");
    const auto a = c[0].get<std::string>(), b = c[1].get<std::string>();
    if (!d.topology.has(a) || !d.topology.has(b))
      throw SchemaError("design: connection " + a + "-" + b + " names an unknown block");
    d.topology.connect(a, b);
  }
  for (const auto& m : array(j, "mapping", where)) {
    only_keys(m, {"workload", "task", "pe", "mem"}, "design mapping");
    TaskKey k{str(m, "workload", "design mapping"), str(m, "task", "design mapping")};
    if (d.mapping.task_to_pe.count(k)) throw SchemaError("design: task " + to_string(k) + " mapped twice");
    d.mapping.task_to_pe[k] = str(m, "pe", "design mapping");
    d.mapping.task_to_mem[k] = str(m, "mem", "design mapping");
  }
  if (j.contains("provenance")) d.provenance = strings(j, "provenance", where);
  return d;
}

json design_to_json(const DesignPoint& d) {
  json blocks = json::array();
  for (const auto& [id, b] : d.topology.blocks()) {
    json o = {{"id", id}, {"kind", to_string(b.kind)}, {"freq_mhz", b.freq_mhz}};
    if (!is_pe(b.kind)) o["bus_width_b"] = b.bus_width_b;
    if (is_noc(b.kind)) o["links"] = b.links;
    if (is_pe(b.kind)) o["unroll"] = b.unroll;
    blocks.push_back(std::move(o));
  }
  json conns = json::array();
  for (const auto& [a, b] : d.topology.links()) conns.push_back({a, b});
  json mapping = json::array();
  for (const auto& [k, pe] : d.mapping.task_to_pe) {
    auto mem = d.mapping.task_to_mem.find(k);
    mapping.push_back({{"workload", k.workload},
                       {"task", k.task},
                       {"pe", pe},
                       {"mem", mem == d.mapping.task_to_mem.end() ? "" : mem->second}});
  }
  json out = {{"blocks", blocks}, {"connections", conns}, {"mapping", mapping}};
  if (!d.provenance.empty()) out["provenance"] = d.provenance;
  return out;
}

DesignPoint load_design(const std::filesystem::path& path) { return design_from_json(read_json(path)); }

// ---------------------------------------------------------------- explorer config

ExplorerConfig config_from_json(const json& j) {
  const std::string where = "explorer config";
  only_keys(j,
            {"neighbors", "max_iterations", "t0", "t0_factor", "cooling", "epsilon", "seed", "weights", "awareness",
             "bounds", "locality_hops", "stop_on_budget", "stop_distance", "threads", "checkpoint_every"},
            where);
  ExplorerConfig c;
  if (j.contains("neighbors")) c.neighbors = uinteger(j, "neighbors", where);
  if (j.contains("max_iterations")) c.max_iterations = uinteger(j, "max_iterations", where);
  c.t0 = num_or(j, "t0", c.t0, where);
  c.t0_factor = num_or(j, "t0_factor", c.t0_factor, where);
  c.cooling = num_or(j, "cooling", c.cooling, where);
  c.epsilon = num_or(j, "epsilon", c.epsilon, where);
  if (j.contains("seed")) c.seed = uinteger(j, "seed", where);
  if (j.contains("weights")) {
    const json& w = j["weights"];
    only_keys(w, {"join", "migrate", "fork", "swap", "fork_swap"}, where + " weights");
    for (const auto& [k, v] : w.items()) {
      if (!v.is_number()) throw SchemaError(where + ": weight '" + k + "' must be a number");
      c.weights[static_cast<std::size_t>(parse_move_type(k))] = v.get<double>();
    }
  }
  if (j.contains("awareness")) c.awareness = parse_awareness(str(j, "awareness", where));
  if (j.contains("bounds")) {
    const json& b = j["bounds"];
    const std::string bw = where + " bounds";
    only_keys(b,
              {"max_pes", "max_nocs", "max_mems", "max_blocks", "pe_freqs", "noc_freqs", "noc_widths", "mem_freqs",
               "mem_widths", "allow_acc", "allow_sram", "max_unroll"},
              bw);
    if (b.contains("max_pes")) c.bounds.max_pes = uinteger(b, "max_pes", bw);
    if (b.contains("max_nocs")) c.bounds.max_nocs = uinteger(b, "max_nocs", bw);
    if (b.contains("max_mems")) c.bounds.max_mems = uinteger(b, "max_mems", bw);
    if (b.contains("max_blocks")) c.bounds.max_blocks = uinteger(b, "max_blocks", bw);
    if (b.contains("pe_freqs")) c.bounds.pe_freqs = ints(b, "pe_freqs", bw);
    if (b.contains("noc_freqs")) c.bounds.noc_freqs = ints(b, "noc_freqs", bw);
    if (b.contains("noc_widths")) c.bounds.noc_widths = ints(b, "noc_widths", bw);
    if (b.contains("mem_freqs")) c.bounds.mem_freqs = ints(b, "mem_freqs", bw);
    if (b.contains("mem_widths")) c.bounds.mem_widths = ints(b, "mem_widths", bw);
    if (b.contains("allow_acc")) c.bounds.allow_acc = boolean(b, "allow_acc", bw);
    if (b.contains("allow_sram")) c.bounds.allow_sram = boolean(b, "allow_sram", bw);
    if (b.contains("max_unroll")) c.bounds.max_unroll = integer(b, "max_unroll", bw);
  }
  if (j.contains("locality_hops")) c.locality_hops = uinteger(j, "locality_hops", where);
  if (j.contains("stop_on_budget")) c.stop_on_budget = boolean(j, "stop_on_budget", where);
  if (j.contains("stop_distance")) c.stop_distance = num(j, "stop_distance", where);
  if (j.contains("threads")) c.threads = uinteger(j, "threads", where);
  if (j.contains("checkpoint_every")) c.checkpoint_every = uinteger(j, "checkpoint_every", where);
  try {
    c.validate();
  } catch (const InvalidSpecError& e) {
    throw SchemaError(std::string("explorer config: ") + e.what());
  }
  return c;
}

json config_to_json(const ExplorerConfig& c) {
  json w = json::object();
  for (std::size_t i = 0; i < kMoveTypeCount; ++i) w[to_string(static_cast<MoveType>(i))] = c.weights[i];
  const auto& b = c.bounds;
  json out = {{"neighbors", c.neighbors},
              {"max_iterations", c.max_iterations},
              {"t0", c.t0},
              {"t0_factor", c.t0_factor},
              {"cooling", c.cooling},
              {"epsilon", c.epsilon},
              {"seed", c.seed},
              {"weights", w},
              {"awareness", to_string(c.awareness)},
              {"bounds",
               {{"max_pes", b.max_pes},
                {"max_nocs", b.max_nocs},
                {"max_mems", b.max_mems},
                {"max_blocks", b.max_blocks},
                {"pe_freqs", b.pe_freqs},
                {"noc_freqs", b.noc_freqs},
                {"noc_widths", b.noc_widths},
                {"mem_freqs", b.mem_freqs},
                {"mem_widths", b.mem_widths},
                {"allow_acc", b.allow_acc},
                {"allow_sram", b.allow_sram},
                {"max_unroll", b.max_unroll}}},
              {"locality_hops", c.locality_hops},
              {"stop_on_budget", c.stop_on_budget},
              {"threads", c.threads},
              {"checkpoint_every", c.checkpoint_every}};
  if (c.stop_distance) out["stop_distance"] = *c.stop_distance;
  return out;
}

// ---------------------------------------------------------------- results

json result_to_json(const SimResult& r) {
  json phases = json::array();
  for (const auto& p : r.phases) {
    json running = json::array();
    for (const auto& k : p.running) running.push_back(to_string(k));
    phases.push_back({{"index", p.index},
                      {"start_s", p.start_s},
                      {"duration_s", p.duration_s},
                      {"running", running},
                      {"bottleneck", p.bottleneck},
                      {"active_pes", p.active_pes}});
  }
  json hist = json::object();
  for (const auto& [k, s] : r.bottleneck_histogram) hist[to_string(k)] = s;
  json blocks = json::object();
  for (const auto& [id, a] : r.block_area_mm2) {
    auto get = [&](const std::map<BlockId, double>& m) {
      auto it = m.find(id);
      return it == m.end() ? 0.0 : it->second;
    };
    blocks[id] = {{"busy_s", get(r.block_busy_s)},
                  {"energy_j", get(r.block_energy_j)},
                  {"area_mm2", a},
                  {"bottleneck_s", get(r.block_bottleneck_s)}};
  }
  json tasks = json::array();
  for (const auto& t : r.tasks)
    tasks.push_back({{"task", to_string(t.key)},
                     {"pe", t.pe},
                     {"start_s", t.start_s},
                     {"finish_s", t.finish_s},
                     {"bottleneck", t.dominant_bottleneck()}});
  return {{"workload_latencies_s", r.workload_latency_s},
          {"makespan_s", r.makespan_s},
          {"power_w", r.power_w},
          {"area_mm2", r.area_mm2},
          {"energy_j", r.energy_j},
          {"dynamic_energy_j", r.dynamic_energy_j},
          {"phase_count", r.phase_count},
          {"phases", phases},
          {"bottleneck_histogram", hist},
          {"blocks", blocks},
          {"tasks", tasks}};
}

// ---------------------------------------------------------------- moves and traces

namespace {

Knob parse_knob(const std::string& s) {
  for (Knob k : {Knob::Freq, Knob::BusWidth, Knob::Subtype, Knob::Unroll})
    if (s == to_string(k)) return k;
  throw SchemaError("unknown knob '" + s + "'");
}

Direction parse_direction(const std::string& s) {
  if (s == "up") return Direction::Up;
  if (s == "down") return Direction::Down;
  throw SchemaError("unknown direction '" + s + "'");
}

json keys_json(const std::vector<TaskKey>& ks) {
  json a = json::array();
  for (const auto& k : ks) a.push_back(key_to_json(k));
  return a;
}

std::vector<TaskKey> keys_from(const json& j, const char* key, const std::string& where) {
  std::vector<TaskKey> out;
  for (const auto& v : array(j, key, where)) out.push_back(key_from_json(v, where));
  return out;
}

json swap_json(const SwapMove& s) {
  return {{"type", "swap"}, {"block", s.block}, {"knob", to_string(s.knob)}, {"direction", to_string(s.direction)}};
}
json fork_json(const ForkMove& f) {
  return {{"type", "fork"},          {"block", f.block},   {"clone", f.clone}, {"tasks", keys_json(f.tasks)},
          {"clone_links", f.clone_links}, {"detach", f.detach}};
}
json join_json(const JoinMove& j) {
  return {{"type", "join"},
          {"survivor", j.survivor},
          {"absorbed", j.absorbed},
          {"tasks", keys_json(j.tasks)},
          {"absorbed_links", j.absorbed_links},
          {"added_links", j.added_links}};
}

SwapMove swap_from(const json& j) {
  only_keys(j, {"type", "block", "knob", "direction"}, "swap move");
  return {str(j, "block", "swap move"), parse_knob(str(j, "knob", "swap move")),
          parse_direction(str(j, "direction", "swap move"))};
}
ForkMove fork_from(const json& j) {
  const std::string w = "fork move";
  only_keys(j, {"type", "block", "clone", "tasks", "clone_links", "detach"}, w);
  return {str(j, "block", w), str(j, "clone", w), keys_from(j, "tasks", w), strings(j, "clone_links", w),
          strings(j, "detach", w)};
}
JoinMove join_from(const json& j) {
  const std::string w = "join move";
  only_keys(j, {"type", "survivor", "absorbed", "tasks", "absorbed_links", "added_links"}, w);
  return {str(j, "survivor", w), str(j, "absorbed", w), keys_from(j, "tasks", w), strings(j, "absorbed_links", w),
          strings(j, "added_links", w)};
}

}  // namespace

json move_to_json(const Move& m) {
  struct V {
    json operator()(const SwapMove& s) const { return swap_json(s); }
    json operator()(const ForkMove& f) const { return fork_json(f); }
    json operator()(const JoinMove& j) const { return join_json(j); }
    json operator()(const MigrateMove& g) const {
      return {{"type", "migrate"}, {"task", key_to_json(g.task)}, {"src", g.src}, {"dst", g.dst}};
    }
    json operator()(const ForkSwapMove& fs) const {
      return {{"type", "fork_swap"}, {"fork", fork_json(fs.fork)}, {"swap", swap_json(fs.swap)}};
    }
    json operator()(const SwapJoinMove& sj) const {
      return {{"type", "swap_join"}, {"swap", swap_json(sj.swap)}, {"join", join_json(sj.join)}};
    }
  };
  return std::visit(V{}, m);
}

Move move_from_json(const json& j) {
  const std::string type = str(j, "type", "move");
  if (type == "swap") return swap_from(j);
  if (type == "fork") return fork_from(j);
  if (type == "join") return join_from(j);
  if (type == "migrate") {
    only_keys(j, {"type", "task", "src", "dst"}, "migrate move");
    return MigrateMove{key_from_json(field(j, "task", "migrate move"), "migrate move"), str(j, "src", "migrate move"),
                       str(j, "dst", "migrate move")};
  }
  if (type == "fork_swap") {
    only_keys(j, {"type", "fork", "swap"}, "fork_swap move");
    return ForkSwapMove{fork_from(field(j, "fork", "fork_swap move")), swap_from(field(j, "swap", "fork_swap move"))};
  }
  if (type == "swap_join") {
    only_keys(j, {"type", "swap", "join"}, "swap_join move");
    return SwapJoinMove{swap_from(field(j, "swap", "swap_join move")), join_from(field(j, "join", "swap_join move"))};
  }
  throw SchemaError("unknown move type '" + type + "'");
}

namespace {

json metric_json(const Metric& m) { return {{"kind", to_string(m.kind)}, {"workload", m.workload}}; }

Metric metric_from(const json& j) {
  only_keys(j, {"kind", "workload"}, "metric");
  Metric m;
  const std::string k = str(j, "kind", "metric");
  if (k == "latency") m.kind = MetricKind::Latency;
  else if (k == "power") m.kind = MetricKind::Power;
  else if (k == "area") m.kind = MetricKind::Area;
  else throw SchemaError("unknown metric '" + k + "'");
  m.workload = str(j, "workload", "metric");
  return m;
}

json record_json(const IterationRecord& r) {
  json cands = json::array();
  for (MoveType t : r.candidates) cands.push_back(to_string(t));
  json o = {{"iteration", r.iteration},
            {"metric", metric_json(r.metric)},
            {"workload", r.workload},
            {"block", r.block},
            {"k", r.k},
            {"candidates", cands},
            {"used_heuristic", r.used_heuristic},
            {"candidate_distances", r.candidate_distances},
            {"accepted_distance", r.accepted_distance},
            {"best_distance", r.best_distance},
            {"temperature", r.temperature},
            {"accepted", r.accepted},
            {"improved", r.improved},
            {"boundedness", to_string(r.boundedness)},
            {"high_level", r.high_level},
            {"low_level", r.low_level}};
  if (r.task) o["task"] = key_to_json(*r.task);
  if (r.move) o["move"] = move_to_json(*r.move);
  return o;
}

IterationRecord record_from(const json& j) {
  const std::string w = "trace record";
  only_keys(j,
            {"iteration", "metric", "workload", "task", "block", "k", "move", "candidates", "used_heuristic",
             "candidate_distances", "accepted_distance", "best_distance", "temperature", "accepted", "improved",
             "boundedness", "high_level", "low_level"},
            w);
  IterationRecord r;
  r.iteration = uinteger(j, "iteration", w);
  r.metric = metric_from(field(j, "metric", w));
  r.workload = str(j, "workload", w);
  if (j.contains("task")) r.task = key_from_json(j["task"], w);
  r.block = str(j, "block", w);
  r.k = uinteger(j, "k", w);
  if (j.contains("move")) r.move = move_from_json(j["move"]);
  for (const auto& s : strings(j, "candidates", w)) r.candidates.push_back(parse_move_type(s));
  r.used_heuristic = boolean(j, "used_heuristic", w);
  for (const auto& v : array(j, "candidate_distances", w)) {
    if (!v.is_number()) throw SchemaError(w + ": candidate distances must be numbers");
    r.candidate_distances.push_back(v.get<double>());
  }
  r.accepted_distance = num(j, "accepted_distance", w);
  r.best_distance = num(j, "best_distance", w);
  r.temperature = num(j, "temperature", w);
  r.accepted = boolean(j, "accepted", w);
  r.improved = boolean(j, "improved", w);
  const std::string b = str(j, "boundedness", w);
  if (b == "computation") r.boundedness = Boundedness::Computation;
  else if (b == "communication") r.boundedness = Boundedness::Communication;
  else throw SchemaError(w + ": unknown boundedness '" + b + "'");
  r.high_level = str(j, "high_level", w);
  r.low_level = str(j, "low_level", w);
  return r;
}

}  // namespace

json trace_to_json(const ExplorationTrace& t) {
  json recs = json::array();
  for (const auto& r : t.records) recs.push_back(record_json(r));
  return {{"seed", t.seed},
          {"awareness", to_string(t.awareness)},
          {"initial_distance", t.initial_distance},
          {"records", recs}};
}

ExplorationTrace trace_from_json(const json& j) {
  const std::string w = "trace";
  only_keys(j, {"seed", "awareness", "initial_distance", "records", "info"}, w);
  ExplorationTrace t;
  t.seed = uinteger(j, "seed", w);
  t.awareness = parse_awareness(str(j, "awareness", w));
  t.initial_distance = num(j, "initial_distance", w);
  for (const auto& r : array(j, "records", w)) t.records.push_back(record_from(r));
  return t;
}

json checkpoint_to_json(const AnnealState& s) {
  return {{"version", tool_version()},
          {"next_iteration", s.next_iteration},
          {"rng_state", s.rng_state},
          {"temperature", s.temperature},
          {"k", s.k},
          {"current", design_to_json(s.current)},
          {"current_distance", s.current_distance},
          {"best", design_to_json(s.best)},
          {"best_distance", s.best_distance},
          {"best_met", s.best_met},
          {"trace", trace_to_json(s.trace)}};
}

AnnealState checkpoint_from_json(const json& j) {
  const std::string w = "checkpoint";
  only_keys(j,
            {"version", "next_iteration", "rng_state", "temperature", "k", "current", "current_distance", "best",
             "best_distance", "best_met", "trace"},
            w);
  AnnealState s;
  s.next_iteration = uinteger(j, "next_iteration", w);
  s.rng_state = str(j, "rng_state", w);
  s.temperature = num(j, "temperature", w);
  s.k = uinteger(j, "k", w);
  s.current = design_from_json(field(j, "current", w));
  s.current_distance = num(j, "current_distance", w);
  s.best = design_from_json(field(j, "best", w));
  s.best_distance = num(j, "best_distance", w);
  s.best_met = boolean(j, "best_met", w);
  s.trace = trace_from_json(field(j, "trace", w));
  return s;
}

// ---------------------------------------------------------------- CSV

const char* const kTraceCsvHeader =
    "iteration,metric,workload,task,block,k,move_type,move,used_heuristic,candidates,candidate_distances,"
    "accepted_distance,best_distance,temperature,accepted,improved,boundedness,high_level,low_level";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string provenance_line(const RunInfo& info) {
  return "# spec_hash=" + info.spec_hash + " seed=" + std::to_string(info.seed) + " version=" + info.version;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void write_trace_csv(std::ostream& os, const ExplorationTrace& trace, const RunInfo& info) {
  os << provenance_line(info) << "\n" << kTraceCsvHeader << "\n";
  for (const auto& r : trace.records) {
    std::string cands, dists;
    for (MoveType t : r.candidates) cands += (cands.empty() ? "" : ";") + std::string(to_string(t));
    for (double d : r.candidate_distances) dists += (dists.empty() ? "" : ";") + fmt(d);
    os << r.iteration << ',' << csv_field(r.metric.label()) << ',' << csv_field(r.workload) << ','
       << csv_field(r.task ? to_string(*r.task) : "") << ',' << csv_field(r.block) << ',' << r.k << ','
       << (r.move ? to_string(move_type(*r.move)) : "") << ',' << csv_field(r.move ? describe(*r.move) : "") << ','
       << (r.used_heuristic ? 1 : 0) << ',' << cands << ',' << dists << ',' << fmt(r.accepted_distance) << ','
       << fmt(r.best_distance) << ',' << fmt(r.temperature) << ',' << (r.accepted ? 1 : 0) << ','
       << (r.improved ? 1 : 0) << ',' << to_string(r.boundedness) << ',' << r.high_level << ',' << r.low_level
       << "\n";
  }
}

std::vector<std::vector<std::string>> read_csv_rows(std::istream& is, std::string* header, std::string* provenance) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (provenance) *provenance = line;
      continue;
    }
    if (!have_header) {
      have_header = true;
      if (header) *header = line;
      continue;
    }
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(std::move(cur));
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace dse
