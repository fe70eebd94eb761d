#include "dse/workload.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "dse/errors.hpp"

namespace dse {

namespace {

void check_task(const Task& t) {
  if (t.id.empty()) throw SchemaError("task with empty id");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(t.f_ops) || t.f_ops < 0.0) throw SchemaError("task '" + t.id + "': f_ops must be >= 0");
  if (t.i_read && !(finite(*t.i_read) && *t.i_read > 0.0))
    throw SchemaError("task '" + t.id + "': i_read must be > 0");
  if (t.i_write && !(finite(*t.i_write) && *t.i_write > 0.0))
    throw SchemaError("task '" + t.id + "': i_write must be > 0");
  if (!finite(t.llp) || t.llp < 1.0) throw SchemaError("task '" + t.id + "': llp must be >= 1");
  if (!finite(t.burst) || t.burst <= 0.0) throw SchemaError("task '" + t.id + "': burst must be > 0");
}

}  // namespace

TaskGraph TaskGraph::build(std::string name, std::vector<Task> tasks, std::vector<DataEdge> edges) {
  if (name.empty()) throw SchemaError("workload name must not be empty");
  TaskGraph g;
  g.name_ = std::move(name);
  g.tasks_ = std::move(tasks);
  g.edges_ = std::move(edges);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.tasks_.size(); ++i) {
    check_task(g.tasks_[i]);
    if (!index.emplace(g.tasks_[i].id, i).second)
      throw SchemaError("duplicate task id '" + g.tasks_[i].id + "'");
  }

  const std::size_t n = g.tasks_.size();
  g.in_edges_.assign(n, {});
  g.out_edges_.assign(n, {});
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    const auto& edge = g.edges_[e];
    auto s = index.find(edge.src);
    auto d = index.find(edge.dst);
    if (s == index.end() || d == index.end())
      throw DanglingEdgeError("edge " + edge.src + "->" + edge.dst + " names an unknown task");
    if (edge.src == edge.dst) throw CycleError("self-loop on task '" + edge.src + "'");
    if (!std::isfinite(edge.bytes) || edge.bytes < 0.0)
      throw SchemaError("edge " + edge.src + "->" + edge.dst + ": bytes must be >= 0");
    if (!seen.emplace(edge.src, edge.dst).second)
      throw SchemaError("duplicate edge " + edge.src + "->" + edge.dst);
    g.edge_ends_.emplace_back(s->second, d->second);
    g.out_edges_[s->second].push_back(e);
    g.in_edges_[d->second].push_back(e);
  }

  // Kahn's algorithm; the ready set is ordered by task id so the order is canonical.
  std::vector<std::size_t> indegree(n);
  for (std::size_t i = 0; i < n; ++i) indegree[i] = g.in_edges_[i].size();
  auto by_id = [&g](std::size_t a, std::size_t b) { return g.tasks_[a].id > g.tasks_[b].id; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_id)> ready(by_id);
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  while (!ready.empty()) {
    std::size_t t = ready.top();
    ready.pop();
    g.topo_.push_back(t);
    for (std::size_t e : g.out_edges_[t]) {
      std::size_t d = index.at(g.edges_[e].dst);
      if (--indegree[d] == 0) ready.push(d);
    }
  }
  if (g.topo_.size() != n) throw CycleError("workload '" + g.name_ + "' has a dependency cycle");

  g.reach_.assign(n * n, 0);
  for (auto it = g.topo_.rbegin(); it != g.topo_.rend(); ++it) {
    std::size_t t = *it;
    for (std::size_t e : g.out_edges_[t]) {
      std::size_t d = index.at(g.edges_[e].dst);
      g.reach_[t * n + d] = 1;
      for (std::size_t k = 0; k < n; ++k)
        if (g.reach_[d * n + k]) g.reach_[t * n + k] = 1;
    }
  }
  return g;
}

std::size_t TaskGraph::index_of(const std::string& task_id) const {
  for (std::size_t i = 0; i < tasks_.size(); ++i)
    if (tasks_[i].id == task_id) return i;
  throw SchemaError("workload '" + name_ + "' has no task '" + task_id + "'");
}

bool TaskGraph::contains(const std::string& task_id) const {
  return std::any_of(tasks_.begin(), tasks_.end(), [&](const Task& t) { return t.id == task_id; });
}

std::vector<std::size_t> TaskGraph::predecessors(std::size_t task) const {
  std::vector<std::size_t> out;
  for (std::size_t e : in_edges_[task]) out.push_back(edge_src(e));
  return out;
}

std::vector<std::size_t> TaskGraph::successors(std::size_t task) const {
  std::vector<std::size_t> out;
  for (std::size_t e : out_edges_[task]) out.push_back(edge_dst(e));
  return out;
}

bool TaskGraph::reaches(std::size_t from, std::size_t to) const {
  return reach_[from * tasks_.size() + to] != 0;
}

bool TaskGraph::parallel(std::size_t a, std::size_t b) const {
  return a != b && !reaches(a, b) && !reaches(b, a);
}

double TaskGraph::read_bytes(std::size_t task) const {
  if (!in_edges_[task].empty()) {
    double sum = 0.0;
    for (std::size_t e : in_edges_[task]) sum += edges_[e].bytes;
    return sum;
  }
  const Task& t = tasks_[task];
  return t.i_read ? t.f_ops / *t.i_read : 0.0;
}

double TaskGraph::write_bytes(std::size_t task) const {
  if (!out_edges_[task].empty()) {
    double sum = 0.0;
    for (std::size_t e : out_edges_[task]) sum += edges_[e].bytes;
    return sum;
  }
  const Task& t = tasks_[task];
  return t.i_write ? t.f_ops / *t.i_write : 0.0;
}

double compute_talp(const TaskGraph& g) {
  std::size_t incomparable = 0;
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b)
      if (g.parallel(a, b)) ++incomparable;
  return 1.0 + static_cast<double>(incomparable);
}

double compute_llp_avg(const TaskGraph& g) {
  if (g.empty()) throw EmptyGraphError("workload '" + g.name() + "' has no tasks");
  double sum = 0.0;
  for (const auto& t : g.tasks()) sum += t.llp;
  return sum / static_cast<double>(g.size());
}

WorkloadCharacteristics characterize(const TaskGraph& g) {
  if (g.empty()) throw EmptyGraphError("workload '" + g.name() + "' has no tasks");
  WorkloadCharacteristics c;
  double n = static_cast<double>(g.size());
  std::size_t n_read = 0, n_write = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Task& t = g.tasks()[i];
    c.avg_f += t.f_ops;
    if (t.i_read) {
      c.avg_i_read += *t.i_read;
      ++n_read;
    }
    if (t.i_write) {
      c.avg_i_write += *t.i_write;
      ++n_write;
    }
    c.avg_data_movement += g.read_bytes(i) + g.write_bytes(i);
  }
  c.avg_f /= n;
  c.avg_data_movement /= n;
  if (n_read) c.avg_i_read /= static_cast<double>(n_read);
  if (n_write) c.avg_i_write /= static_cast<double>(n_write);
  c.avg_llp = compute_llp_avg(g);
  c.talp = compute_talp(g);
  return c;
}

GraphShape parse_shape(const std::string& name) {
  if (name == "chain") return GraphShape::Chain;
  if (name == "diamond") return GraphShape::Diamond;
  if (name == "fanout") return GraphShape::FanOut;
  if (name == "independent") return GraphShape::Independent;
  if (name == "random") return GraphShape::RandomDag;
  throw InvalidSpecError("unknown graph shape '" + name + "'");
}

TaskGraph synth_workload(const SynthSpec& spec) {
  if (spec.tasks == 0) throw InvalidSpecError("synthetic workload needs at least one task");
  if (spec.shape == GraphShape::Diamond && spec.tasks < 3)
    throw InvalidSpecError("diamond shape needs at least 3 tasks");
  if (spec.shape == GraphShape::FanOut && spec.tasks < 2)
    throw InvalidSpecError("fan-out shape needs at least 2 tasks");
  if (!(spec.f_min >= 0 && spec.f_min <= spec.f_max) || !(spec.bytes_min >= 0 && spec.bytes_min <= spec.bytes_max) ||
      !(spec.llp_min >= 1 && spec.llp_min <= spec.llp_max) || spec.bursts.empty() ||
      !(spec.edge_probability >= 0 && spec.edge_probability <= 1) || !(spec.i_read > 0) || !(spec.i_write > 0))
    throw InvalidSpecError("invalid synthetic workload ranges");
  for (double b : spec.bursts)
    if (!(b > 0)) throw InvalidSpecError("burst sizes must be positive");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const std::size_t n = spec.tasks;
  std::vector<Task> tasks(n);
  const int width = static_cast<int>(std::to_string(n).size());
  for (std::size_t i = 0; i < n; ++i) {
    std::string num = std::to_string(i);
    tasks[i].id = spec.id_prefix + std::string(width - static_cast<int>(num.size()), '0') + num;
    tasks[i].f_ops = std::round(draw(spec.f_min, spec.f_max));
    tasks[i].llp = std::round(draw(spec.llp_min, spec.llp_max));
    tasks[i].i_read = spec.i_read;
    tasks[i].i_write = spec.i_write;
    tasks[i].burst = spec.bursts[static_cast<std::size_t>(unit(rng) * spec.bursts.size()) % spec.bursts.size()];
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  switch (spec.shape) {
    case GraphShape::Chain:
      for (std::size_t i = 1; i < n; ++i) pairs.emplace_back(i - 1, i);
      break;
    case GraphShape::Diamond:
      for (std::size_t i = 1; i + 1 < n; ++i) {
        pairs.emplace_back(0, i);
        pairs.emplace_back(i, n - 1);
      }
      break;
    case GraphShape::FanOut:
      for (std::size_t i = 1; i < n; ++i) pairs.emplace_back(0, i);
      break;
    case GraphShape::Independent:
      break;
    case GraphShape::RandomDag:
      // Edges only go from lower to higher index, so the result is acyclic.
      for (std::size_t j = 1; j < n; ++j) {
        bool linked = false;
        for (std::size_t i = 0; i < j; ++i) {
          if (unit(rng) < spec.edge_probability) {
            pairs.emplace_back(i, j);
            linked = true;
          }
        }
        if (!linked && unit(rng) < 0.5) pairs.emplace_back(static_cast<std::size_t>(unit(rng) * j) % j, j);
      }
      break;
  }

  std::vector<DataEdge> edges;
  edges.reserve(pairs.size());
  for (auto [s, d] : pairs)
    edges.push_back({tasks[s].id, tasks[d].id, std::round(draw(spec.bytes_min, spec.bytes_max))});
  return TaskGraph::build(spec.name, std::move(tasks), std::move(edges));
}

}  // namespace dse
