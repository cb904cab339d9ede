#include "percolab/chemdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "percolab/rng.hpp"

namespace percolab {

namespace {

struct Search {
  const Window& w;
  std::vector<int32_t> dist;
  std::vector<uint32_t> parent;

  explicit Search(const Window& win)
      : w(win), dist(win.vertex_count(), -1), parent(win.vertex_count(), Window::kNoVertex) {}

  LatticePath reconstruct(uint32_t target) const {
    std::vector<Point> vs;
    for (uint32_t v = target; v != Window::kNoVertex; v = parent[v]) vs.push_back(w.vertex_point(v));
    std::reverse(vs.begin(), vs.end());
    return LatticePath(std::move(vs));
  }
};

// Edge slot between v and its neighbour along (axis, dir); tail is the lower vertex.
inline uint64_t slot_between(const Window& w, uint32_t v, uint32_t nb, int axis, int dir) {
  return dir > 0 ? w.slot(v, axis) : w.slot(nb, axis);
}

}  // namespace

std::vector<int32_t> bfs_distances(const Window& w, const OpenPredicate& open, const Point& src,
                                   const BoxBounds* region) {
  require(w.contains(src), "source outside window");
  require(region == nullptr || region->contains(src), "source outside region");
  Search s(w);
  std::vector<uint32_t> queue;
  queue.reserve(1024);
  uint32_t start = w.vertex_index(src);
  s.dist[start] = 0;
  queue.push_back(start);
  size_t head = 0;
  while (head < queue.size()) {
    uint32_t v = queue[head++];
    int32_t dv = s.dist[v];
    for (int axis = 0; axis < w.dim(); ++axis)
      for (int dir : {+1, -1}) {
        uint32_t nb = w.neighbor(v, axis, dir);
        if (nb == Window::kNoVertex || s.dist[nb] >= 0) continue;
        if (region && !region->contains(w.vertex_point(nb))) continue;
        if (!open(slot_between(w, v, nb, axis, dir))) continue;
        s.dist[nb] = dv + 1;
        queue.push_back(nb);
      }
  }
  return std::move(s.dist);
}

GeodesicResult chemical_distance(const Window& w, const OpenPredicate& open, const Point& x,
                                 const Point& y, const BoxBounds* region) {
  require(w.contains(x) && w.contains(y), "endpoint outside window");
  require(region == nullptr || (region->contains(x) && region->contains(y)),
          "endpoint outside region");
  GeodesicResult res;
  uint32_t target = w.vertex_index(y);
  Search s(w);
  std::vector<uint32_t> queue;
  uint32_t start = w.vertex_index(x);
  s.dist[start] = 0;
  queue.push_back(start);
  size_t head = 0;
  while (head < queue.size()) {
    uint32_t v = queue[head++];
    ++res.expanded_vertices;
    if (v == target) break;
    int32_t dv = s.dist[v];
    for (int axis = 0; axis < w.dim(); ++axis)
      for (int dir : {+1, -1}) {
        uint32_t nb = w.neighbor(v, axis, dir);
        if (nb == Window::kNoVertex || s.dist[nb] >= 0) continue;
        if (region && !region->contains(w.vertex_point(nb))) continue;
        if (!open(slot_between(w, v, nb, axis, dir))) continue;
        s.dist[nb] = dv + 1;
        s.parent[nb] = v;
        queue.push_back(nb);
      }
  }
  if (s.dist[target] < 0) return res;
  res.reachable = true;
  res.distance = s.dist[target];
  res.path = s.reconstruct(target);
  return res;
}

GeodesicResult chemical_distance_level(const CoupledConfig& cfg, Level level, const Point& x,
                                       const Point& y, const BoxBounds* region) {
  return chemical_distance(
      cfg.window(), [&](uint64_t slot) { return cfg.open_at(level, slot); }, x, y, region);
}

Point regularize(const Point& x, const ClusterLabeling& labeling, uint32_t cluster_id) {
  require(cluster_id < labeling.component_count(), "unknown cluster id");
  require(labeling.size_of(cluster_id) > 0, "empty cluster");
  const Window& w = labeling.window();
  // Expanding L1 spheres; within a sphere, lexicographic scan order makes the
  // tie-break deterministic.
  for (int64_t r = 0; r <= 2 * w.half_width() * w.dim(); ++r) {
    std::optional<Point> best;
    Point lo(x.dim()), hi(x.dim());
    for (int i = 0; i < x.dim(); ++i) {
      lo[i] = x[i] - r;
      hi[i] = x[i] + r;
    }
    for_each_in_bounds(lo, hi, [&](const Point& p) {
      if (best || dist1(p, x) != r || !w.contains(p)) return;
      if (labeling.label_at(p) == cluster_id) best = p;
    });
    if (best) return *best;
  }
  throw InvariantError("regularize: cluster not found in window");
}

std::vector<double> dijkstra_times(const EdgeField& times, const Point& src,
                                   const BoxBounds* region) {
  const Window& w = *times.window;
  require(w.contains(src), "source outside window");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(w.vertex_count(), inf);
  using Item = std::pair<double, uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  uint32_t start = w.vertex_index(src);
  dist[start] = 0.0;
  heap.emplace(0.0, start);
  while (!heap.empty()) {
    auto [dv, v] = heap.top();
    heap.pop();
    if (dv > dist[v]) continue;
    for (int axis = 0; axis < w.dim(); ++axis)
      for (int dir : {+1, -1}) {
        uint32_t nb = w.neighbor(v, axis, dir);
        if (nb == Window::kNoVertex) continue;
        if (region && !region->contains(w.vertex_point(nb))) continue;
        double t = times.values[slot_between(w, v, nb, axis, dir)];
        require(!(t < 0.0), "negative passage time");
        if (std::isinf(t)) continue;
        double cand = dv + t;
        if (cand < dist[nb]) {
          dist[nb] = cand;
          heap.emplace(cand, nb);
        }
      }
  }
  return dist;
}

PassageResult passage_time(const EdgeField& times, const Point& x, const Point& y,
                           const BoxBounds* region) {
  const Window& w = *times.window;
  require(w.contains(x) && w.contains(y), "endpoint outside window");
  require(region == nullptr || (region->contains(x) && region->contains(y)),
          "endpoint outside region");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(w.vertex_count(), inf);
  std::vector<uint32_t> parent(w.vertex_count(), Window::kNoVertex);
  using Item = std::pair<double, uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  uint32_t start = w.vertex_index(x), target = w.vertex_index(y);
  dist[start] = 0.0;
  heap.emplace(0.0, start);
  while (!heap.empty()) {
    auto [dv, v] = heap.top();
    heap.pop();
    if (dv > dist[v]) continue;
    if (v == target) break;
    for (int axis = 0; axis < w.dim(); ++axis)
      for (int dir : {+1, -1}) {
        uint32_t nb = w.neighbor(v, axis, dir);
        if (nb == Window::kNoVertex) continue;
        if (region && !region->contains(w.vertex_point(nb))) continue;
        double t = times.values[slot_between(w, v, nb, axis, dir)];
        require(!(t < 0.0), "negative passage time");
        if (std::isinf(t)) continue;
        double cand = dv + t;
        if (cand < dist[nb]) {
          dist[nb] = cand;
          parent[nb] = v;
          heap.emplace(cand, nb);
        }
      }
  }
  PassageResult res;
  if (std::isinf(dist[target])) {
    res.time = inf;
    return res;
  }
  res.reachable = true;
  res.time = dist[target];
  std::vector<Point> vs;
  for (uint32_t v = target; v != Window::kNoVertex; v = parent[v]) vs.push_back(w.vertex_point(v));
  std::reverse(vs.begin(), vs.end());
  res.path = LatticePath(std::move(vs));
  return res;
}

std::vector<TailRow> ap_tail_estimate(double p, double p_c, const Window& window, uint64_t trials,
                                      const Point& x, const std::vector<double>& beta_grid,
                                      uint64_t seed) {
  require(p > p_c, "ap-tail estimate requires p > p_c");
  require(window.contains(x), "target point outside window");
  require(trials >= 1, "trials must be >= 1");
  int64_t norm = x.norm1();
  std::vector<uint64_t> hits(beta_grid.size(), 0);
  Point origin = Point::zero(window.dim());
  for (uint64_t t = 0; t < trials; ++t) {
    EdgeField field = sample_uniform_field(window, trial_seed(seed, t));
    auto open = [&](uint64_t slot) { return field.values[slot] <= p; };
    GeodesicResult g = chemical_distance(window, open, origin, x);
    for (size_t i = 0; i < beta_grid.size(); ++i)
      if (g.reachable && static_cast<double>(g.distance) >= beta_grid[i] * static_cast<double>(norm))
        ++hits[i];
  }
  std::vector<TailRow> rows;
  for (size_t i = 0; i < beta_grid.size(); ++i) {
    TailRow row;
    row.beta = beta_grid[i];
    row.trials = trials;
    row.hits = hits[i];
    row.frequency = static_cast<double>(hits[i]) / static_cast<double>(trials);
    row.half_width = 1.96 * std::sqrt(row.frequency * (1.0 - row.frequency) /
                                      static_cast<double>(trials));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace percolab
