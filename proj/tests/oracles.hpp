// Brute-force reference implementations used only by tests. Each oracle is
// written from the definitions, independently of the library code paths it
// checks.
#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "percolab/lattice.hpp"
#include "percolab/window.hpp"

namespace percolab::oracle {

// Exterior vertex boundary on a dense grid: mark C, flood the complement of C
// from far away, keep complement cells adjacent to C that were reached.
inline std::set<Point> boundary_flood(const std::vector<Point>& c) {
  std::set<Point> in_c(c.begin(), c.end());
  int64_t lo0 = c.front()[0], hi0 = lo0, lo1 = c.front()[1], hi1 = lo1;
  for (const Point& p : c) {
    lo0 = std::min(lo0, p[0]);
    hi0 = std::max(hi0, p[0]);
    lo1 = std::min(lo1, p[1]);
    hi1 = std::max(hi1, p[1]);
  }
  lo0 -= 2; lo1 -= 2; hi0 += 2; hi1 += 2;
  int64_t w = hi0 - lo0 + 1, h = hi1 - lo1 + 1;
  std::vector<uint8_t> reached(w * h, 0);
  auto idx = [&](int64_t x, int64_t y) { return (x - lo0) * h + (y - lo1); };
  std::vector<Point> stack{{lo0, lo1}};
  reached[idx(lo0, lo1)] = 1;
  while (!stack.empty()) {
    Point p = stack.back();
    stack.pop_back();
    const int64_t dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      Point q{p[0] + dx[k], p[1] + dy[k]};
      if (q[0] < lo0 || q[0] > hi0 || q[1] < lo1 || q[1] > hi1) continue;
      if (in_c.count(q) || reached[idx(q[0], q[1])]) continue;
      reached[idx(q[0], q[1])] = 1;
      stack.push_back(q);
    }
  }
  std::set<Point> result;
  for (const Point& p : c) {
    const int64_t dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      Point q{p[0] + dx[k], p[1] + dy[k]};
      if (!in_c.count(q) && reached[idx(q[0], q[1])]) result.insert(q);
    }
  }
  return result;
}

// Transitive closure of pairwise *-adjacency.
inline std::vector<std::set<Point>> star_components_brute(const std::vector<Point>& pts) {
  std::vector<std::set<Point>> comps;
  std::vector<int> owner(pts.size(), -1);
  for (size_t i = 0; i < pts.size(); ++i) {
    if (owner[i] >= 0) continue;
    int id = static_cast<int>(comps.size());
    comps.push_back({pts[i]});
    owner[i] = id;
    bool grew = true;
    while (grew) {
      grew = false;
      for (size_t j = 0; j < pts.size(); ++j) {
        if (owner[j] >= 0) continue;
        for (const Point& q : comps[id])
          if (dist_inf(pts[j], q) == 1) {
            comps[id].insert(pts[j]);
            owner[j] = id;
            grew = true;
            break;
          }
      }
    }
  }
  return comps;
}

// All simple paths up to a length cap; exact shortest distance.
inline int64_t shortest_path_brute(const Window& w, const std::set<Edge>& open, const Point& from,
                                   const Point& to, int64_t cap) {
  int64_t best = -1;
  std::vector<Point> stack{from};
  std::set<Point> on_stack{from};
  auto offs = l1_neighbor_offsets(w.dim());
  std::function<void()> dfs = [&] {
    Point cur = stack.back();
    int64_t len = static_cast<int64_t>(stack.size()) - 1;
    if (cur == to) {
      if (best < 0 || len < best) best = len;
      return;
    }
    if (len >= cap || (best >= 0 && len >= best)) return;
    for (const Point& o : offs) {
      Point nb = cur + o;
      if (!w.contains(nb) || on_stack.count(nb)) continue;
      if (!open.count(Edge(cur, nb))) continue;
      stack.push_back(nb);
      on_stack.insert(nb);
      dfs();
      stack.pop_back();
      on_stack.erase(nb);
    }
  };
  dfs();
  return best;
}

// Cheapest simple path by exhaustive search over rational weights.
inline double cheapest_path_brute(const Window& w, const std::map<Edge, double>& weights,
                                  const Point& from, const Point& to) {
  double best = -1;
  std::vector<Point> stack{from};
  std::set<Point> on_stack{from};
  double cost = 0;
  auto offs = l1_neighbor_offsets(w.dim());
  std::function<void()> dfs = [&] {
    Point cur = stack.back();
    if (cur == to) {
      if (best < 0 || cost < best) best = cost;
      return;
    }
    if (best >= 0 && cost >= best) return;
    for (const Point& o : offs) {
      Point nb = cur + o;
      if (!w.contains(nb) || on_stack.count(nb)) continue;
      auto it = weights.find(Edge(cur, nb));
      if (it == weights.end()) continue;
      stack.push_back(nb);
      on_stack.insert(nb);
      cost += it->second;
      dfs();
      cost -= it->second;
      stack.pop_back();
      on_stack.erase(nb);
    }
  };
  dfs();
  return best;
}

// Random connected site set of the requested size (L1-connected growth).
inline std::vector<Point> random_connected_set(std::mt19937_64& rng, int size) {
  std::vector<Point> pts{Point{0, 0}};
  std::set<Point> in(pts.begin(), pts.end());
  auto offs = l1_neighbor_offsets(2);
  while (static_cast<int>(pts.size()) < size) {
    const Point& base = pts[rng() % pts.size()];
    Point q = base + offs[rng() % offs.size()];
    if (in.insert(q).second) pts.push_back(q);
  }
  return pts;
}

inline LatticePath random_walk(std::mt19937_64& rng, int length, int d = 2) {
  std::vector<Point> vs{Point::zero(d)};
  auto offs = l1_neighbor_offsets(d);
  for (int i = 0; i < length; ++i) vs.push_back(vs.back() + offs[rng() % offs.size()]);
  return LatticePath(std::move(vs));
}

}  // namespace percolab::oracle
