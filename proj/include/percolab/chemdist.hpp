#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "percolab/percolation.hpp"
#include "percolab/window.hpp"

namespace percolab {

/// Unit-weight shortest path on an open subgraph. Unreachable is a distinct
/// state, never a sentinel value. The geodesic is deterministic: breadth-first
/// expansion enqueues neighbours in the fixed axis order +x1, -x1, +x2, -x2,
/// ... and parent pointers are first-writer-wins.
struct GeodesicResult {
  bool reachable = false;
  int64_t distance = 0;           // valid iff reachable
  LatticePath path;               // valid iff reachable
  uint64_t expanded_vertices = 0; // diagnostic
};

using OpenPredicate = std::function<bool(uint64_t)>;

GeodesicResult chemical_distance(const Window& w, const OpenPredicate& open, const Point& x,
                                 const Point& y, const BoxBounds* region = nullptr);

GeodesicResult chemical_distance_level(const CoupledConfig& cfg, Level level, const Point& x,
                                       const Point& y, const BoxBounds* region = nullptr);

/// Distances from a single source to every vertex (unit weights); -1 where
/// unreachable. Cheaper than per-pair queries for whole-window scans.
std::vector<int32_t> bfs_distances(const Window& w, const OpenPredicate& open, const Point& src,
                                   const BoxBounds* region = nullptr);

/// Closest cluster vertex to x in L1 distance; ties broken by lexicographic
/// order. Searches expanding L1 spheres around x, so the cost is local.
Point regularize(const Point& x, const ClusterLabeling& labeling, uint32_t cluster_id);

/// Time-weighted shortest path; +inf edges are never relaxed. On unit-weight
/// fields this agrees with chemical_distance.
struct PassageResult {
  bool reachable = false;
  double time = 0.0;
  LatticePath path;
};

PassageResult passage_time(const EdgeField& times, const Point& x, const Point& y,
                           const BoxBounds* region = nullptr);

/// Dijkstra times from a source to all vertices; +inf where unreachable.
std::vector<double> dijkstra_times(const EdgeField& times, const Point& src,
                                   const BoxBounds* region = nullptr);

/// Monte Carlo tail table for the chemical-distance linear-growth bound:
/// for each beta in the grid, the empirical frequency of
/// {beta ||x||_1 <= D(0,x) < inf} with a binomial confidence half-width.
struct TailRow {
  double beta = 0;
  double frequency = 0;
  double half_width = 0;
  uint64_t hits = 0;
  uint64_t trials = 0;
};

std::vector<TailRow> ap_tail_estimate(double p, double p_c, const Window& window, uint64_t trials,
                                      const Point& x, const std::vector<double>& beta_grid,
                                      uint64_t seed);

}  // namespace percolab
