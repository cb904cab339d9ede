#pragma once

#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "percolab/hierarchy.hpp"
#include "percolab/point.hpp"

namespace percolab {

/// Finite set of sites, kept sorted and duplicate-free for deterministic
/// iteration. Members are interpreted at a stated scale by the caller.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::vector<Point> pts);

  const std::vector<Point>& members() const { return pts_; }
  size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  bool contains(const Point& p) const;
  auto begin() const { return pts_.begin(); }
  auto end() const { return pts_.end(); }

  friend bool operator==(const SiteSet& a, const SiteSet& b) { return a.pts_ == b.pts_; }

 private:
  std::vector<Point> pts_;
};

using PointSet = std::unordered_set<Point, PointHash>;

SiteSet to_site_set(const PointSet& s);

/// Nearest-neighbour path; consecutive vertices at L1 distance 1. Length is
/// the number of edges. Not required to be simple.
class LatticePath {
 public:
  LatticePath() = default;
  explicit LatticePath(std::vector<Point> vs);

  const std::vector<Point>& vertices() const { return vs_; }
  size_t length() const { return vs_.empty() ? 0 : vs_.size() - 1; }
  bool empty() const { return vs_.size() < 2; }
  std::vector<Edge> edges() const;

 private:
  std::vector<Point> vs_;
};

enum class BoxFlavor { kPlain, kEnlarged };

/// Box at scale k around site i: plain realizes B_{N_k}(i), enlarged
/// realizes B'_{N_k}(i) = i N_k + B_{3 N_k}.
struct BoxSpec {
  int scale = 1;
  Point site;
  BoxFlavor flavor = BoxFlavor::kPlain;
};

/// Inclusive per-axis coordinate bounds of a box.
struct BoxBounds {
  Point lo, hi;
  bool contains(const Point& p) const {
    for (int i = 0; i < p.dim(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
  int64_t side(int axis) const { return hi[axis] - lo[axis] + 1; }
};

BoxBounds box_bounds(const BoxSpec& spec, const ScaleHierarchy& h);
BoxBounds box_bounds_raw(const Point& site, int64_t n, bool enlarged);

/// All integer points of the box; |result| = N_k^d (plain) or (3 N_k)^d
/// (enlarged). Refuses boxes too large to materialize.
SiteSet box_sites(const BoxSpec& spec, const ScaleHierarchy& h);
SiteSet box_sites_raw(const Point& site, int64_t n, BoxFlavor flavor);

/// L1 distance between the point sets of two boxes' union and a target set is
/// computed per axis; this helper gives dis({p}, box).
int64_t dist_point_to_box(const Point& p, const BoxBounds& b);

/// Exterior vertex boundary: sites outside C with an L1-neighbour in C,
/// connected to infinity by a path avoiding C (decided by flood fill from the
/// frame of the bounding box of C enlarged by margin 2).
SiteSet exterior_boundary(const SiteSet& c);

/// Sites of Z^d \ C enclosed by C (not connected to infinity avoiding C).
SiteSet interior(const SiteSet& c);

/// Partition of S into maximal *-connected components (L-infinity adjacency).
std::vector<SiteSet> star_components(const SiteSet& s);

bool is_star_connected(const SiteSet& s);

/// Maximal L1-connected components.
std::vector<SiteSet> l1_components(const SiteSet& s);

/// Exact count of *-connected m-site subsets of Z^2 containing the origin.
/// Test oracle only: m <= 5, d = 2.
uint64_t enumerate_star_animals(int m, int d);

/// Visits every point of [lo, hi] (inclusive, per axis) in lexicographic order.
void for_each_in_bounds(const Point& lo, const Point& hi,
                        const std::function<void(const Point&)>& fn);

/// The 2d L1-neighbour offsets in the fixed axis order +x1, -x1, +x2, -x2, ...
std::vector<Point> l1_neighbor_offsets(int d);

/// The 3^d - 1 L-infinity neighbour offsets, lexicographic order.
std::vector<Point> star_neighbor_offsets(int d);

}  // namespace percolab
