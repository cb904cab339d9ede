#include "percolab/lattice.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace percolab {

SiteSet::SiteSet(std::vector<Point> pts) : pts_(std::move(pts)) {
  std::sort(pts_.begin(), pts_.end());
  pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

bool SiteSet::contains(const Point& p) const {
  return std::binary_search(pts_.begin(), pts_.end(), p);
}

SiteSet to_site_set(const PointSet& s) {
  return SiteSet(std::vector<Point>(s.begin(), s.end()));
}

LatticePath::LatticePath(std::vector<Point> vs) : vs_(std::move(vs)) {
  for (size_t i = 1; i < vs_.size(); ++i)
    require(dist1(vs_[i - 1], vs_[i]) == 1, "path vertices must be L1-adjacent");
}

std::vector<Edge> LatticePath::edges() const {
  std::vector<Edge> es;
  es.reserve(length());
  for (size_t i = 1; i < vs_.size(); ++i) es.emplace_back(vs_[i - 1], vs_[i]);
  return es;
}

BoxBounds box_bounds_raw(const Point& site, int64_t n, bool enlarged) {
  int64_t side = enlarged ? 3 * n : n;
  BoxBounds b{Point(site.dim()), Point(site.dim())};
  for (int i = 0; i < site.dim(); ++i) {
    b.lo[i] = site[i] * n + box_lo(side);
    b.hi[i] = site[i] * n + box_hi(side);
  }
  return b;
}

BoxBounds box_bounds(const BoxSpec& spec, const ScaleHierarchy& h) {
  int64_t n = h.scale_side_i64(spec.scale);
  return box_bounds_raw(spec.site, n, spec.flavor == BoxFlavor::kEnlarged);
}

namespace {

SiteSet enumerate_box(const BoxBounds& b) {
  u128 count = 1;
  for (int i = 0; i < b.lo.dim(); ++i) count *= static_cast<u128>(b.side(i));
  require(count <= static_cast<u128>(1) << 27, "box too large to materialize");
  std::vector<Point> pts;
  pts.reserve(static_cast<size_t>(count));
  for_each_in_bounds(b.lo, b.hi, [&](const Point& p) { pts.push_back(p); });
  return SiteSet(std::move(pts));
}

}  // namespace

SiteSet box_sites(const BoxSpec& spec, const ScaleHierarchy& h) {
  return enumerate_box(box_bounds(spec, h));
}

SiteSet box_sites_raw(const Point& site, int64_t n, BoxFlavor flavor) {
  require(n >= 1, "box side must be positive");
  return enumerate_box(box_bounds_raw(site, n, flavor == BoxFlavor::kEnlarged));
}

int64_t dist_point_to_box(const Point& p, const BoxBounds& b) {
  int64_t d = 0;
  for (int i = 0; i < p.dim(); ++i) {
    if (p[i] < b.lo[i])
      d += b.lo[i] - p[i];
    else if (p[i] > b.hi[i])
      d += p[i] - b.hi[i];
  }
  return d;
}

void for_each_in_bounds(const Point& lo, const Point& hi,
                        const std::function<void(const Point&)>& fn) {
  int d = lo.dim();
  Point cur = lo;
  while (true) {
    fn(cur);
    int axis = d - 1;
    while (axis >= 0) {
      if (cur[axis] < hi[axis]) {
        ++cur[axis];
        break;
      }
      cur[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
}

std::vector<Point> l1_neighbor_offsets(int d) {
  std::vector<Point> offs;
  offs.reserve(2 * d);
  for (int i = 0; i < d; ++i) {
    Point plus(d), minus(d);
    plus[i] = 1;
    minus[i] = -1;
    offs.push_back(plus);
    offs.push_back(minus);
  }
  return offs;
}

std::vector<Point> star_neighbor_offsets(int d) {
  std::vector<Point> offs;
  Point lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = -1;
    hi[i] = 1;
  }
  for_each_in_bounds(lo, hi, [&](const Point& p) {
    if (p.norm_inf() == 1) offs.push_back(p);
  });
  return offs;
}

namespace {

// Flood fill over Z^d \ C within the bounding box of C enlarged by margin 2,
// seeded from the frame. Reached sites are exactly those connected to
// infinity by a path avoiding C (any escape route crosses the frame).
struct OutsideFill {
  BoxBounds box;
  PointSet reached;

  OutsideFill(const SiteSet& c, int margin) {
    int d = c.members().front().dim();
    box.lo = Point(d);
    box.hi = Point(d);
    for (int i = 0; i < d; ++i) {
      int64_t lo = c.members().front()[i], hi = lo;
      for (const Point& p : c) {
        lo = std::min(lo, p[i]);
        hi = std::max(hi, p[i]);
      }
      box.lo[i] = lo - margin;
      box.hi[i] = hi + margin;
    }
    PointSet in_c(c.members().begin(), c.members().end());
    auto offs = l1_neighbor_offsets(d);
    std::deque<Point> queue;
    // Seed with the frame (all box sites with some coordinate on the rim).
    for_each_in_bounds(box.lo, box.hi, [&](const Point& p) {
      bool rim = false;
      for (int i = 0; i < d; ++i)
        if (p[i] == box.lo[i] || p[i] == box.hi[i]) rim = true;
      if (rim && !in_c.count(p) && reached.insert(p).second) queue.push_back(p);
    });
    while (!queue.empty()) {
      Point p = queue.front();
      queue.pop_front();
      for (const Point& o : offs) {
        Point q = p + o;
        if (!box.contains(q) || in_c.count(q)) continue;
        if (reached.insert(q).second) queue.push_back(q);
      }
    }
  }
};

}  // namespace

SiteSet exterior_boundary(const SiteSet& c) {
  if (c.empty()) return SiteSet();
  OutsideFill fill(c, 2);
  int d = c.members().front().dim();
  auto offs = l1_neighbor_offsets(d);
  PointSet result;
  for (const Point& p : c)
    for (const Point& o : offs) {
      Point q = p + o;
      if (!c.contains(q) && fill.reached.count(q)) result.insert(q);
    }
  return to_site_set(result);
}

SiteSet interior(const SiteSet& c) {
  if (c.empty()) return SiteSet();
  OutsideFill fill(c, 2);
  std::vector<Point> result;
  for_each_in_bounds(fill.box.lo, fill.box.hi, [&](const Point& p) {
    if (!c.contains(p) && !fill.reached.count(p)) result.push_back(p);
  });
  return SiteSet(std::move(result));
}

namespace {

std::vector<SiteSet> components_by_offsets(const SiteSet& s, const std::vector<Point>& offs) {
  std::vector<SiteSet> comps;
  PointSet seen;
  for (const Point& start : s) {
    if (seen.count(start)) continue;
    std::vector<Point> comp;
    std::deque<Point> queue{start};
    seen.insert(start);
    while (!queue.empty()) {
      Point p = queue.front();
      queue.pop_front();
      comp.push_back(p);
      for (const Point& o : offs) {
        Point q = p + o;
        if (s.contains(q) && seen.insert(q).second) queue.push_back(q);
      }
    }
    comps.emplace_back(std::move(comp));
  }
  return comps;
}

}  // namespace

std::vector<SiteSet> star_components(const SiteSet& s) {
  if (s.empty()) return {};
  return components_by_offsets(s, star_neighbor_offsets(s.members().front().dim()));
}

bool is_star_connected(const SiteSet& s) { return star_components(s).size() == 1; }

std::vector<SiteSet> l1_components(const SiteSet& s) {
  if (s.empty()) return {};
  return components_by_offsets(s, l1_neighbor_offsets(s.members().front().dim()));
}

uint64_t enumerate_star_animals(int m, int d) {
  require(d == 2, "animal enumeration oracle is d=2 only");
  require(m >= 1 && m <= 5, "animal enumeration oracle is capped at m <= 5");
  // Exhaustive growth from {0}: every *-connected set containing the origin
  // arises by repeatedly adding a *-neighbour of a member (spanning-tree
  // order), so the grown family is exactly the animals through 0.
  std::set<std::vector<Point>> current;
  current.insert({Point::zero(d)});
  auto offs = star_neighbor_offsets(d);
  for (int size = 1; size < m; ++size) {
    std::set<std::vector<Point>> next;
    for (const auto& animal : current) {
      PointSet in(animal.begin(), animal.end());
      for (const Point& p : animal)
        for (const Point& o : offs) {
          Point q = p + o;
          if (in.count(q)) continue;
          std::vector<Point> grown = animal;
          grown.push_back(q);
          std::sort(grown.begin(), grown.end());
          next.insert(grown);
        }
    }
    current = std::move(next);
  }
  return current.size();
}

}  // namespace percolab
