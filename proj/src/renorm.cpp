#include "percolab/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>

namespace percolab {

namespace {

/// Dense scratch grid over a box, flat int32 indexing, lexicographic order.
struct LocalGrid {
  BoxBounds b;
  int d;
  int32_t n = 1;
  std::array<int32_t, kMaxDim> stride{};
  std::array<int32_t, kMaxDim> side{};

  explicit LocalGrid(const BoxBounds& bounds) : b(bounds), d(bounds.lo.dim()) {
    for (int i = 0; i < d; ++i) side[i] = static_cast<int32_t>(b.side(i));
    for (int i = d - 1; i >= 0; --i) {
      stride[i] = (i == d - 1) ? 1 : stride[i + 1] * side[i + 1];
    }
    n = stride[0] * side[0];
  }
  int32_t index(const Point& p) const {
    int32_t idx = 0;
    for (int i = 0; i < d; ++i) idx += static_cast<int32_t>(p[i] - b.lo[i]) * stride[i];
    return idx;
  }
  Point point(int32_t idx) const {
    Point p(d);
    for (int i = 0; i < d; ++i) {
      p[i] = b.lo[i] + idx / stride[i];
      idx %= stride[i];
    }
    return p;
  }
  int32_t coord(int32_t idx, int axis) const { return (idx / stride[axis]) % side[axis]; }
  // Neighbour in +-axis direction, -1 when leaving the box.
  int32_t neighbor(int32_t idx, int axis, int dir) const {
    int32_t c = coord(idx, axis);
    if (dir > 0 ? c + 1 >= side[axis] : c == 0) return -1;
    return idx + dir * stride[axis];
  }
};

// Flood labels over an open relation; labels numbered by first (lex) seed.
// open(idx, axis) answers for the +axis edge from idx.
template <typename OpenFn>
int32_t label_components(const LocalGrid& g, const OpenFn& open, std::vector<int32_t>* label) {
  label->assign(g.n, -1);
  std::vector<int32_t> stack;
  int32_t count = 0;
  for (int32_t seed = 0; seed < g.n; ++seed) {
    if ((*label)[seed] >= 0) continue;
    int32_t c = count++;
    (*label)[seed] = c;
    stack.push_back(seed);
    while (!stack.empty()) {
      int32_t v = stack.back();
      stack.pop_back();
      for (int axis = 0; axis < g.d; ++axis) {
        int32_t up = g.neighbor(v, axis, +1);
        if (up >= 0 && (*label)[up] < 0 && open(v, axis)) {
          (*label)[up] = c;
          stack.push_back(up);
        }
        int32_t dn = g.neighbor(v, axis, -1);
        if (dn >= 0 && (*label)[dn] < 0 && open(dn, axis)) {
          (*label)[dn] = c;
          stack.push_back(dn);
        }
      }
    }
  }
  return count;
}

}  // namespace

bool CrossingClusterInfo::contains(const Point& p) const {
  if (!bounds.contains(p)) return false;
  LocalGrid g(bounds);
  return member[g.index(p)] != 0;
}

BoxStateCache::BoxStateCache(const MaskedConfigView& view, const ScaleHierarchy& h)
    : view_(view), h_(&h), verdicts_(h.depth()), eval_counts_(h.depth(), 0) {}

void BoxStateCache::inject(int scale, const Point& site, Verdict v) {
  require(scale >= 1 && scale <= h_->depth(), "inject: scale out of range");
  std::lock_guard<std::mutex> lock(mu_);
  verdicts_[scale - 1][site] = v;
}

uint64_t BoxStateCache::evaluations(int scale) const {
  std::lock_guard<std::mutex> lock(mu_);
  return eval_counts_[scale - 1];
}

Verdict BoxStateCache::verdict(int scale, const Point& site) {
  require(scale >= 1 && scale <= h_->depth(),
          "verdict: scale " + std::to_string(scale) + " beyond hierarchy depth");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = verdicts_[scale - 1].find(site);
    if (it != verdicts_[scale - 1].end()) return it->second;
  }
  Verdict v;
  Scale1Detail detail;
  auto cluster = std::make_shared<CrossingClusterInfo>();
  if (scale == 1)
    v = compute_scale1(site, &detail, cluster.get());
  else
    v = compute_scale_k(scale, site);
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = verdicts_[scale - 1].emplace(site, v);
  if (inserted) {
    ++eval_counts_[scale - 1];
    if (scale == 1) {
      details_[site] = detail;
      clusters_[site] = cluster;
    }
  }
  return it->second;
}

Scale1Detail BoxStateCache::scale1_detail(const Point& site) {
  verdict(1, site);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = details_.find(site);
  // An injected verdict has no computed detail; report bare verdict bits.
  if (it == details_.end()) {
    Scale1Detail d;
    d.verdict = verdicts_[0].at(site);
    bool good = d.verdict == Verdict::kGood;
    d.unique_big_cluster = d.all_subboxes_crossing = good;
    d.short_connections = d.no_large_disjoint = good;
    return d;
  }
  return it->second;
}

const CrossingClusterInfo& BoxStateCache::crossing_cluster(const Point& site) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = clusters_.find(site);
    if (it != clusters_.end()) return *it->second;
  }
  // Injected verdicts skip evaluation; compute the cluster from the
  // configuration on demand.
  Scale1Detail detail;
  auto cluster = std::make_shared<CrossingClusterInfo>();
  compute_scale1(site, &detail, cluster.get());
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = clusters_.emplace(site, cluster);
  return *it->second;
}

Verdict BoxStateCache::compute_scale1(const Point& site, Scale1Detail* detail,
                                       CrossingClusterInfo* cluster) {
  const Window& w = view_.window();
  int64_t n1 = h_->scale_side_i64(1);
  BoxBounds bp = box_bounds_raw(site, n1, /*enlarged=*/true);
  detail->verdict = Verdict::kUnevaluated;
  if (!w.contains(bp.lo) || !w.contains(bp.hi)) return Verdict::kUnevaluated;

  LocalGrid g(bp);
  int d = g.d;
  // Window slot per local +axis edge.
  auto window_slot = [&](int32_t idx, int axis) {
    return w.slot(w.vertex_index(g.point(idx)), axis);
  };
  std::vector<int32_t> plabel;
  int32_t pcount = label_components(
      g, [&](int32_t idx, int axis) { return view_.p_open(window_slot(idx, axis)); }, &plabel);

  // Per-component L-infinity extent.
  std::vector<int32_t> lo(pcount * d, INT32_MAX), hi(pcount * d, INT32_MIN);
  for (int32_t idx = 0; idx < g.n; ++idx) {
    int32_t c = plabel[idx];
    for (int i = 0; i < d; ++i) {
      int32_t coord = g.coord(idx, i);
      lo[c * d + i] = std::min(lo[c * d + i], coord);
      hi[c * d + i] = std::max(hi[c * d + i], coord);
    }
  }
  auto diam = [&](int32_t c) {
    int32_t m = 0;
    for (int i = 0; i < d; ++i) m = std::max(m, hi[c * d + i] - lo[c * d + i]);
    return static_cast<int64_t>(m);
  };
  int32_t big = -1;
  int big_count = 0;
  for (int32_t c = 0; c < pcount; ++c)
    if (diam(c) >= n1) {
      big = c;
      ++big_count;
    }
  detail->unique_big_cluster = (big_count == 1);

  if (!detail->unique_big_cluster) {
    detail->all_subboxes_crossing = detail->short_connections = detail->no_large_disjoint = false;
    detail->verdict = Verdict::kBad;
    return Verdict::kBad;
  }

  cluster->bounds = bp;
  cluster->member.assign(g.n, 0);
  for (int32_t idx = 0; idx < g.n; ++idx) cluster->member[idx] = (plabel[idx] == big) ? 1 : 0;

  // (ii) the big cluster restricted to each of the 3^d plain boxes has a
  // component touching both faces in every axis.
  detail->all_subboxes_crossing = true;
  Point u_lo(d), u_hi(d);
  for (int i = 0; i < d; ++i) {
    u_lo[i] = -1;
    u_hi[i] = 1;
  }
  for_each_in_bounds(u_lo, u_hi, [&](const Point& u) {
    if (!detail->all_subboxes_crossing && !(u == Point::zero(d))) return;
    BoxBounds sub = box_bounds_raw(site + u, n1, false);
    LocalGrid sg(sub);
    std::vector<int32_t> slabel;
    int32_t scount = label_components(
        sg,
        [&](int32_t idx, int axis) {
          Point p = sg.point(idx);
          int32_t gi = g.index(p);
          if (g.neighbor(gi, axis, +1) < 0) return false;
          return view_.p_open(window_slot(gi, axis));
        },
        &slabel);
    // Components refine the B' components; membership in the big cluster is
    // decided by any representative vertex.
    std::vector<uint8_t> in_big(scount, 0), lo_t(scount * d, 0), hi_t(scount * d, 0);
    for (int32_t idx = 0; idx < sg.n; ++idx) {
      int32_t c = slabel[idx];
      if (plabel[g.index(sg.point(idx))] == big) in_big[c] = 1;
      for (int i = 0; i < d; ++i) {
        if (sg.coord(idx, i) == 0) lo_t[c * d + i] = 1;
        if (sg.coord(idx, i) == sg.side[i] - 1) hi_t[c * d + i] = 1;
      }
    }
    bool found = false;
    int32_t first_crossing = -1;
    for (int32_t c = 0; c < scount; ++c) {
      if (!in_big[c]) continue;
      bool crossing = true;
      for (int i = 0; i < d; ++i)
        if (!lo_t[c * d + i] || !hi_t[c * d + i]) crossing = false;
      if (crossing) {
        found = true;
        if (first_crossing < 0) first_crossing = c;
      }
    }
    if (!found) detail->all_subboxes_crossing = false;
    if (u == Point::zero(d) && found) {
      // Deterministic anchor: lexicographically first vertex of the first
      // qualifying restricted component of the plain box.
      for (int32_t idx = 0; idx < sg.n && !cluster->anchor; ++idx)
        if (slabel[idx] == first_crossing) cluster->anchor = sg.point(idx);
    }
  });

  // (iii) pairwise p-open distance within B' on the big cluster, paths
  // restricted to B'. One eccentricity usually settles it; fall back to the
  // full sweep only in the ambiguous band.
  int64_t limit = static_cast<int64_t>(std::floor(12.0 * h_->beta * static_cast<double>(n1)));
  std::vector<int32_t> dist(g.n);
  std::vector<int32_t> queue;
  queue.reserve(g.n);
  auto bfs_ecc = [&](int32_t src) {
    std::fill(dist.begin(), dist.end(), -1);
    queue.clear();
    dist[src] = 0;
    queue.push_back(src);
    size_t head = 0;
    int32_t ecc = 0;
    while (head < queue.size()) {
      int32_t v = queue[head++];
      for (int axis = 0; axis < d; ++axis) {
        int32_t up = g.neighbor(v, axis, +1);
        if (up >= 0 && dist[up] < 0 && view_.p_open(window_slot(v, axis))) {
          dist[up] = dist[v] + 1;
          queue.push_back(up);
        }
        int32_t dn = g.neighbor(v, axis, -1);
        if (dn >= 0 && dist[dn] < 0 && view_.p_open(window_slot(dn, axis))) {
          dist[dn] = dist[v] + 1;
          queue.push_back(dn);
        }
      }
    }
    for (int32_t idx = 0; idx < g.n; ++idx)
      if (plabel[idx] == big) {
        invariant(dist[idx] >= 0, "big cluster disconnected within its own component");
        ecc = std::max(ecc, dist[idx]);
      }
    return static_cast<int64_t>(ecc);
  };
  int32_t first_big = -1;
  for (int32_t idx = 0; idx < g.n && first_big < 0; ++idx)
    if (plabel[idx] == big) first_big = idx;
  int64_t ecc0 = bfs_ecc(first_big);
  if (ecc0 > limit) {
    detail->short_connections = false;
  } else if (2 * ecc0 <= limit) {
    detail->short_connections = true;
  } else {
    detail->short_connections = true;
    for (int32_t idx = 0; idx < g.n && detail->short_connections; ++idx)
      if (plabel[idx] == big && bfs_ecc(idx) > limit) detail->short_connections = false;
  }

  // (iv) every q-open component disjoint from the big cluster has < N1 edges.
  std::vector<int32_t> qlabel;
  int32_t qcount = label_components(
      g, [&](int32_t idx, int axis) { return view_.q_open(window_slot(idx, axis)); }, &qlabel);
  std::vector<int64_t> qedges(qcount, 0);
  std::vector<uint8_t> qtouch(qcount, 0);
  for (int32_t idx = 0; idx < g.n; ++idx) {
    if (plabel[idx] == big) qtouch[qlabel[idx]] = 1;
    for (int axis = 0; axis < d; ++axis) {
      int32_t up = g.neighbor(idx, axis, +1);
      if (up >= 0 && view_.q_open(window_slot(idx, axis)) && qlabel[up] == qlabel[idx])
        ++qedges[qlabel[idx]];
    }
  }
  detail->no_large_disjoint = true;
  for (int32_t c = 0; c < qcount; ++c)
    if (!qtouch[c] && qedges[c] >= n1) detail->no_large_disjoint = false;

  bool good = detail->unique_big_cluster && detail->all_subboxes_crossing &&
              detail->short_connections && detail->no_large_disjoint;
  detail->verdict = good ? Verdict::kGood : Verdict::kBad;
  return detail->verdict;
}

Verdict BoxStateCache::compute_scale_k(int scale, const Point& site) {
  int64_t lk = h_->l_at(scale);
  int d = h_->d;
  Point lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = site[i] * lk + box_lo(3 * lk);
    hi[i] = site[i] * lk + box_hi(3 * lk);
  }
  bool saw_unevaluated = false;
  auto offs = l1_neighbor_offsets(d);
  PointSet visited_global;
  bool bad = false;
  for_each_in_bounds(lo, hi, [&](const Point& j) {
    if (bad) return;
    Verdict vj = verdict(scale - 1, j);
    if (vj == Verdict::kGood) return;
    if (visited_global.count(j)) return;
    // Capped flood over bad-or-unevaluated sites at scale-1 below.
    std::deque<Point> queue{j};
    PointSet comp{j};
    bool contaminated = (vj == Verdict::kUnevaluated);
    while (!queue.empty() && static_cast<int64_t>(comp.size()) <= lk) {
      Point p = queue.front();
      queue.pop_front();
      for (const Point& o : offs) {
        Point q = p + o;
        if (comp.count(q)) continue;
        Verdict vq = verdict(scale - 1, q);
        if (vq == Verdict::kGood) continue;
        if (vq == Verdict::kUnevaluated) contaminated = true;
        comp.insert(q);
        queue.push_back(q);
        if (static_cast<int64_t>(comp.size()) > lk) break;
      }
    }
    if (static_cast<int64_t>(comp.size()) > lk) {
      bad = true;  // conservative: unevaluated counted as bad
      return;
    }
    if (contaminated) saw_unevaluated = true;
    for (const Point& p : comp) visited_global.insert(p);
  });
  if (bad) return Verdict::kBad;
  if (saw_unevaluated) return Verdict::kUnevaluated;
  return Verdict::kGood;
}

BadClusterInfo BoxStateCache::bad_cluster(int scale, const Point& site) {
  BadClusterInfo info;
  Verdict v = verdict(scale, site);
  if (v == Verdict::kGood) return info;
  auto offs = l1_neighbor_offsets(h_->d);
  PointSet comp{site};
  std::deque<Point> queue{site};
  info.contaminated = (v == Verdict::kUnevaluated);
  constexpr size_t kClusterCap = 1 << 20;
  while (!queue.empty()) {
    Point p = queue.front();
    queue.pop_front();
    for (const Point& o : offs) {
      Point q = p + o;
      if (comp.count(q)) continue;
      Verdict vq = verdict(scale, q);
      if (vq == Verdict::kGood) continue;
      if (vq == Verdict::kUnevaluated) info.contaminated = true;
      comp.insert(q);
      queue.push_back(q);
      invariant(comp.size() < kClusterCap, "bad cluster exceeds sanity cap");
    }
  }
  info.sites = to_site_set(comp);
  return info;
}

SiteSet trace_sites(const LatticePath& path, int k, const ScaleHierarchy& h) {
  PointSet sites;
  for (const Point& v : path.vertices()) sites.insert(h.site_of(v, k));
  return to_site_set(sites);
}

TraceResult trace(const LatticePath& path, int k, BoxStateCache& cache) {
  const ScaleHierarchy& h = cache.hierarchy();
  TraceResult res;
  res.sites = trace_sites(path, k, h);
  for (const Point& s : res.sites)
    if (cache.verdict(k, s) != Verdict::kGood) ++res.bad_count;
  double bound = std::pow(3.0, h.d) *
                 (1.0 + (static_cast<double>(path.length()) + 1.0) /
                            u128_to_double(h.scale_side(k)));
  invariant(static_cast<double>(res.sites.size()) <= bound,
            "trace bound violated at scale " + std::to_string(k));
  return res;
}

ScaleHorizon scale_horizon(const LatticePath& path, BoxStateCache& cache) {
  ScaleHorizon res;
  for (int k = 1; k <= cache.hierarchy().depth(); ++k) {
    TraceResult t = trace(path, k, cache);
    res.bad_counts.push_back(t.bad_count);
    if (t.bad_count == 0) {
      res.M = k;
      return res;
    }
  }
  res.exceeds_depth = true;
  return res;
}

SiteSet extract_spread_subset(const SiteSet& gamma, int64_t R) {
  require(R >= 1, "spread extraction needs R >= 1");
  if (gamma.empty()) return gamma;
  int d = gamma.members().front().dim();
  // Partition by residue class modulo R; keep the densest class
  // (lexicographically smallest residue wins ties).
  std::map<std::vector<int64_t>, std::vector<Point>> classes;
  for (const Point& p : gamma) {
    std::vector<int64_t> key(d);
    for (int i = 0; i < d; ++i) key[i] = ((p[i] % R) + R) % R;
    classes[key].push_back(p);
  }
  const std::vector<Point>* best = nullptr;
  for (const auto& [key, pts] : classes)
    if (!best || pts.size() > best->size()) best = &pts;
  SiteSet result{std::vector<Point>(*best)};
  invariant(result.size() * static_cast<size_t>(std::pow(static_cast<double>(R), d)) >=
                gamma.size(),
            "spread subset smaller than |gamma| / R^d");
  return result;
}

void dump_verdicts_csv(BoxStateCache& cache, const std::vector<std::pair<int, SiteSet>>& evaluated,
                       const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "w");
  require(fp != nullptr, "cannot open verdict dump: " + path);
  std::fprintf(fp, "scale,site,verdict,cluster_id\n");
  for (const auto& [scale, sites] : evaluated) {
    // Bad-cluster ids per scale: index components of the bad sites in order.
    std::vector<Point> bad;
    for (const Point& s : sites)
      if (cache.verdict(scale, s) != Verdict::kGood) bad.push_back(s);
    auto comps = l1_components(SiteSet(bad));
    auto cluster_id = [&](const Point& s) -> int {
      for (size_t i = 0; i < comps.size(); ++i)
        if (comps[i].contains(s)) return static_cast<int>(i);
      return -1;
    };
    for (const Point& s : sites) {
      Verdict v = cache.verdict(scale, s);
      std::string coords;
      for (int i = 0; i < s.dim(); ++i) coords += (i ? " " : "") + std::to_string(s[i]);
      std::fprintf(fp, "%d,%s,%s,%d\n", scale, coords.c_str(), verdict_name(v),
                   v == Verdict::kGood ? -1 : cluster_id(s));
    }
  }
  std::fclose(fp);
}

}  // namespace percolab
