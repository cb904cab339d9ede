#include "percolab/bypass.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace percolab {

const char* detour_failure_name(DetourFailure f) {
  switch (f) {
    case DetourFailure::kNone: return "none";
    case DetourFailure::kMissingShell: return "missing_shell";
    case DetourFailure::kNoRingVisit: return "no_ring_visit";
    case DetourFailure::kIntervalOverlap: return "interval_overlap";
    case DetourFailure::kEntryPortionShort: return "entry_portion_short";
    case DetourFailure::kNoClusterVertex: return "no_cluster_vertex";
    case DetourFailure::kResidualForbiddenEdge: return "residual_forbidden_edge";
  }
  return "?";
}

namespace {

// BFS inside a box region over masked-p-open edges, skipping `avoid` vertices.
std::optional<LatticePath> bfs_in_box(const MaskedConfigView& view, const BoxBounds& region,
                                      const Point& from, const Point& to, const PointSet& avoid) {
  const Window& w = view.window();
  std::unordered_map<Point, Point, PointHash> parent;
  std::vector<Point> queue{from};
  parent.emplace(from, from);
  if (avoid.count(from) || avoid.count(to)) return std::nullopt;
  size_t head = 0;
  auto offs = l1_neighbor_offsets(from.dim());
  while (head < queue.size()) {
    Point v = queue[head++];
    if (v == to) break;
    for (const Point& o : offs) {
      Point nb = v + o;
      if (!region.contains(nb) || !w.contains(nb) || avoid.count(nb) || parent.count(nb)) continue;
      Edge e(v, nb);
      if (!view.p_open(w.slot_of_edge(e))) continue;
      parent.emplace(nb, v);
      queue.push_back(nb);
    }
  }
  if (!parent.count(to)) return std::nullopt;
  std::vector<Point> vs{to};
  while (!(vs.back() == from)) vs.push_back(parent.at(vs.back()));
  std::reverse(vs.begin(), vs.end());
  return LatticePath(std::move(vs));
}

}  // namespace

LatticePath link_through_good_boxes(const SiteSet& boxes, const Point& start,
                                    const Point& start_site, const Point& end,
                                    const Point& end_site, const PointSet& avoid,
                                    BoxStateCache& cache) {
  const ScaleHierarchy& h = cache.hierarchy();
  int64_t n1 = h.scale_side_i64(1);
  int64_t per_join = static_cast<int64_t>(std::floor(12.0 * h.beta * static_cast<double>(n1)));
  invariant(boxes.contains(start_site) && boxes.contains(end_site),
            "link endpoints' sites must belong to the box set");

  if (start == end) return LatticePath();

  // Self-avoiding *-path of sites from start_site to end_site: BFS in the
  // *-adjacency graph of the set (shortest, hence self-avoiding).
  std::unordered_map<Point, Point, PointHash> parent;
  std::vector<Point> queue{start_site};
  parent.emplace(start_site, start_site);
  auto offs = star_neighbor_offsets(start.dim());
  size_t head = 0;
  while (head < queue.size()) {
    Point v = queue[head++];
    if (v == end_site) break;
    for (const Point& o : offs) {
      Point nb = v + o;
      if (!boxes.contains(nb) || parent.count(nb)) continue;
      parent.emplace(nb, v);
      queue.push_back(nb);
    }
  }
  invariant(parent.count(end_site) != 0, "box set not *-connected between link endpoints");
  std::vector<Point> site_path{end_site};
  while (!(site_path.back() == start_site)) site_path.push_back(parent.at(site_path.back()));
  std::reverse(site_path.begin(), site_path.end());

  // Waypoints: start, one crossing-cluster anchor per site after the first,
  // end. Join l runs inside the enlarged box of site_path[l]; its endpoints
  // both sit in that box's big cluster (the anchor of an adjacent box glues
  // into it through the shared crossing component), so the short-connection
  // property bounds every join by 12 beta N1. That makes r joins for r sites,
  // within the 12 beta N1 |I| budget.
  size_t r = site_path.size();
  std::vector<Point> waypoints;
  waypoints.push_back(start);
  for (size_t l = 1; l < r; ++l) {
    const CrossingClusterInfo& info = cache.crossing_cluster(site_path[l]);
    invariant(info.anchor.has_value(), "good box missing crossing-cluster anchor");
    waypoints.push_back(*info.anchor);
  }
  waypoints.push_back(end);

  std::vector<Point> vertices{start};
  for (size_t l = 0; l + 1 < waypoints.size(); ++l) {
    Point a = waypoints[l];
    Point b = waypoints[l + 1];
    if (a == b) continue;
    BoxBounds bprime = box_bounds_raw(site_path[std::min(l, r - 1)], n1, /*enlarged=*/true);
    auto seg = bfs_in_box(cache.view(), bprime, a, b, avoid);
    invariant(seg.has_value(), "anchor join unreachable; verdicts corrupt");
    invariant(static_cast<int64_t>(seg->length()) <= per_join,
              "anchor join exceeds 12 beta N1; verdicts corrupt");
    const auto& vs = seg->vertices();
    vertices.insert(vertices.end(), vs.begin() + 1, vs.end());
  }
  LatticePath link(std::move(vertices));
  invariant(static_cast<int64_t>(link.length()) <=
                per_join * static_cast<int64_t>(boxes.size()),
            "link length exceeds 12 beta N1 |I|");
  for (const Point& v : link.vertices())
    invariant(!avoid.count(v), "link visits an avoided vertex");
  return link;
}

namespace {

struct ComponentPlan {
  SiteSet interior;
  SiteSet ring;
  int64_t first_visit = -1, last_visit = -1;  // path indices into vertices
  size_t order = 0;
};

LatticePath loop_erase(const std::vector<Point>& vs) {
  std::vector<Point> out;
  std::unordered_map<Point, size_t, PointHash> pos;
  for (const Point& v : vs) {
    auto it = pos.find(v);
    if (it != pos.end()) {
      // revisit: truncate the loop
      for (size_t i = it->second + 1; i < out.size(); ++i) pos.erase(out[i]);
      out.resize(it->second + 1);
    } else {
      pos.emplace(v, out.size());
      out.push_back(v);
    }
  }
  return LatticePath(std::move(out));
}

}  // namespace

DetourOutcome build_detour(const LatticePath& path, const std::vector<Edge>& forbidden,
                           const ShellFamily& family, BoxStateCache& cache) {
  const ScaleHierarchy& h = cache.hierarchy();
  const MaskedConfigView& view = cache.view();
  const Window& w = view.window();
  DetourOutcome out;

  if (forbidden.empty()) {
    DetourResult res;
    res.path = path;
    out.result = std::move(res);
    return out;
  }

  // Shell lookup per forbidden edge.
  std::map<Edge, const Shell*> shell_of;
  for (const Shell& s : family.shells) shell_of.emplace(s.edge, &s);
  long double budget_sum = 0;
  for (const Edge& e : forbidden) {
    auto it = shell_of.find(e);
    if (it == shell_of.end()) {
      out.reason = DetourFailure::kMissingShell;
      out.detail = e.str();
      return out;
    }
    budget_sum += static_cast<long double>(it->second->geom->boxes.size());
  }

  // Merge the interiors and split into L1-connected components.
  PointSet merged;
  for (const Edge& e : forbidden)
    for (const Point& p : shell_of.at(e)->geom->interior_sites) merged.insert(p);
  std::vector<SiteSet> comps = l1_components(to_site_set(merged));

  std::vector<ComponentPlan> plans;
  for (auto& comp : comps) {
    ComponentPlan plan;
    plan.ring = exterior_boundary(comp);
    plan.interior = std::move(comp);
    plans.push_back(std::move(plan));
  }

  // The rings stay clear of every forbidden edge by the shell distance
  // guarantee; re-check the required gap before linking.
  int64_t n1 = h.scale_side_i64(1);
  double gap = (14.0 * h.beta + 2.0 * h.d) * static_cast<double>(n1);
  for (const ComponentPlan& plan : plans)
    for (const Point& s : plan.ring) {
      BoxBounds b = box_bounds_raw(s, n1, false);
      for (const Edge& e : forbidden) {
        int64_t dd = std::min(dist_point_to_box(e.a, b), dist_point_to_box(e.b, b));
        invariant(static_cast<double>(dd) >= gap,
                  "ring box too close to a forbidden edge; shells inconsistent");
      }
    }

  // Walk the path once, recording first/last visits to each component's
  // territory (ring or interior at scale 1).
  const auto& verts = path.vertices();
  for (size_t i = 0; i < verts.size(); ++i) {
    Point site = h.site_of(verts[i], 1);
    for (ComponentPlan& plan : plans) {
      if (plan.ring.contains(site) || plan.interior.contains(site)) {
        if (plan.first_visit < 0) plan.first_visit = static_cast<int64_t>(i);
        plan.last_visit = static_cast<int64_t>(i);
      }
    }
  }
  for (ComponentPlan& plan : plans) {
    if (plan.first_visit < 0) {
      out.reason = DetourFailure::kNoRingVisit;
      out.detail = "component never visited by the path";
      return out;
    }
    Point fs = h.site_of(verts[plan.first_visit], 1);
    Point ls = h.site_of(verts[plan.last_visit], 1);
    if (!plan.ring.contains(fs) || !plan.ring.contains(ls)) {
      out.reason = DetourFailure::kNoRingVisit;
      out.detail = "path enters a component without touching its ring";
      return out;
    }
  }

  // Order components by first visit and demand disjoint visit intervals;
  // interleaved intervals are a counted construction failure.
  std::sort(plans.begin(), plans.end(),
            [](const ComponentPlan& a, const ComponentPlan& b) {
              return a.first_visit < b.first_visit;
            });
  for (size_t k = 0; k + 1 < plans.size(); ++k)
    if (plans[k].last_visit >= plans[k + 1].first_visit) {
      out.reason = DetourFailure::kIntervalOverlap;
      return out;
    }

  // Avoid set: the endpoints of the forbidden edges.
  PointSet avoid;
  for (const Edge& e : forbidden) {
    avoid.insert(e.a);
    avoid.insert(e.b);
  }

  // Entry/exit anchors per component, then splice.
  std::vector<Point> spliced;
  size_t resume = 0;  // index into verts from which the kept portion starts
  DetourResult res;
  res.length_budget = 12.0L * h.beta * static_cast<long double>(n1) * budget_sum;

  for (ComponentPlan& plan : plans) {
    int64_t f = plan.first_visit, g = plan.last_visit;
    Point b_in = h.site_of(verts[f], 1);
    Point b_out = h.site_of(verts[g], 1);

    // Contiguous path portion inside B'(b_in) around f.
    BoxBounds bp_in = box_bounds_raw(b_in, n1, true);
    int64_t a0 = f;
    while (a0 > 0 && bp_in.contains(verts[a0 - 1])) --a0;
    int64_t a1 = f;
    while (a1 + 1 < static_cast<int64_t>(verts.size()) && bp_in.contains(verts[a1 + 1])) ++a1;
    if (a1 - a0 < n1) {
      out.reason = DetourFailure::kEntryPortionShort;
      return out;
    }
    const CrossingClusterInfo& cin = cache.crossing_cluster(b_in);
    // Prefer an anchor at or before the first territory visit so the kept
    // prefix cannot pick up a forbidden edge; fall back to the full portion
    // (the final forbidden-edge check guards the fallback).
    int64_t i_in = -1;
    for (int64_t i = a0; i <= f && i_in < 0; ++i)
      if (cin.contains(verts[i])) i_in = i;
    for (int64_t i = f + 1; i <= a1 && i_in < 0; ++i)
      if (cin.contains(verts[i])) i_in = i;
    if (i_in < 0) {
      out.reason = DetourFailure::kNoClusterVertex;
      return out;
    }

    BoxBounds bp_out = box_bounds_raw(b_out, n1, true);
    int64_t c0 = g;
    while (c0 > 0 && bp_out.contains(verts[c0 - 1])) --c0;
    int64_t c1 = g;
    while (c1 + 1 < static_cast<int64_t>(verts.size()) && bp_out.contains(verts[c1 + 1])) ++c1;
    if (c1 - c0 < n1) {
      out.reason = DetourFailure::kEntryPortionShort;
      return out;
    }
    const CrossingClusterInfo& cout = cache.crossing_cluster(b_out);
    int64_t i_out = -1;
    for (int64_t i = c1; i >= g && i_out < 0; --i)
      if (cout.contains(verts[i])) i_out = i;
    for (int64_t i = g - 1; i >= c0 && i_out < 0; --i)
      if (cout.contains(verts[i])) i_out = i;
    if (i_out < 0) {
      out.reason = DetourFailure::kNoClusterVertex;
      return out;
    }
    if (i_in > i_out) {
      // Degenerate overlap of entry and exit portions.
      out.reason = DetourFailure::kIntervalOverlap;
      out.detail = "entry anchor after exit anchor";
      return out;
    }

    LatticePath link = link_through_good_boxes(plan.ring, verts[i_in], b_in, verts[i_out], b_out,
                                               avoid, cache);
    res.link_lengths.push_back(static_cast<int64_t>(link.length()));
    ++res.components_bypassed;

    for (size_t i = resume; i <= static_cast<size_t>(i_in); ++i) spliced.push_back(verts[i]);
    if (!link.vertices().empty())
      spliced.insert(spliced.end(), link.vertices().begin() + 1, link.vertices().end());
    invariant(verts[i_out] == spliced.back(), "link must end on the exit anchor");
    resume = static_cast<size_t>(i_out) + 1;
  }
  for (size_t i = resume; i < verts.size(); ++i) spliced.push_back(verts[i]);

  res.path = loop_erase(spliced);

  // Verify every invariant of the result.
  invariant(res.path.vertices().front() == verts.front() &&
                res.path.vertices().back() == verts.back(),
            "detour endpoints differ from the original path");
  std::set<Edge> original;
  for (const Edge& e : path.edges()) original.insert(e);
  std::set<Edge> forbidden_set(forbidden.begin(), forbidden.end());
  std::set<Edge> detour_edges;
  for (const Edge& e : res.path.edges()) detour_edges.insert(e);
  for (const Edge& e : detour_edges)
    if (forbidden_set.count(e)) {
      out.reason = DetourFailure::kResidualForbiddenEdge;
      out.detail = e.str();
      return out;
    }
  for (const Edge& e : detour_edges)
    if (!original.count(e)) res.added_edges.push_back(e);
  for (const Edge& e : original)
    if (!detour_edges.count(e)) res.removed_edges.push_back(e);
  for (const Edge& e : res.added_edges)
    invariant(view.p_open(w.slot_of_edge(e)), "added detour edge not p-open under the masked view");
  invariant(static_cast<long double>(res.added_edges.size()) <= res.length_budget,
            "detour added length exceeds 12 beta N1 sum |shell|");

  out.result = std::move(res);
  return out;
}

ConstructiveSample constructive_distance_bound(const Window& window, double p, double q,
                                               int64_t n, const Point& x_dir,
                                               const ScaleHierarchy& h, uint64_t seed) {
  ConstructiveSample s;
  s.seed = seed;
  require(0.0 < p && p <= q && q <= 1.0, "constructive bound needs 0 < p <= q <= 1");
  Point origin = Point::zero(window.dim());
  Point target = x_dir.scaled(n);
  require(window.contains(target), "n x outside window");

  // Stage 1: sample V/Z, regularize endpoints on the masked-p giant, find the
  // q-geodesic. None of this reads any W state.
  CoupledConfig cfg0 = three_rv_coupling(window, p, q, LatticePath(), seed);
  ClusterLabeling plab = cluster_labeling(
      window, [&](uint64_t slot) { return cfg0.p_open_masked(slot); });
  uint32_t giant = giant_cluster(plab);
  Point src = regularize(origin, plab, giant);
  Point dst = regularize(target, plab, giant);
  GeodesicResult qgeo = chemical_distance(
      window, [&](uint64_t slot) { return cfg0.q_open(slot); }, src, dst);
  if (!qgeo.reachable) {
    s.discarded = true;
    s.discard_reason = "q-endpoints unreachable";
    return s;
  }
  s.d_q = qgeo.distance;
  s.gamma_length = qgeo.path.length();

  // Stage 2: verdicts from the masked view; horizon and trim.
  MaskedConfigView masked(cfg0);
  BoxStateCache cache(masked, h);
  ShellFamily family = shells_for_path(qgeo.path, cache, src, dst);
  s.horizon_exceeded = family.horizon_exceeded;
  if (family.horizon_exceeded) {
    s.discarded = true;
    s.discard_reason = "scale horizon exceeds hierarchy depth";
    return s;
  }
  s.M = family.M;
  s.trimmed_count = family.trimmed_edges.size();
  s.shells_built = family.built;
  s.shells_dropped = family.dropped;
  s.shells_inapplicable = family.inapplicable;

  // Stage 3: designate the trimmed path: those edges draw their true p-state
  // from W. Same seed, so V and Z are reproduced bit-identically.
  CoupledConfig cfg = three_rv_coupling_edges(window, p, q, family.trimmed_edges, seed);

  std::vector<Edge> closed;
  for (const Edge& e : family.trimmed_edges)
    if (!cfg.p_open(window.slot_of_edge(e))) closed.push_back(e);
  s.closed_on_trimmed = closed.size();

  // Only edges with built shells can be routed; anything else sends the
  // sample down the full-stitch fallback.
  std::map<Edge, bool> has_shell;
  for (const Shell& sh : family.shells) has_shell[sh.edge] = true;
  std::vector<Edge> routable;
  for (const Edge& e : closed)
    if (has_shell.count(e)) routable.push_back(e);
  bool full_cover = routable.size() == closed.size();
  s.bypassed = routable.size();
  for (const Edge& e : routable)
    for (const Shell& sh : family.shells)
      if (sh.edge == e) {
        s.sum_shell_sizes += static_cast<long double>(sh.geom->boxes.size());
        break;
      }

  LatticePath witness = qgeo.path;
  if (full_cover && !routable.empty()) {
    DetourOutcome det = build_detour(qgeo.path, routable, family, cache);
    if (det.result) {
      witness = det.result->path;
      s.added = static_cast<int64_t>(det.result->added_edges.size());
      s.removed = static_cast<int64_t>(det.result->removed_edges.size());
      s.components = det.result->components_bypassed;
    } else {
      full_cover = false;  // counted through the fallback below
    }
  }

  auto p_true_open = [&](uint64_t slot) { return cfg.p_open(slot); };
  GeodesicResult pfull = chemical_distance(window, p_true_open, src, dst);
  if (!pfull.reachable) {
    s.discarded = true;
    s.discard_reason = "p-endpoints unreachable";
    return s;
  }
  s.d_p = pfull.distance;

  // Stage 4: stitch. Walk the witness; its p-closed edges live only inside
  // the two trim boxes, so splicing BFS segments from the regularized
  // endpoints to the first/last exits yields a true p-open witness.
  int64_t trim_side = 4 * h.scale_side_i64(s.M);
  auto in_ball = [&](const Point& v, const Point& center) {
    for (int i = 0; i < v.dim(); ++i) {
      int64_t off = v[i] - center[i];
      if (off < box_lo(trim_side) || off > box_hi(trim_side)) return false;
    }
    return true;
  };
  bool fallback = !full_cover;
  int64_t y_idx = -1, z_idx = -1;
  const auto& wv = witness.vertices();
  if (!fallback) {
    for (size_t i = 0; i < wv.size(); ++i) {
      if (!in_ball(wv[i], src) && !in_ball(wv[i], dst)) {
        if (y_idx < 0) y_idx = static_cast<int64_t>(i);
        z_idx = static_cast<int64_t>(i);
      }
    }
    if (y_idx < 0) {
      fallback = true;  // the witness never leaves the trim boxes
    } else {
      for (int64_t i = y_idx; i < z_idx && !fallback; ++i)
        if (!cfg.p_open(window.slot_of_edge(Edge(wv[i], wv[i + 1])))) fallback = true;
    }
  }
  if (!fallback) {
    GeodesicResult s0 = chemical_distance(window, p_true_open, src, wv[y_idx]);
    GeodesicResult s1 = chemical_distance(window, p_true_open, wv[z_idx], dst);
    if (s0.reachable && s1.reachable) {
      s.stitch = s0.distance + s1.distance;
    } else {
      fallback = true;
    }
  }
  if (fallback) {
    s.stitch = pfull.distance;
    s.stitch_fallback = true;
  }

  s.inequality_ok = s.d_p <= s.d_q + s.added + s.stitch;
  return s;
}

}  // namespace percolab
