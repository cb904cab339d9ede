#include "percolab/shells.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "json.hpp"

namespace percolab {

const char* shell_failure_name(ShellFailure f) {
  switch (f) {
    case ShellFailure::kNone: return "none";
    case ShellFailure::kHorizonExceeded: return "horizon_exceeded";
    case ShellFailure::kDepthInsufficient: return "depth_insufficient";
    case ShellFailure::kBoundaryUnevaluated: return "boundary_unevaluated";
    case ShellFailure::kEndpointDistance: return "endpoint_distance";
    case ShellFailure::kShellSiteNotGood: return "shell_site_not_good";
    case ShellFailure::kBoundaryIdentity: return "boundary_identity";
    case ShellFailure::kEdgeDistance: return "edge_distance";
    case ShellFailure::kSizeBound: return "size_bound";
  }
  return "?";
}

bool shell_failure_is_domain(ShellFailure f) {
  switch (f) {
    case ShellFailure::kHorizonExceeded:
    case ShellFailure::kDepthInsufficient:
    case ShellFailure::kBoundaryUnevaluated:
    case ShellFailure::kEndpointDistance:
      return true;
    default:
      return false;
  }
}

KOfEdgeResult k_of_edge(const Edge& e, BoxStateCache& cache, int horizon_m) {
  const ScaleHierarchy& h = cache.hierarchy();
  KOfEdgeResult res;
  if (h.depth() < 3) {
    res.reason = ShellFailure::kDepthInsufficient;
    return res;
  }
  Verdict v3 = cache.verdict(3, h.site_of(e.a, 3));
  if (v3 == Verdict::kUnevaluated) {
    res.reason = ShellFailure::kBoundaryUnevaluated;
    return res;
  }
  if (v3 == Verdict::kGood) {
    res.ok = true;
    res.k = 2;
    return res;
  }
  // Walk the bad chain e_3, e_4, ... to its last bad scale.
  int k = 3;
  while (true) {
    if (k >= horizon_m) {
      res.reason = ShellFailure::kHorizonExceeded;
      return res;
    }
    if (k + 1 > h.depth()) {
      res.reason = ShellFailure::kDepthInsufficient;
      return res;
    }
    Verdict vn = cache.verdict(k + 1, h.site_of(e.a, k + 1));
    if (vn == Verdict::kUnevaluated) {
      res.reason = ShellFailure::kBoundaryUnevaluated;
      return res;
    }
    if (vn == Verdict::kGood) {
      res.ok = true;
      res.k = k;
      return res;
    }
    ++k;
  }
}

namespace {

/// Scale-(j-1) sites whose boxes meet B_{N_j}(i); exact tiling for odd l_j,
/// a one-site-per-axis overcover otherwise.
void covering_refine(const Point& i, int j, const ScaleHierarchy& h, PointSet* out) {
  int64_t nj = h.scale_side_i64(j);
  int64_t njm1 = h.scale_side_i64(j - 1);
  int d = i.dim();
  Point lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    int64_t span_lo = i[a] * nj + box_lo(nj);
    int64_t span_hi = i[a] * nj + box_hi(nj);
    lo[a] = box_index_of(span_lo, njm1);
    hi[a] = box_index_of(span_hi, njm1);
  }
  for_each_in_bounds(lo, hi, [&](const Point& p) { out->insert(p); });
}

}  // namespace

long double shell_size_bound(int k, const ScaleHierarchy& h) {
  int d = h.d;
  long double nk = u128_to_double(h.scale_side(k));
  long double n1 = u128_to_double(h.scale_side(1));
  return 2.0L * d * std::pow(3.0L, d) * std::pow(3.0L * d, k) *
         static_cast<long double>(h.l_at(k + 1)) * std::pow(nk / n1, d + 1);
}

int64_t shell_edge_distance(const ShellGeometry& geom, const Edge& e, const ScaleHierarchy& h) {
  int64_t n1 = h.scale_side_i64(1);
  int64_t best = INT64_MAX;
  for (const Point& s : geom.boxes) {
    BoxBounds b = box_bounds_raw(s, n1, false);
    best = std::min(best, std::min(dist_point_to_box(e.a, b), dist_point_to_box(e.b, b)));
  }
  return best;
}

int64_t interior_distance(const ShellGeometry& geom, const std::vector<Point>& targets,
                          const ScaleHierarchy& h) {
  int64_t n1 = h.scale_side_i64(1);
  int64_t best = INT64_MAX;
  for (const Point& s : geom.interior_sites) {
    BoxBounds b = box_bounds_raw(s, n1, false);
    for (const Point& t : targets) best = std::min(best, dist_point_to_box(t, b));
  }
  return best;
}

ShellOutcome build_shell(const Edge& e, int k_e, BoxStateCache& cache, const Point& src,
                         const Point& dst) {
  const ScaleHierarchy& h = cache.hierarchy();
  ShellOutcome out;
  if (k_e + 1 > h.depth()) {
    out.reason = ShellFailure::kDepthInsufficient;
    return out;
  }
  int d = h.d;
  require(static_cast<double>(h.l_at(2)) >= 14.0 * h.beta + 2.0 * d,
          "shell construction requires l2 >= 14 beta + 2d");

  // B': the L-infinity ball of radius 1 around e_k, sites at scale k_e.
  Point ek = h.site_of(e.a, k_e);
  PointSet lambda;
  Point one(d);
  for (int i = 0; i < d; ++i) one[i] = 1;
  for_each_in_bounds(ek - one, ek + one, [&](const Point& p) { lambda.insert(p); });

  // Glue the bad clusters hanging off the boundary of B'; the good site at
  // scale k_e + 1 over the edge bounds each of them by l_{k_e+1}.
  SiteSet bprime = to_site_set(lambda);
  for (const Point& i : exterior_boundary(bprime)) {
    BadClusterInfo cl = cache.bad_cluster(k_e, i);
    if (cl.contaminated) {
      out.reason = ShellFailure::kBoundaryUnevaluated;
      return out;
    }
    invariant(static_cast<int64_t>(cl.sites.size()) <= h.l_at(k_e + 1),
              "bad cluster exceeds l_{k+1} despite good site above; verdicts corrupt");
    for (const Point& p : cl.sites) lambda.insert(p);
  }

  // Descend: refine to the next scale down, then glue that scale's bad
  // clusters along the refined boundary.
  for (int j = k_e; j >= 2; --j) {
    PointSet refined;
    for (const Point& i : lambda) covering_refine(i, j, h, &refined);
    SiteSet refined_set = to_site_set(refined);
    for (const Point& i : exterior_boundary(refined_set)) {
      BadClusterInfo cl = cache.bad_cluster(j - 1, i);
      if (cl.contaminated) {
        out.reason = ShellFailure::kBoundaryUnevaluated;
        return out;
      }
      for (const Point& p : cl.sites) refined.insert(p);
    }
    lambda = std::move(refined);
  }

  auto geom = std::make_shared<ShellGeometry>();
  geom->k = k_e;
  SiteSet lambda1 = to_site_set(lambda);
  geom->boxes = exterior_boundary(lambda1);
  geom->interior_sites = interior(geom->boxes);

  // (a) every shell site is good at scale 1, re-checked against the cache.
  for (const Point& s : geom->boxes)
    if (cache.verdict(1, s) != Verdict::kGood) {
      out.reason = cache.verdict(1, s) == Verdict::kUnevaluated
                       ? ShellFailure::kBoundaryUnevaluated
                       : ShellFailure::kShellSiteNotGood;
      return out;
    }

  // Shell identity: the ring is the exterior boundary of its interior.
  if (!(exterior_boundary(geom->interior_sites) == geom->boxes)) {
    out.reason = ShellFailure::kBoundaryIdentity;
    return out;
  }

  // (b) distance from the shell to the edge.
  double threshold_b = (14.0 * h.beta + 2.0 * d) * static_cast<double>(h.scale_side_i64(1));
  if (static_cast<double>(shell_edge_distance(*geom, e, h)) < threshold_b) {
    out.reason = ShellFailure::kEdgeDistance;
    return out;
  }

  // (c) distance from the fattened interior to the path endpoints.
  if (interior_distance(*geom, {src, dst}, h) < h.scale_side_i64(1)) {
    out.reason = ShellFailure::kEndpointDistance;
    return out;
  }

  // (d) per-edge size bound.
  if (static_cast<long double>(geom->boxes.size()) > shell_size_bound(k_e, h)) {
    out.reason = ShellFailure::kSizeBound;
    return out;
  }

  out.shell = Shell{e, k_e, geom};
  return out;
}

ShellFamily shells_for_path(const LatticePath& path, BoxStateCache& cache, const Point& src,
                            const Point& dst) {
  const ScaleHierarchy& h = cache.hierarchy();
  ShellFamily family;
  ScaleHorizon horizon = scale_horizon(path, cache);
  family.bad_counts = horizon.bad_counts;
  if (horizon.exceeds_depth) {
    family.horizon_exceeded = true;
    return family;
  }
  family.M = horizon.M;

  // Trim: drop every edge with an endpoint in one of the two boxes of side
  // 4 N_M around the path's endpoints.
  int64_t trim_side = 4 * h.scale_side_i64(family.M);
  auto in_ball = [&](const Point& v, const Point& center) {
    for (int i = 0; i < v.dim(); ++i) {
      int64_t off = v[i] - center[i];
      if (off < box_lo(trim_side) || off > box_hi(trim_side)) return false;
    }
    return true;
  };
  for (const Edge& e : path.edges()) {
    bool trimmed = in_ball(e.a, src) || in_ball(e.a, dst) || in_ball(e.b, src) || in_ball(e.b, dst);
    if (!trimmed) family.trimmed_edges.push_back(e);
  }

  // Deduplicate geometry: edges with the same k(e) start the descent from the
  // same scale-k site and share the shell.
  std::map<std::pair<int, Point>, std::shared_ptr<const ShellGeometry>> built_geoms;
  std::map<std::pair<int, Point>, ShellFailure> failed_geoms;
  for (const Edge& e : family.trimmed_edges) {
    EdgeShellRecord rec;
    rec.edge = e;
    KOfEdgeResult ke = k_of_edge(e, cache, family.M);
    if (!ke.ok) {
      rec.status = EdgeShellRecord::Status::kInapplicable;
      rec.reason = ke.reason;
      ++family.inapplicable;
      family.records.push_back(rec);
      continue;
    }
    auto key = std::make_pair(ke.k, h.site_of(e.a, ke.k));
    std::shared_ptr<const ShellGeometry> geom;
    ShellFailure geom_reason = ShellFailure::kNone;
    if (auto it = built_geoms.find(key); it != built_geoms.end()) {
      geom = it->second;
    } else if (auto fit = failed_geoms.find(key); fit != failed_geoms.end()) {
      geom_reason = fit->second;
    } else {
      ShellOutcome outcome = build_shell(e, ke.k, cache, src, dst);
      if (outcome.shell) {
        geom = outcome.shell->geom;
        built_geoms[key] = geom;
      } else {
        geom_reason = outcome.reason;
        failed_geoms[key] = geom_reason;
      }
    }
    if (!geom) {
      rec.status = EdgeShellRecord::Status::kDropped;
      rec.reason = geom_reason;
      ++family.dropped;
      family.records.push_back(rec);
      continue;
    }
    // Post (b) is per edge even when the geometry is shared.
    double threshold_b = (14.0 * h.beta + 2.0 * h.d) * static_cast<double>(h.scale_side_i64(1));
    if (static_cast<double>(shell_edge_distance(*geom, e, h)) < threshold_b) {
      rec.status = EdgeShellRecord::Status::kDropped;
      rec.reason = ShellFailure::kEdgeDistance;
      ++family.dropped;
      family.records.push_back(rec);
      continue;
    }
    rec.status = EdgeShellRecord::Status::kBuilt;
    rec.shell_index = static_cast<int>(family.shells.size());
    family.shells.push_back(Shell{e, ke.k, geom});
    ++family.built;
    family.sum_size += static_cast<long double>(geom->boxes.size());
    family.sum_size_sq += static_cast<long double>(geom->boxes.size()) *
                          static_cast<long double>(geom->boxes.size());
    family.records.push_back(rec);
  }

  // Family aggregate of the construction proposition, stated with N2, N3.
  if (h.depth() >= 3) {
    int d = h.d;
    long double n2 = u128_to_double(h.scale_side(2));
    long double n3 = u128_to_double(h.scale_side(3));
    long double term = std::pow(3.0L * d, 4) * static_cast<long double>(path.length()) * n3 * n3 *
                       std::pow(n2, 2 * d);
    for (int k = 3; k <= family.M - 1 && k + 1 <= h.depth(); ++k) {
      long double nk = u128_to_double(h.scale_side(k));
      long double nk1 = u128_to_double(h.scale_side(k + 1));
      term += static_cast<long double>(family.bad_counts[k - 1]) * nk1 * nk1 *
              std::pow(nk, 3 * d) * std::pow(3.0L * d, 2 * k) * d;
    }
    family.aggregate_bound = std::pow(3.0L, 2 * d) * 4.0L * d * d * term;
    family.aggregate_ok = family.sum_size_sq <= *family.aggregate_bound;
    invariant(family.aggregate_ok, "shell family aggregate bound violated");
  }
  return family;
}

void write_shell_dump(const ShellFamily& family, const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Shell& s : family.shells) {
    nlohmann::json j;
    j["edge"] = {s.edge.a.str(), s.edge.b.str()};
    j["k"] = s.k_of_e;
    nlohmann::json sites = nlohmann::json::array();
    for (const Point& p : s.geom->boxes) {
      nlohmann::json coords = nlohmann::json::array();
      for (int i = 0; i < p.dim(); ++i) coords.push_back(p[i]);
      sites.push_back(coords);
    }
    j["shell_sites"] = sites;
    j["interior_size"] = s.geom->interior_sites.size();
    arr.push_back(j);
  }
  std::ofstream out(path);
  require(out.good(), "cannot open shell dump: " + path);
  out << arr.dump(1) << "\n";
}

}  // namespace percolab
