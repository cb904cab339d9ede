#include "percolab/percolation.hpp"

#include <algorithm>

#include "percolab/rng.hpp"

namespace percolab {

CoupledConfig monotone_config(const EdgeField& field, double p, double q) {
  require(0.0 <= p && p <= q && q <= 1.0, "monotone coupling needs 0 <= p <= q <= 1");
  require(field.kind == FieldKind::kUniform, "monotone coupling needs a uniform field");
  const Window& w = *field.window;
  CoupledConfig cfg(w, p, q, CouplingProvenance::kMonotone);
  for (uint64_t s = 0; s < w.slot_count(); ++s) {
    if (!w.slot_valid(s)) continue;
    double u = field.values[s];
    uint8_t f = 0;
    if (u <= q) f |= CoupledConfig::kQOpen;
    if (u <= p) f |= CoupledConfig::kPOpen | CoupledConfig::kPOpenMasked;
    cfg.set_flags(s, f);
  }
  return cfg;
}

CoupledConfig three_rv_coupling_edges(const Window& window, double p, double q,
                                      const std::vector<Edge>& designated, uint64_t seed) {
  require(0.0 < p && p <= q && q <= 1.0, "three-variable coupling needs 0 < p <= q <= 1");
  CoupledConfig cfg(window, p, q, CouplingProvenance::kThreeRV);
  double ratio = p / q;
  uint64_t sv = derive_stream(seed, kStreamV);
  uint64_t sw = derive_stream(seed, kStreamW);
  uint64_t sz = derive_stream(seed, kStreamZ);
  std::vector<bool> on_path(window.slot_count(), false);
  for (const Edge& e : designated) on_path[window.slot_of_edge(e)] = true;
  for (uint64_t s = 0; s < window.slot_count(); ++s) {
    if (!window.slot_valid(s)) continue;
    bool v = uniform01(sv, s) <= q;
    bool wv = uniform01(sw, s) <= ratio;
    bool zv = uniform01(sz, s) <= ratio;
    uint8_t f = 0;
    if (v) f |= CoupledConfig::kQOpen;
    if (v && zv) f |= CoupledConfig::kPOpenMasked;
    bool p_true = on_path[s] ? (v && wv) : (v && zv);
    if (p_true) f |= CoupledConfig::kPOpen;
    if (on_path[s]) f |= CoupledConfig::kOnPath;
    cfg.set_flags(s, f);
  }
  return cfg;
}

CoupledConfig three_rv_coupling(const Window& window, double p, double q,
                                const LatticePath& path, uint64_t seed) {
  return three_rv_coupling_edges(window, p, q, path.edges(), seed);
}

std::vector<uint32_t> ClusterLabeling::component_vertices(uint32_t label) const {
  std::vector<uint32_t> vs;
  for (uint64_t v = 0; v < labels_.size(); ++v)
    if (labels_[v] == label) vs.push_back(static_cast<uint32_t>(v));
  return vs;
}

ClusterLabeling cluster_labeling_level(const CoupledConfig& cfg, Level level,
                                       const BoxBounds* region) {
  return cluster_labeling(
      cfg.window(), [&](uint64_t slot) { return cfg.open_at(level, slot); }, region);
}

std::vector<uint32_t> crossing_clusters(const CoupledConfig& cfg, Level level,
                                        const BoxBounds& box) {
  const Window& w = cfg.window();
  require(w.contains(box.lo) && w.contains(box.hi), "box outside window");
  ClusterLabeling lab = cluster_labeling_level(cfg, level, &box);
  int d = w.dim();
  // Track per component, per axis, whether it touches the low and high face.
  std::vector<uint8_t> lo_touch(lab.component_count() * d, 0), hi_touch(lab.component_count() * d, 0);
  for_each_in_bounds(box.lo, box.hi, [&](const Point& p) {
    uint32_t label = lab.label_at(p);
    if (label == ClusterLabeling::kNoLabel) return;
    for (int i = 0; i < d; ++i) {
      if (p[i] == box.lo[i]) lo_touch[label * d + i] = 1;
      if (p[i] == box.hi[i]) hi_touch[label * d + i] = 1;
    }
  });
  std::vector<uint32_t> result;
  for (uint32_t c = 0; c < lab.component_count(); ++c) {
    bool crossing = true;
    for (int i = 0; i < d; ++i)
      if (!lo_touch[c * d + i] || !hi_touch[c * d + i]) crossing = false;
    if (crossing) result.push_back(c);
  }
  return result;
}

int64_t cluster_diameter(const ClusterLabeling& labeling, uint32_t label) {
  require(label < labeling.component_count(), "unknown component id");
  const Window& w = labeling.window();
  int d = w.dim();
  std::vector<int64_t> lo(d, INT64_MAX), hi(d, INT64_MIN);
  for (uint64_t v = 0; v < w.vertex_count(); ++v) {
    if (labeling.label_of(static_cast<uint32_t>(v)) != label) continue;
    Point p = w.vertex_point(static_cast<uint32_t>(v));
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  int64_t diam = 0;
  for (int i = 0; i < d; ++i) diam = std::max(diam, hi[i] - lo[i]);
  return diam;
}

uint32_t giant_cluster(const ClusterLabeling& labeling) {
  require(labeling.component_count() > 0, "empty labeling has no giant cluster");
  uint64_t best = 0;
  for (uint32_t c = 0; c < labeling.component_count(); ++c) best = std::max(best, labeling.size_of(c));
  // Components are numbered by minimal vertex, and vertex indices are
  // lexicographic, so the first maximal component is the lex tie-break winner.
  for (uint32_t c = 0; c < labeling.component_count(); ++c)
    if (labeling.size_of(c) == best) return c;
  return 0;
}

}  // namespace percolab
