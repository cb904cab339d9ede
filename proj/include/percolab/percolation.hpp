#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "percolab/lattice.hpp"
#include "percolab/window.hpp"

namespace percolab {

enum class CouplingProvenance { kMonotone, kThreeRV };
enum class Level { kP, kQ };

/// Per-edge open/closed states at two percolation levels under a coupling
/// that guarantees every p-open edge is q-open. For three-variable provenance
/// the masked p-state carries V*Z on every edge (the W states of the
/// designated path are never visible through the masked view); the true
/// p-state is V*W on the designated path and V*Z elsewhere.
class CoupledConfig {
 public:
  static constexpr uint8_t kQOpen = 1;
  static constexpr uint8_t kPOpen = 2;
  static constexpr uint8_t kPOpenMasked = 4;
  static constexpr uint8_t kOnPath = 8;

  CoupledConfig(const Window& window, double p, double q, CouplingProvenance prov)
      : window_(&window), p_(p), q_(q), provenance_(prov), flags_(window.slot_count(), 0) {}

  const Window& window() const { return *window_; }
  double p() const { return p_; }
  double q() const { return q_; }
  CouplingProvenance provenance() const { return provenance_; }

  bool q_open(uint64_t slot) const { return flags_[slot] & kQOpen; }
  bool p_open(uint64_t slot) const { return flags_[slot] & kPOpen; }
  bool p_open_masked(uint64_t slot) const { return flags_[slot] & kPOpenMasked; }
  bool on_path(uint64_t slot) const { return flags_[slot] & kOnPath; }
  bool open_at(Level lv, uint64_t slot) const { return lv == Level::kP ? p_open(slot) : q_open(slot); }

  void set_flags(uint64_t slot, uint8_t flags) { flags_[slot] = flags; }
  uint8_t flags(uint64_t slot) const { return flags_[slot]; }

 private:
  const Window* window_;
  double p_, q_;
  CouplingProvenance provenance_;
  std::vector<uint8_t> flags_;
};

/// Read-only view for the shell and bypass builders: q-states plus the masked
/// p-states only. Handing this type around (instead of CoupledConfig) is what
/// keeps the construction blind to the true p-states of the path.
class MaskedConfigView {
 public:
  explicit MaskedConfigView(const CoupledConfig& cfg) : cfg_(&cfg) {}
  const Window& window() const { return cfg_->window(); }
  bool q_open(uint64_t slot) const { return cfg_->q_open(slot); }
  bool p_open(uint64_t slot) const { return cfg_->p_open_masked(slot); }

 private:
  const CoupledConfig* cfg_;
};

/// Standard monotone coupling from one uniform field: p-open iff U(e) <= p.
CoupledConfig monotone_config(const EdgeField& field, double p, double q);

/// Three-variable coupling of the bypass argument: per edge, independent
/// Bernoulli V, W, Z with parameters q, p/q, p/q. The q-state is V; the
/// p-state is V*W on the designated edges and V*Z off them, so each edge is
/// p-open with probability exactly p and, conditional on q-open, a designated
/// edge is p-closed with probability (q-p)/q. Identical (window, seed)
/// reproduce identical V, W, Z regardless of the designation.
CoupledConfig three_rv_coupling_edges(const Window& window, double p, double q,
                                      const std::vector<Edge>& designated, uint64_t seed);

CoupledConfig three_rv_coupling(const Window& window, double p, double q,
                                const LatticePath& path, uint64_t seed);

/// Connected-component labels for the open subgraph restricted to a region.
/// Components are numbered 0..count-1 in order of their minimal vertex.
class ClusterLabeling {
 public:
  static constexpr uint32_t kNoLabel = UINT32_MAX;

  uint32_t label_of(uint32_t vertex) const { return labels_[vertex]; }
  uint32_t label_at(const Point& p) const { return labels_[window_->vertex_index(p)]; }
  uint32_t component_count() const { return static_cast<uint32_t>(sizes_.size()); }
  uint64_t size_of(uint32_t label) const { return sizes_[label]; }
  const std::vector<uint32_t>& labels() const { return labels_; }
  const Window& window() const { return *window_; }
  /// Vertices of one component, ascending vertex index.
  std::vector<uint32_t> component_vertices(uint32_t label) const;

  ClusterLabeling(const Window& w, std::vector<uint32_t> labels, std::vector<uint64_t> sizes)
      : window_(&w), labels_(std::move(labels)), sizes_(std::move(sizes)) {}

 private:
  const Window* window_;
  std::vector<uint32_t> labels_;  // kNoLabel outside region
  std::vector<uint64_t> sizes_;
};

/// Union-find labeling of open clusters over the whole window or a sub-box.
/// The open predicate receives an edge slot.
template <typename OpenFn>
ClusterLabeling cluster_labeling(const Window& w, OpenFn&& open, const BoxBounds* region = nullptr);

ClusterLabeling cluster_labeling_level(const CoupledConfig& cfg, Level level,
                                       const BoxBounds* region = nullptr);

/// Component ids (labels) of the configuration restricted to the box that
/// touch both opposite faces in every axis direction.
std::vector<uint32_t> crossing_clusters(const CoupledConfig& cfg, Level level,
                                        const BoxBounds& box);

/// Exact L-infinity diameter of a component's vertex set.
int64_t cluster_diameter(const ClusterLabeling& labeling, uint32_t label);

/// Largest component by vertex count; ties broken by lexicographically
/// smallest minimal vertex. Finite-window proxy for the infinite cluster.
uint32_t giant_cluster(const ClusterLabeling& labeling);

// --- implementation of the templated labeler ---

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(uint64_t n) : parent_(n) {
    for (uint64_t i = 0; i < n; ++i) parent_[i] = static_cast<uint32_t>(i);
  }
  uint32_t find(uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<uint32_t> parent_;
};

}  // namespace detail

template <typename OpenFn>
ClusterLabeling cluster_labeling(const Window& w, OpenFn&& open, const BoxBounds* region) {
  auto in_region = [&](uint32_t v) {
    return region == nullptr || region->contains(w.vertex_point(v));
  };
  detail::DisjointSets dsu(w.vertex_count());
  for (uint64_t v = 0; v < w.vertex_count(); ++v) {
    if (!in_region(static_cast<uint32_t>(v))) continue;
    for (int axis = 0; axis < w.dim(); ++axis) {
      uint32_t head = w.neighbor(static_cast<uint32_t>(v), axis, +1);
      if (head == Window::kNoVertex || !in_region(head)) continue;
      if (open(w.slot(static_cast<uint32_t>(v), axis)))
        dsu.unite(static_cast<uint32_t>(v), head);
    }
  }
  std::vector<uint32_t> labels(w.vertex_count(), ClusterLabeling::kNoLabel);
  std::vector<uint64_t> sizes;
  for (uint64_t v = 0; v < w.vertex_count(); ++v) {
    if (!in_region(static_cast<uint32_t>(v))) continue;
    uint32_t root = dsu.find(static_cast<uint32_t>(v));
    if (labels[root] == ClusterLabeling::kNoLabel) {
      labels[root] = static_cast<uint32_t>(sizes.size());
      sizes.push_back(0);
    }
    labels[v] = labels[root];
    ++sizes[labels[v]];
  }
  return ClusterLabeling(w, std::move(labels), std::move(sizes));
}

}  // namespace percolab
