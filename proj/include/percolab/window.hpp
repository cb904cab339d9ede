#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "percolab/errors.hpp"
#include "percolab/lattice.hpp"
#include "percolab/point.hpp"

namespace percolab {

/// Finite observation window [-L, L]^d with free boundary conditions.
/// Vertices get flat indices in lexicographic coordinate order. Every edge
/// lives in a slot (vertex * d + axis) for the edge from the vertex in the
/// +axis direction; slots whose head leaves the window are invalid. Canonical
/// edge order (lexicographic on endpoint pairs) iterates vertices
/// lexicographically and, per vertex, axes in descending index order.
class Window {
 public:
  Window(int d, int64_t half_width);

  int dim() const { return d_; }
  int64_t half_width() const { return L_; }
  int64_t side() const { return 2 * L_ + 1; }
  uint64_t vertex_count() const { return vertex_count_; }
  uint64_t slot_count() const { return vertex_count_ * d_; }
  uint64_t edge_count() const { return edge_count_; }

  bool contains(const Point& p) const {
    if (p.dim() != d_) return false;
    for (int i = 0; i < d_; ++i)
      if (p[i] < -L_ || p[i] > L_) return false;
    return true;
  }

  uint32_t vertex_index(const Point& p) const {
    uint64_t idx = 0;
    for (int i = 0; i < d_; ++i) idx = idx * static_cast<uint64_t>(side()) + (p[i] + L_);
    return static_cast<uint32_t>(idx);
  }
  Point vertex_point(uint32_t idx) const {
    Point p(d_);
    uint64_t v = idx;
    for (int i = d_ - 1; i >= 0; --i) {
      p[i] = static_cast<int64_t>(v % side()) - L_;
      v /= side();
    }
    return p;
  }

  /// Neighbour in +axis (dir=+1) or -axis (dir=-1) direction, or the sentinel
  /// kNoVertex when it leaves the window.
  static constexpr uint32_t kNoVertex = std::numeric_limits<uint32_t>::max();
  uint32_t neighbor(uint32_t v, int axis, int dir) const {
    int64_t coord = static_cast<int64_t>((v / stride_[axis]) % side()) - L_;
    if (dir > 0 ? coord >= L_ : coord <= -L_) return kNoVertex;
    return dir > 0 ? v + static_cast<uint32_t>(stride_[axis])
                   : v - static_cast<uint32_t>(stride_[axis]);
  }

  /// Slot of the edge from vertex v in +axis direction; caller must ensure
  /// validity (head inside the window).
  uint64_t slot(uint32_t tail, int axis) const { return static_cast<uint64_t>(tail) * d_ + axis; }
  bool slot_valid(uint64_t s) const {
    return neighbor(static_cast<uint32_t>(s / d_), static_cast<int>(s % d_), +1) != kNoVertex;
  }
  uint64_t slot_of_edge(const Edge& e) const {
    require(contains(e.a) && contains(e.b), "edge outside window");
    return slot(vertex_index(e.a), e.axis());
  }
  Edge edge_of_slot(uint64_t s) const {
    uint32_t tail = static_cast<uint32_t>(s / d_);
    int axis = static_cast<int>(s % d_);
    Point a = vertex_point(tail);
    return Edge(a, a + Point::unit(d_, axis));
  }

  /// Visits valid slots in canonical edge order.
  template <typename Fn>
  void for_each_edge_canonical(Fn&& fn) const {
    for (uint64_t v = 0; v < vertex_count_; ++v)
      for (int axis = d_ - 1; axis >= 0; --axis) {
        if (neighbor(static_cast<uint32_t>(v), axis, +1) == kNoVertex) continue;
        fn(v * d_ + axis);
      }
  }

 private:
  int d_;
  int64_t L_;
  uint64_t vertex_count_;
  uint64_t edge_count_;
  std::vector<uint64_t> stride_;
};

enum class FieldKind : uint32_t { kUniform = 0, kPassageTime = 1 };

/// One scalar per window edge slot: a uniform sample in [0,1] or a passage
/// time in [0, +inf]. Identical (window, seed) reproduce bit-identical fields.
struct EdgeField {
  const Window* window = nullptr;
  uint64_t seed = 0;
  FieldKind kind = FieldKind::kUniform;
  std::vector<double> values;  // indexed by slot; invalid slots hold 0

  double at(uint64_t slot) const { return values[slot]; }
};

EdgeField sample_uniform_field(const Window& window, uint64_t seed);

/// Binary snapshot (magic, version, d, L, seed, kind, count, packed values in
/// canonical edge order) so long experiments can be resumed and audited.
void write_field_snapshot(const EdgeField& field, const std::string& path);
EdgeField read_field_snapshot(const Window& window, const std::string& path);

}  // namespace percolab
