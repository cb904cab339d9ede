#pragma once

#include <array>
#include <cassert>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>

namespace percolab {

inline constexpr int kMaxDim = 8;

/// Lattice point in Z^d. The dimension d (2 <= d <= kMaxDim) is fixed per run;
/// comparisons are lexicographic on coordinates.
class Point {
 public:
  Point() : dim_(0) {}
  explicit Point(int dim) : dim_(dim) { assert(dim >= 1 && dim <= kMaxDim); }
  Point(std::initializer_list<int64_t> cs) : dim_(static_cast<int>(cs.size())) {
    assert(dim_ >= 1 && dim_ <= kMaxDim);
    int i = 0;
    for (int64_t c : cs) xs_[i++] = c;
  }

  int dim() const { return dim_; }
  int64_t operator[](int i) const { return xs_[i]; }
  int64_t& operator[](int i) { return xs_[i]; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.xs_[i] != b.xs_[i]) return false;
    return true;
  }
  friend std::strong_ordering operator<=>(const Point& a, const Point& b) {
    assert(a.dim_ == b.dim_);
    for (int i = 0; i < a.dim_; ++i) {
      if (a.xs_[i] < b.xs_[i]) return std::strong_ordering::less;
      if (a.xs_[i] > b.xs_[i]) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

  Point operator+(const Point& o) const {
    Point r(dim_);
    for (int i = 0; i < dim_; ++i) r.xs_[i] = xs_[i] + o.xs_[i];
    return r;
  }
  Point operator-(const Point& o) const {
    Point r(dim_);
    for (int i = 0; i < dim_; ++i) r.xs_[i] = xs_[i] - o.xs_[i];
    return r;
  }
  Point scaled(int64_t s) const {
    Point r(dim_);
    for (int i = 0; i < dim_; ++i) r.xs_[i] = xs_[i] * s;
    return r;
  }

  int64_t norm1() const {
    int64_t s = 0;
    for (int i = 0; i < dim_; ++i) s += std::abs(xs_[i]);
    return s;
  }
  int64_t norm_inf() const {
    int64_t m = 0;
    for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(xs_[i]));
    return m;
  }

  static Point zero(int dim) { return Point(dim); }
  static Point unit(int dim, int axis) {
    Point r(dim);
    r[axis] = 1;
    return r;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ",";
      s += std::to_string(xs_[i]);
    }
    return s + ")";
  }
  friend std::ostream& operator<<(std::ostream& os, const Point& p) { return os << p.str(); }

 private:
  std::array<int64_t, kMaxDim> xs_{};
  int dim_;
};

inline int64_t dist1(const Point& a, const Point& b) { return (a - b).norm1(); }
inline int64_t dist_inf(const Point& a, const Point& b) { return (a - b).norm_inf(); }

struct PointHash {
  size_t operator()(const Point& p) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (int i = 0; i < p.dim(); ++i) {
      h ^= static_cast<uint64_t>(p[i]);
      h *= 0x100000001b3ull;
      h ^= h >> 29;
    }
    return static_cast<size_t>(h);
  }
};

/// Nearest-neighbour lattice edge in canonical order: a is lexicographically
/// smaller than b and ||a-b||_1 = 1.
struct Edge {
  Point a, b;

  Edge() = default;
  Edge(const Point& u, const Point& v) {
    assert(dist1(u, v) == 1);
    if (u < v) {
      a = u;
      b = v;
    } else {
      a = v;
      b = u;
    }
  }

  friend bool operator==(const Edge& x, const Edge& y) { return x.a == y.a && x.b == y.b; }
  friend std::strong_ordering operator<=>(const Edge& x, const Edge& y) {
    if (auto c = x.a <=> y.a; c != 0) return c;
    return x.b <=> y.b;
  }
  int axis() const {
    for (int i = 0; i < a.dim(); ++i)
      if (a[i] != b[i]) return i;
    return -1;
  }
  std::string str() const { return a.str() + "-" + b.str(); }
};

struct EdgeHash {
  size_t operator()(const Edge& e) const {
    PointHash ph;
    return ph(e.a) * 0x9e3779b97f4a7c15ull + ph(e.b);
  }
};

}  // namespace percolab
