#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "percolab/errors.hpp"
#include "percolab/point.hpp"

namespace percolab {

using u128 = unsigned __int128;

inline bool u128_fits_i64(u128 v) { return v <= static_cast<u128>(INT64_MAX); }
inline double u128_to_double(u128 v) {
  return static_cast<double>(static_cast<uint64_t>(v >> 64)) * 18446744073709551616.0 +
         static_cast<double>(static_cast<uint64_t>(v));
}
std::string u128_str(u128 v);

/// Floor division with mathematical rounding (towards -infinity), b > 0.
inline int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

/// Per-axis integer bounds of the half-open box of side N: [-N/2, N/2[ ∩ Z.
inline int64_t box_lo(int64_t n) { return -(n / 2); }
inline int64_t box_hi(int64_t n) { return (n + 1) / 2 - 1; }  // inclusive

/// Index i of the side-N box containing coordinate v: v ∈ iN + [-N/2, N/2[.
inline int64_t box_index_of(int64_t v, int64_t n) { return floor_div(v + n / 2, n); }

enum class Schedule { kPaperDefault, kExplicit };

/// The scale sequence (l_k) with N_k = l_1···l_k, the Antal–Pisztora constant
/// beta and the dependence range R. The default schedule realizes
/// N_{k+1} = N_k^{2d}; validity of l_1 against the renormalization conditions
/// is recorded as booleans, never silently assumed.
class ScaleHierarchy {
 public:
  int d = 2;
  double beta = 1.0;
  int64_t R = 53;              // smallest integer strictly larger than 52*beta
  std::vector<int64_t> l;      // l[k-1] = l_k, k = 1..depth
  std::vector<u128> N;         // N[k-1] = N_k

  // Validity record for the scale-1 conditions of the decay theorem.
  bool l1_ge_2R_pow_d = false;
  bool log_growth_ok = false;               // log2 + d log(3 l1) <= d (log 7) l1
  std::optional<bool> decay_margin_ok;      // d log7 <= C(p0) l1 / (4 R^d); needs C(p0)
  bool depth_capped_by_overflow = false;

  int depth() const { return static_cast<int>(l.size()); }

  u128 scale_side(int k) const {  // N_k
    require(k >= 1 && k <= depth(), "scale out of range: k=" + std::to_string(k));
    return N[k - 1];
  }
  int64_t scale_side_i64(int k) const {
    u128 v = scale_side(k);
    require(u128_fits_i64(v), "N_k does not fit in 64 bits at scale " + std::to_string(k));
    return static_cast<int64_t>(v);
  }
  int64_t l_at(int k) const {
    require(k >= 1 && k <= depth(), "l_k out of range: k=" + std::to_string(k));
    return l[k - 1];
  }

  /// Site at scale k whose N_k-box contains the lattice point v.
  Point site_of(const Point& v, int k) const {
    int64_t n = scale_side_i64(k);
    Point s(v.dim());
    for (int i = 0; i < v.dim(); ++i) s[i] = box_index_of(v[i], n);
    return s;
  }

  /// Scale budget diagnostic delta_k = 1 / (N_{k+1}^2 N_k^{3d+1}).
  double delta(int k) const;
};

/// Builds the hierarchy. For kPaperDefault, `explicit_l` is ignored and scales
/// follow N_{k+1} = N_k^{2d} up to `depth` (capped when N_k overflows 128
/// bits). For kExplicit, `explicit_l` is the full non-decreasing list
/// (l_1, ..., l_depth). `c_p0`, when supplied, enables the decay-margin check.
ScaleHierarchy build_hierarchy(int64_t l1, Schedule schedule, double beta, int d,
                               int depth = 3,
                               const std::vector<int64_t>& explicit_l = {},
                               std::optional<double> c_p0 = std::nullopt);

}  // namespace percolab
