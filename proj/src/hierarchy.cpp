#include "percolab/hierarchy.hpp"

#include <algorithm>

namespace percolab {

std::string u128_str(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

double ScaleHierarchy::delta(int k) const {
  require(k >= 1 && k + 1 <= depth(), "delta_k needs scales k and k+1 in range");
  double nk = u128_to_double(N[k - 1]);
  double nk1 = u128_to_double(N[k]);
  return 1.0 / (nk1 * nk1 * std::pow(nk, 3.0 * d + 1.0));
}

namespace {

// Checked product; returns false on 128-bit overflow.
bool mul_u128(u128 a, u128 b, u128* out) {
  if (a == 0 || b == 0) {
    *out = 0;
    return true;
  }
  u128 r = a * b;
  if (r / a != b) return false;
  *out = r;
  return true;
}

bool pow_u128(u128 base, int exp, u128* out) {
  u128 r = 1;
  for (int i = 0; i < exp; ++i)
    if (!mul_u128(r, base, &r)) return false;
  *out = r;
  return true;
}

}  // namespace

ScaleHierarchy build_hierarchy(int64_t l1, Schedule schedule, double beta, int d, int depth,
                               const std::vector<int64_t>& explicit_l,
                               std::optional<double> c_p0) {
  require(d >= 2 && d <= kMaxDim, "dimension must satisfy 2 <= d <= " + std::to_string(kMaxDim));
  require(beta >= 1.0, "beta must be >= 1");
  require(l1 >= 3, "l1 must be >= 3");
  require(depth >= 1, "hierarchy depth must be >= 1");

  ScaleHierarchy h;
  h.d = d;
  h.beta = beta;
  h.R = static_cast<int64_t>(std::floor(52.0 * beta)) + 1;

  if (schedule == Schedule::kExplicit) {
    require(!explicit_l.empty(), "explicit schedule requires a scale list");
    require(explicit_l[0] == l1, "explicit schedule must start at l1");
    for (size_t i = 1; i < explicit_l.size(); ++i)
      require(explicit_l[i] >= explicit_l[i - 1], "scale schedule must be non-decreasing");
    h.l = explicit_l;
    u128 n = 1;
    for (int64_t lk : h.l) {
      require(lk >= 1, "scales must be positive");
      if (!mul_u128(n, static_cast<u128>(lk), &n))
        throw ConfigError("explicit schedule overflows 128-bit N_k");
      h.N.push_back(n);
    }
  } else {
    // N_{k+1} = N_k^{2d}, i.e. l_{k+1} = N_k^{2d-1}.
    h.l.push_back(l1);
    h.N.push_back(static_cast<u128>(l1));
    while (h.depth() < depth) {
      u128 nk = h.N.back();
      u128 next;
      if (!pow_u128(nk, 2 * d, &next)) {
        h.depth_capped_by_overflow = true;
        break;
      }
      u128 lk = next / nk;
      if (!u128_fits_i64(lk)) {
        h.depth_capped_by_overflow = true;
        break;
      }
      h.l.push_back(static_cast<int64_t>(lk));
      h.N.push_back(next);
    }
  }

  u128 range_pow;
  if (pow_u128(static_cast<u128>(2 * h.R), d, &range_pow))
    h.l1_ge_2R_pow_d = static_cast<u128>(l1) >= range_pow;
  else
    h.l1_ge_2R_pow_d = false;

  // log2 + d log(3 l) <= d (log 7) l holds for all l >= l1 once it holds at l1
  // (the gap is increasing in l).
  h.log_growth_ok =
      std::log(2.0) + d * std::log(3.0 * static_cast<double>(l1)) <=
      d * std::log(7.0) * static_cast<double>(l1);

  if (c_p0.has_value()) {
    double rd = std::pow(static_cast<double>(h.R), d);
    h.decay_margin_ok = d * std::log(7.0) <= (*c_p0) * static_cast<double>(l1) / (4.0 * rd);
  }

  return h;
}

}  // namespace percolab
