#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "percolab/bypass.hpp"
#include "percolab/chemdist.hpp"
#include "percolab/hierarchy.hpp"
#include "percolab/quantile.hpp"

namespace percolab {

/// Runs trial bodies 0..trials-1 on a small pool; results come back indexed
/// by trial, so the reduction is order-independent and thread-count agnostic.
void parallel_trials(uint64_t trials, int threads, const std::function<void(uint64_t)>& body);

struct TrialValue {
  uint64_t trial = 0;
  uint64_t seed = 0;
  bool discarded = false;
  int64_t distance = -1;
  double ratio = 0.0;
};

/// One Monte Carlo estimate of the distance ratio D / (n ||x||_1), with the
/// normal-approximation confidence half-width over non-discarded trials.
struct EstimateRecord {
  double p = 0.0;
  int64_t n = 0;
  Point x;
  uint64_t master_seed = 0;
  std::vector<TrialValue> values;
  uint64_t discards = 0;
  uint64_t used = 0;
  double mean_ratio = 0.0;
  double half_width = 0.0;
  bool valid = true;  // false once the discard cap (50%) trips
};

EstimateRecord estimate_mu(const Window& window, double p0, double p, const Point& x, int64_t n,
                           uint64_t trials, uint64_t master_seed, int threads);

/// Lipschitz scan over a p-grid with common random numbers: one uniform field
/// per trial serves every level, so per-trial monotonicity D_q <= D_p is
/// exact and the slope estimates share their noise.
struct LipschitzReport {
  std::vector<double> grid;
  std::vector<EstimateRecord> records;          // one per grid level
  std::vector<double> slopes;                   // |d mu / d p| between neighbours
  double kappa_hat = 0.0;
  uint64_t monotonicity_violations = 0;         // per-trial D_q > D_p events (expect 0)
  bool monotone_within_2ci = true;
};

LipschitzReport lipschitz_scan(const Window& window, double p0, const std::vector<double>& grid,
                               const Point& x, int64_t n, uint64_t trials, uint64_t master_seed,
                               int threads);

/// Monte Carlo estimate of P(bad at scale 1) per box side N.
struct DecayRow {
  int64_t n_box = 0;
  uint64_t trials = 0;
  uint64_t bad = 0;
  double p_hat = 0.0;
  double half_width = 0.0;
  bool one_sided = false;   // zero bad samples: rule-of-three upper bound
  double upper_bound = 0.0;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  double log_slope = 0.0;   // least-squares slope of log p_hat against N
  bool slope_valid = false; // needs >= 2 rows with bad > 0
};

DecayReport goodbox_decay(double p, double q, const std::vector<int64_t>& n_list, double beta,
                          uint64_t trials, uint64_t master_seed, int threads, int d = 2);

/// Per-sample scale-budget diagnostics along q-geodesics.
struct BudgetSample {
  uint64_t trial = 0;
  bool discarded = false;
  bool horizon_exceeded = false;
  int M = 0;
  uint64_t gamma_length = 0;
  std::vector<uint64_t> n_k;
  long double weighted_sum = 0.0L;  // sum_{k>=3} n_k N_{k+1}^2 N_k^{3d} (3d)^{2k}
  bool sum_arm = false;             // weighted_sum >= n
  bool horizon_arm = false;         // N_M > n^{1/3d}
  bool bad_event = false;
};

struct BudgetReport {
  std::vector<BudgetSample> samples;
  std::vector<double> delta_k;      // per scale k = 1..depth-1
  double bad_event_freq = 0.0;
  double sum_arm_freq = 0.0;
  double horizon_arm_freq = 0.0;
};

BudgetReport budget_report(const Window& window, double p, double q, int64_t n, const Point& x,
                           const ScaleHierarchy& h, uint64_t trials, uint64_t master_seed,
                           int threads);

/// Quantile-coupled comparison of two distributions at levels p <= q. At
/// p == q the check is two-sided: |T_F - T_G| <= |geodesic| * sup-gap, with
/// the geodesic of the dearer side. At p < q only the domination direction
/// T_{F,q} <= T_{G,p} + |geodesic| * sup-gap is certified per sample.
struct GeneralScanSample {
  uint64_t trial = 0;
  bool discarded = false;
  double t_f = 0.0, t_g = 0.0;
  uint64_t len_f = 0, len_g = 0;
  bool bound_ok = true;
};

struct GeneralScanReport {
  double sup_gap = 0.0;
  std::vector<GeneralScanSample> samples;
  uint64_t violations = 0;
  uint64_t discards = 0;
};

GeneralScanReport general_distribution_scan(const Window& window, const QuantileDistribution& f,
                                            const QuantileDistribution& g, double p, double q,
                                            int64_t n, const Point& x, uint64_t trials,
                                            uint64_t master_seed, int threads,
                                            const ClassMembership& f_class,
                                            const ClassMembership& g_class);

/// Frequency of the cheap-long-path witness event: some vertex at L1 distance
/// n from the origin is reached in time < C n.
struct LinearGrowthReport {
  double c = 0.0;
  int64_t n = 0;
  uint64_t trials = 0;
  uint64_t hits = 0;
  double frequency = 0.0;
  double half_width = 0.0;
};

LinearGrowthReport linear_growth_check(const Window& window, const QuantileDistribution& dist,
                                       double c, int64_t n, uint64_t trials, uint64_t master_seed,
                                       int threads);

}  // namespace percolab
