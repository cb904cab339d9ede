#include "percolab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "percolab/rng.hpp"

namespace percolab {

void parallel_trials(uint64_t trials, int threads, const std::function<void(uint64_t)>& body) {
  if (threads <= 1 || trials <= 1) {
    for (uint64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<uint64_t> next{0};
  auto worker = [&] {
    while (true) {
      uint64_t t = next.fetch_add(1);
      if (t >= trials) return;
      body(t);
    }
  };
  std::vector<std::thread> pool;
  int count = std::min<int>(threads, static_cast<int>(trials));
  pool.reserve(count);
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

namespace {

void finalize_record(EstimateRecord* rec) {
  double sum = 0.0;
  uint64_t used = 0;
  for (const TrialValue& v : rec->values) {
    if (v.discarded) continue;
    sum += v.ratio;
    ++used;
  }
  rec->used = used;
  rec->discards = rec->values.size() - used;
  rec->mean_ratio = used ? sum / static_cast<double>(used) : 0.0;
  double ss = 0.0;
  for (const TrialValue& v : rec->values) {
    if (v.discarded) continue;
    double dv = v.ratio - rec->mean_ratio;
    ss += dv * dv;
  }
  double sd = used > 1 ? std::sqrt(ss / static_cast<double>(used - 1)) : 0.0;
  rec->half_width = used ? 1.96 * sd / std::sqrt(static_cast<double>(used)) : 0.0;
  rec->valid = rec->discards * 2 <= rec->values.size();
}

}  // namespace

EstimateRecord estimate_mu(const Window& window, double p0, double p, const Point& x, int64_t n,
                           uint64_t trials, uint64_t master_seed, int threads) {
  require(p >= p0, "estimate requires p >= p0");
  require(trials >= 1, "trials must be >= 1");
  Point target = x.scaled(n);
  require(window.contains(target), "n x outside window");
  EstimateRecord rec;
  rec.p = p;
  rec.n = n;
  rec.x = x;
  rec.master_seed = master_seed;
  rec.values.assign(trials, TrialValue{});
  double denom = static_cast<double>(n) * static_cast<double>(x.norm1());
  Point origin = Point::zero(window.dim());
  parallel_trials(trials, threads, [&](uint64_t t) {
    TrialValue val;
    val.trial = t;
    val.seed = trial_seed(master_seed, t);
    EdgeField field = sample_uniform_field(window, val.seed);
    auto open_p0 = [&](uint64_t slot) { return field.values[slot] <= p0; };
    ClusterLabeling lab = cluster_labeling(window, open_p0);
    uint32_t giant = giant_cluster(lab);
    Point src = regularize(origin, lab, giant);
    Point dst = regularize(target, lab, giant);
    auto open_p = [&](uint64_t slot) { return field.values[slot] <= p; };
    GeodesicResult g = chemical_distance(window, open_p, src, dst);
    if (!g.reachable) {
      val.discarded = true;
    } else {
      val.distance = g.distance;
      val.ratio = static_cast<double>(g.distance) / denom;
    }
    rec.values[t] = val;
  });
  finalize_record(&rec);
  return rec;
}

LipschitzReport lipschitz_scan(const Window& window, double p0, const std::vector<double>& grid,
                               const Point& x, int64_t n, uint64_t trials, uint64_t master_seed,
                               int threads) {
  require(!grid.empty(), "empty p grid");
  for (double p : grid) require(p >= p0 && p <= 1.0, "grid must lie inside [p0, 1]");
  for (size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "grid must be strictly increasing");
  Point target = x.scaled(n);
  require(window.contains(target), "n x outside window");

  LipschitzReport report;
  report.grid = grid;
  report.records.assign(grid.size(), EstimateRecord{});
  for (size_t i = 0; i < grid.size(); ++i) {
    report.records[i].p = grid[i];
    report.records[i].n = n;
    report.records[i].x = x;
    report.records[i].master_seed = master_seed;
    report.records[i].values.assign(trials, TrialValue{});
  }
  std::atomic<uint64_t> violations{0};
  double denom = static_cast<double>(n) * static_cast<double>(x.norm1());
  Point origin = Point::zero(window.dim());
  parallel_trials(trials, threads, [&](uint64_t t) {
    uint64_t seed = trial_seed(master_seed, t);
    EdgeField field = sample_uniform_field(window, seed);
    auto open_p0 = [&](uint64_t slot) { return field.values[slot] <= p0; };
    ClusterLabeling lab = cluster_labeling(window, open_p0);
    uint32_t giant = giant_cluster(lab);
    Point src = regularize(origin, lab, giant);
    Point dst = regularize(target, lab, giant);
    int64_t prev = -1;  // distance at the previous (smaller) p
    for (size_t i = 0; i < grid.size(); ++i) {
      double p = grid[i];
      auto open_p = [&](uint64_t slot) { return field.values[slot] <= p; };
      GeodesicResult g = chemical_distance(window, open_p, src, dst);
      TrialValue val;
      val.trial = t;
      val.seed = seed;
      if (!g.reachable) {
        val.discarded = true;
      } else {
        val.distance = g.distance;
        val.ratio = static_cast<double>(g.distance) / denom;
        if (prev >= 0 && g.distance > prev) violations.fetch_add(1);
        prev = g.distance;
      }
      report.records[i].values[t] = val;
    }
  });
  report.monotonicity_violations = violations.load();
  for (auto& rec : report.records) finalize_record(&rec);
  for (size_t i = 1; i < grid.size(); ++i) {
    double dmu = report.records[i].mean_ratio - report.records[i - 1].mean_ratio;
    double dp = grid[i] - grid[i - 1];
    report.slopes.push_back(std::abs(dmu / dp));
    double allowed = 2.0 * (report.records[i].half_width + report.records[i - 1].half_width);
    if (dmu > allowed) report.monotone_within_2ci = false;
  }
  report.kappa_hat =
      report.slopes.empty() ? 0.0 : *std::max_element(report.slopes.begin(), report.slopes.end());
  return report;
}

DecayReport goodbox_decay(double p, double q, const std::vector<int64_t>& n_list, double beta,
                          uint64_t trials, uint64_t master_seed, int threads, int d) {
  require(p <= q, "goodbox decay needs p <= q");
  DecayReport report;
  for (int64_t nb : n_list) {
    require(nb >= 2, "box side must be >= 2");
    int64_t L = (3 * nb + 1) / 2 + 1;
    Window window(d, L);
    ScaleHierarchy h = build_hierarchy(nb, Schedule::kExplicit, beta, d, 1, {nb});
    std::vector<uint8_t> bad(trials, 0);
    Point origin = Point::zero(d);
    parallel_trials(trials, threads, [&](uint64_t t) {
      EdgeField field = sample_uniform_field(window, trial_seed(master_seed ^ nb, t));
      CoupledConfig cfg = monotone_config(field, p, q);
      MaskedConfigView view(cfg);
      BoxStateCache cache(view, h);
      bad[t] = cache.verdict(1, origin) != Verdict::kGood ? 1 : 0;
    });
    DecayRow row;
    row.n_box = nb;
    row.trials = trials;
    for (uint8_t b : bad) row.bad += b;
    row.p_hat = static_cast<double>(row.bad) / static_cast<double>(trials);
    if (row.bad == 0) {
      row.one_sided = true;
      row.upper_bound = 3.0 / static_cast<double>(trials);
    } else {
      row.half_width =
          1.96 * std::sqrt(row.p_hat * (1.0 - row.p_hat) / static_cast<double>(trials));
    }
    report.rows.push_back(row);
  }
  // Least-squares slope of log p_hat against N over rows with hits.
  std::vector<double> xs, ys;
  for (const DecayRow& row : report.rows)
    if (row.bad > 0) {
      xs.push_back(static_cast<double>(row.n_box));
      ys.push_back(std::log(row.p_hat));
    }
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    report.log_slope = sxy / sxx;
    report.slope_valid = true;
  }
  return report;
}

BudgetReport budget_report(const Window& window, double p, double q, int64_t n, const Point& x,
                           const ScaleHierarchy& h, uint64_t trials, uint64_t master_seed,
                           int threads) {
  require(h.depth() >= 2, "budget report needs hierarchy depth >= 2");
  Point target = x.scaled(n);
  require(window.contains(target), "n x outside window");
  BudgetReport report;
  report.samples.assign(trials, BudgetSample{});
  for (int k = 1; k + 1 <= h.depth(); ++k) report.delta_k.push_back(h.delta(k));
  Point origin = Point::zero(window.dim());
  int d = window.dim();
  parallel_trials(trials, threads, [&](uint64_t t) {
    BudgetSample s;
    s.trial = t;
    uint64_t seed = trial_seed(master_seed, t);
    EdgeField field = sample_uniform_field(window, seed);
    CoupledConfig cfg = monotone_config(field, p, q);
    ClusterLabeling lab = cluster_labeling(
        window, [&](uint64_t slot) { return cfg.p_open(slot); });
    uint32_t giant = giant_cluster(lab);
    Point src = regularize(origin, lab, giant);
    Point dst = regularize(target, lab, giant);
    GeodesicResult g = chemical_distance(
        window, [&](uint64_t slot) { return cfg.q_open(slot); }, src, dst);
    if (!g.reachable) {
      s.discarded = true;
      report.samples[t] = s;
      return;
    }
    s.gamma_length = g.path.length();
    MaskedConfigView view(cfg);
    BoxStateCache cache(view, h);
    ScaleHorizon horizon = scale_horizon(g.path, cache);
    s.n_k = horizon.bad_counts;
    s.horizon_exceeded = horizon.exceeds_depth;
    s.M = horizon.exceeds_depth ? 0 : horizon.M;
    int top = horizon.exceeds_depth ? h.depth() : horizon.M;
    for (int k = 3; k <= top && k + 1 <= h.depth(); ++k) {
      long double nk = u128_to_double(h.scale_side(k));
      long double nk1 = u128_to_double(h.scale_side(k + 1));
      s.weighted_sum += static_cast<long double>(s.n_k[k - 1]) * nk1 * nk1 *
                        std::pow(nk, 3.0L * d) * std::pow(3.0L * d, 2.0L * k);
    }
    s.sum_arm = s.weighted_sum >= static_cast<long double>(n);
    double horizon_side = horizon.exceeds_depth
                              ? u128_to_double(h.scale_side(h.depth()))
                              : u128_to_double(h.scale_side(horizon.M));
    s.horizon_arm = horizon_side > std::pow(static_cast<double>(n), 1.0 / (3.0 * d));
    s.bad_event = s.sum_arm || s.horizon_arm;
    report.samples[t] = s;
  });
  uint64_t used = 0, bad = 0, sum_arm = 0, hor = 0;
  for (const BudgetSample& s : report.samples) {
    if (s.discarded) continue;
    ++used;
    bad += s.bad_event;
    sum_arm += s.sum_arm;
    hor += s.horizon_arm;
  }
  if (used) {
    report.bad_event_freq = static_cast<double>(bad) / static_cast<double>(used);
    report.sum_arm_freq = static_cast<double>(sum_arm) / static_cast<double>(used);
    report.horizon_arm_freq = static_cast<double>(hor) / static_cast<double>(used);
  }
  return report;
}

GeneralScanReport general_distribution_scan(const Window& window, const QuantileDistribution& f,
                                            const QuantileDistribution& g, double p, double q,
                                            int64_t n, const Point& x, uint64_t trials,
                                            uint64_t master_seed, int threads,
                                            const ClassMembership& f_class,
                                            const ClassMembership& g_class) {
  require(0.0 < p && p <= q && q <= 1.0, "general scan needs 0 < p <= q <= 1");
  require(f_class.member, "distribution F outside the class: " + f_class.violated_clause);
  require(g_class.member, "distribution G outside the class: " + g_class.violated_clause);
  Point target = x.scaled(n);
  require(window.contains(target), "n x outside window");

  GeneralScanReport report;
  report.sup_gap = QuantileDistribution::sup_quantile_gap(f, g);
  report.samples.assign(trials, GeneralScanSample{});
  Point origin = Point::zero(window.dim());
  constexpr double tol = 1e-9;
  parallel_trials(trials, threads, [&](uint64_t t) {
    GeneralScanSample s;
    s.trial = t;
    uint64_t seed = trial_seed(master_seed, t);
    // Shared uniform values; the V/Z streams of the coupling are independent
    // substreams of the same seed. With no designated edges the p level is
    // exactly the V*Z thinning of the q level.
    EdgeField uf = sample_uniform_field(window, seed);
    CoupledConfig openness = three_rv_coupling_edges(window, p, q, {}, seed);
    EdgeField tf = quantile_passage_times(uf, f, openness, Level::kQ);
    EdgeField tg = quantile_passage_times(uf, g, openness, Level::kP);
    // Regularize on the lower-level open graph so both passage times are
    // finite for the same endpoints.
    ClusterLabeling lab = cluster_labeling(
        window, [&](uint64_t slot) { return openness.p_open_masked(slot); });
    uint32_t giant = giant_cluster(lab);
    Point src = regularize(origin, lab, giant);
    Point dst = regularize(target, lab, giant);
    PassageResult rf = passage_time(tf, src, dst);
    PassageResult rg = passage_time(tg, src, dst);
    if (!rf.reachable || !rg.reachable) {
      s.discarded = true;
      report.samples[t] = s;
      return;
    }
    s.t_f = rf.time;
    s.t_g = rg.time;
    s.len_f = rf.path.length();
    s.len_g = rg.path.length();
    // Domination direction: every lower-open edge is upper-open, so the
    // lower geodesic bounds the upper time through the quantile gap.
    bool ok = s.t_f <= s.t_g + static_cast<double>(s.len_g) * report.sup_gap + tol;
    if (p == q) {
      // Same support graph: the reverse direction holds as well.
      ok = ok && s.t_g <= s.t_f + static_cast<double>(s.len_f) * report.sup_gap + tol;
    }
    s.bound_ok = ok;
    report.samples[t] = s;
  });
  for (const GeneralScanSample& s : report.samples) {
    if (s.discarded)
      ++report.discards;
    else if (!s.bound_ok)
      ++report.violations;
  }
  return report;
}

LinearGrowthReport linear_growth_check(const Window& window, const QuantileDistribution& dist,
                                       double c, int64_t n, uint64_t trials, uint64_t master_seed,
                                       int threads) {
  require(n >= 1, "n must be >= 1");
  require(window.half_width() >= n, "window too small for the distance-n sphere");
  LinearGrowthReport report;
  report.c = c;
  report.n = n;
  report.trials = trials;
  std::vector<uint8_t> hit(trials, 0);
  Point origin = Point::zero(window.dim());
  parallel_trials(trials, threads, [&](uint64_t t) {
    uint64_t seed = trial_seed(master_seed, t);
    EdgeField uf = sample_uniform_field(window, seed);
    CoupledConfig openness =
        three_rv_coupling_edges(window, dist.finite_mass(), dist.finite_mass(), {}, seed);
    EdgeField times = quantile_passage_times(uf, dist, openness, Level::kQ);
    std::vector<double> dists = dijkstra_times(times, origin);
    double best = std::numeric_limits<double>::infinity();
    for (uint64_t v = 0; v < window.vertex_count(); ++v) {
      Point pt = window.vertex_point(static_cast<uint32_t>(v));
      if (pt.norm1() == n) best = std::min(best, dists[v]);
    }
    hit[t] = best < c * static_cast<double>(n) ? 1 : 0;
  });
  for (uint8_t h : hit) report.hits += h;
  report.frequency = static_cast<double>(report.hits) / static_cast<double>(trials);
  report.half_width =
      1.96 * std::sqrt(report.frequency * (1.0 - report.frequency) / static_cast<double>(trials));
  return report;
}

}  // namespace percolab
