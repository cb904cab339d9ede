#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "percolab/renorm.hpp"
#include "percolab/rng.hpp"

using namespace percolab;

namespace {

ScaleHierarchy hier(std::vector<int64_t> l, double beta = 3.0) {
  return build_hierarchy(l[0], Schedule::kExplicit, beta, 2, static_cast<int>(l.size()), l);
}

// From-definition evaluation of the scale-1 goodness conditions, written
// directly over point sets and maps, independent of the cache's grid code.
Verdict scale1_oracle(const CoupledConfig& cfg, const Point& site, int64_t n1, double beta) {
  const Window& w = cfg.window();
  BoxBounds bp = box_bounds_raw(site, n1, true);
  if (!w.contains(bp.lo) || !w.contains(bp.hi)) return Verdict::kUnevaluated;
  // p-clusters within B' by union over open edges.
  std::map<Point, int> label;
  int next = 0;
  std::vector<std::vector<Point>> comps;
  for_each_in_bounds(bp.lo, bp.hi, [&](const Point& p) {
    if (label.count(p)) return;
    label[p] = next;
    comps.push_back({p});
    std::vector<Point> queue{p};
    while (!queue.empty()) {
      Point cur = queue.back();
      queue.pop_back();
      for (const Point& o : l1_neighbor_offsets(2)) {
        Point nb = cur + o;
        if (!bp.contains(nb) || label.count(nb)) continue;
        if (!cfg.p_open_masked(w.slot_of_edge(Edge(cur, nb)))) continue;
        label[nb] = next;
        comps[next].push_back(nb);
        queue.push_back(nb);
      }
    }
    ++next;
  });
  auto diam = [](const std::vector<Point>& c) {
    int64_t m = 0;
    for (const Point& a : c)
      for (const Point& b : c) m = std::max(m, dist_inf(a, b));
    return m;
  };
  std::vector<int> big;
  for (int c = 0; c < next; ++c)
    if (diam(comps[c]) >= n1) big.push_back(c);
  if (big.size() != 1) return Verdict::kBad;
  const auto& cluster = comps[big[0]];
  std::set<Point> in_cluster(cluster.begin(), cluster.end());

  // (ii) restriction of the cluster to each plain sub-box has a component
  // touching both faces in both axes.
  for (int64_t ux = -1; ux <= 1; ++ux)
    for (int64_t uy = -1; uy <= 1; ++uy) {
      BoxBounds sub = box_bounds_raw(site + Point{ux, uy}, n1, false);
      // components of the p-configuration restricted to sub
      std::map<Point, int> slabel;
      std::vector<std::vector<Point>> scomps;
      int snext = 0;
      for_each_in_bounds(sub.lo, sub.hi, [&](const Point& p) {
        if (slabel.count(p)) return;
        slabel[p] = snext;
        scomps.push_back({p});
        std::vector<Point> queue{p};
        while (!queue.empty()) {
          Point cur = queue.back();
          queue.pop_back();
          for (const Point& o : l1_neighbor_offsets(2)) {
            Point nb = cur + o;
            if (!sub.contains(nb) || slabel.count(nb)) continue;
            if (!cfg.p_open_masked(w.slot_of_edge(Edge(cur, nb)))) continue;
            slabel[nb] = snext;
            scomps[snext].push_back(nb);
            queue.push_back(nb);
          }
        }
        ++snext;
      });
      bool found = false;
      for (const auto& sc : scomps) {
        if (!in_cluster.count(sc.front())) continue;
        bool lo0 = false, hi0 = false, lo1 = false, hi1 = false;
        for (const Point& p : sc) {
          if (p[0] == sub.lo[0]) lo0 = true;
          if (p[0] == sub.hi[0]) hi0 = true;
          if (p[1] == sub.lo[1]) lo1 = true;
          if (p[1] == sub.hi[1]) hi1 = true;
        }
        if (lo0 && hi0 && lo1 && hi1) found = true;
      }
      if (!found) return Verdict::kBad;
    }

  // (iii) all pairwise distances within B' at most 12 beta N1.
  int64_t limit = static_cast<int64_t>(std::floor(12.0 * beta * static_cast<double>(n1)));
  for (const Point& src : cluster) {
    std::map<Point, int64_t> dist{{src, 0}};
    std::vector<Point> queue{src};
    size_t head = 0;
    while (head < queue.size()) {
      Point cur = queue[head++];
      for (const Point& o : l1_neighbor_offsets(2)) {
        Point nb = cur + o;
        if (!bp.contains(nb) || dist.count(nb)) continue;
        if (!cfg.p_open_masked(w.slot_of_edge(Edge(cur, nb)))) continue;
        dist[nb] = dist[cur] + 1;
        queue.push_back(nb);
      }
    }
    for (const Point& dst : cluster)
      if (!dist.count(dst) || dist[dst] > limit) return Verdict::kBad;
  }

  // (iv) q-components disjoint from the cluster carry < N1 edges.
  std::map<Point, int> qlabel;
  std::vector<std::vector<Point>> qcomps;
  int qnext = 0;
  for_each_in_bounds(bp.lo, bp.hi, [&](const Point& p) {
    if (qlabel.count(p)) return;
    qlabel[p] = qnext;
    qcomps.push_back({p});
    std::vector<Point> queue{p};
    while (!queue.empty()) {
      Point cur = queue.back();
      queue.pop_back();
      for (const Point& o : l1_neighbor_offsets(2)) {
        Point nb = cur + o;
        if (!bp.contains(nb) || qlabel.count(nb)) continue;
        if (!cfg.q_open(w.slot_of_edge(Edge(cur, nb)))) continue;
        qlabel[nb] = qnext;
        qcomps[qnext].push_back(nb);
        queue.push_back(nb);
      }
    }
    ++qnext;
  });
  for (int c = 0; c < qnext; ++c) {
    bool touches = false;
    for (const Point& p : qcomps[c])
      if (in_cluster.count(p)) touches = true;
    if (touches) continue;
    int64_t edges = 0;
    for (const Point& p : qcomps[c])
      for (const Point& o : l1_neighbor_offsets(2)) {
        Point nb = p + o;
        if (!bp.contains(nb) || qlabel[nb] != c) continue;
        if (cfg.q_open(w.slot_of_edge(Edge(p, nb)))) ++edges;
      }
    edges /= 2;
    if (edges >= n1) return Verdict::kBad;
  }
  return Verdict::kGood;
}

CoupledConfig all_open_config(const Window& w) {
  CoupledConfig cfg(w, 0.75, 0.8, CouplingProvenance::kMonotone);
  for (uint64_t s = 0; s < w.slot_count(); ++s)
    if (w.slot_valid(s))
      cfg.set_flags(s, CoupledConfig::kPOpen | CoupledConfig::kQOpen |
                           CoupledConfig::kPOpenMasked);
  return cfg;
}

}  // namespace

TEST_CASE("hierarchy: default schedule, explicit lists, R") {
  ScaleHierarchy def = build_hierarchy(4, Schedule::kPaperDefault, 1.0, 2, 3);
  CHECK(def.scale_side_i64(1) == 4);
  CHECK(def.scale_side_i64(2) == 256);          // N2 = N1^{2d}
  CHECK(def.scale_side_i64(3) == 4294967296LL);  // N3 = N2^{2d}
  CHECK(def.l_at(2) == 64);

  ScaleHierarchy ex = hier({4, 4, 4});
  CHECK(ex.scale_side_i64(1) == 4);
  CHECK(ex.scale_side_i64(2) == 16);
  CHECK(ex.scale_side_i64(3) == 64);

  ScaleHierarchy b3 = hier({8, 47}, 3.0);
  CHECK(b3.R == 157);  // strictly larger than 52 * 3 = 156
  ScaleHierarchy b15 = hier({8, 25}, 1.5);
  CHECK(b15.R == 79);

  CHECK_THROWS_AS(hier({8, 4}), ConfigError);  // decreasing schedule
  CHECK_THROWS_AS(build_hierarchy(2, Schedule::kExplicit, 1.0, 2, 1, {2}), ConfigError);
}

TEST_CASE("hierarchy: validity record and overflow cap") {
  ScaleHierarchy h = build_hierarchy(4, Schedule::kPaperDefault, 1.0, 2, 10);
  CHECK(h.depth_capped_by_overflow);
  CHECK(h.depth() < 10);
  CHECK(!h.l1_ge_2R_pow_d);  // (2R)^2 = 106^2 far exceeds 4
  CHECK(h.log_growth_ok);    // log2 + 2 log 12 <= 2 log7 * 4
  CHECK(!h.decay_margin_ok.has_value());
  ScaleHierarchy with_c = build_hierarchy(4, Schedule::kPaperDefault, 1.0, 2, 2, {}, 0.05);
  CHECK(with_c.decay_margin_ok.has_value());
}

TEST_CASE("hierarchy: delta_k diagnostic") {
  ScaleHierarchy h = hier({8, 47});
  // delta_1 = 1 / (N2^2 N1^{3d+1}) with d = 2.
  double expected = 1.0 / (376.0 * 376.0 * std::pow(8.0, 7.0));
  CHECK(h.delta(1) == doctest::Approx(expected));
}

TEST_CASE("scale-1 verdict: all open is good, no p-open is bad") {
  Window w(2, 30);
  ScaleHierarchy h = hier({8, 47});
  CoupledConfig open = all_open_config(w);
  MaskedConfigView view(open);
  BoxStateCache cache(view, h);
  CHECK(cache.verdict(1, Point{0, 0}) == Verdict::kGood);
  Scale1Detail d = cache.scale1_detail(Point{0, 0});
  CHECK(d.unique_big_cluster);
  CHECK(d.all_subboxes_crossing);
  CHECK(d.short_connections);
  CHECK(d.no_large_disjoint);

  // q-open everywhere, p-open nowhere: no big p-cluster.
  CoupledConfig qonly(w, 0.75, 0.8, CouplingProvenance::kMonotone);
  for (uint64_t s = 0; s < w.slot_count(); ++s)
    if (w.slot_valid(s)) qonly.set_flags(s, CoupledConfig::kQOpen);
  MaskedConfigView view2(qonly);
  BoxStateCache cache2(view2, h);
  CHECK(cache2.verdict(1, Point{0, 0}) == Verdict::kBad);
  CHECK(!cache2.scale1_detail(Point{0, 0}).unique_big_cluster);
}

TEST_CASE("scale-1 verdict: two disjoint crossing clusters fail uniqueness") {
  Window w(2, 30);
  ScaleHierarchy h = hier({4, 19}, 1.0);
  // Two full open rows spanning B' = [-6,6)^2 give two diameter >= 4 clusters.
  CoupledConfig cfg(w, 0.75, 0.8, CouplingProvenance::kMonotone);
  for (int64_t y : {-3, 3})
    for (int64_t x = -8; x < 8; ++x)
      cfg.set_flags(w.slot_of_edge(Edge(Point{x, y}, Point{x + 1, y})),
                    CoupledConfig::kPOpen | CoupledConfig::kQOpen |
                        CoupledConfig::kPOpenMasked);
  MaskedConfigView view(cfg);
  BoxStateCache cache(view, h);
  CHECK(cache.verdict(1, Point{0, 0}) == Verdict::kBad);
  Scale1Detail d = cache.scale1_detail(Point{0, 0});
  CHECK(!d.unique_big_cluster);
  CHECK(scale1_oracle(cfg, Point{0, 0}, 4, 1.0) == Verdict::kBad);
}

TEST_CASE("scale-1 verdict: agrees with the from-definition oracle") {
  Window w(2, 14);
  ScaleHierarchy h = hier({4, 19}, 1.0);
  std::mt19937_64 rng(2024);
  int bad = 0;
  for (int rep = 0; rep < 60; ++rep) {
    EdgeField f = sample_uniform_field(w, rng());
    CoupledConfig cfg = monotone_config(f, 0.72, 0.80);
    MaskedConfigView view(cfg);
    BoxStateCache cache(view, h);
    Verdict mine = cache.verdict(1, Point{0, 0});
    Verdict ref = scale1_oracle(cfg, Point{0, 0}, 4, 1.0);
    REQUIRE(mine == ref);
    if (mine == Verdict::kBad) ++bad;
  }
  CHECK(bad > 0);  // the sample should include genuinely bad boxes
}

TEST_CASE("scale-1 verdict: window boundary gives unevaluated") {
  Window w(2, 10);
  ScaleHierarchy h = hier({8, 47});
  CoupledConfig open = all_open_config(w);
  MaskedConfigView view(open);
  BoxStateCache cache(view, h);
  CHECK(cache.verdict(1, Point{1, 0}) == Verdict::kUnevaluated);  // B' leaves window
}

TEST_CASE("verdict cache: determinism, injection, evaluation counts") {
  Window w(2, 30);
  ScaleHierarchy h = hier({8, 47});
  EdgeField f = sample_uniform_field(w, 5150);
  CoupledConfig cfg = monotone_config(f, 0.72, 0.78);
  MaskedConfigView view(cfg);
  BoxStateCache cache(view, h);
  Verdict v1 = cache.verdict(1, Point{0, 0});
  Verdict v2 = cache.verdict(1, Point{0, 0});
  CHECK(v1 == v2);
  CHECK(cache.evaluations(1) == 1);  // memoized

  BoxStateCache cache2(view, h);
  cache2.inject(1, Point{0, 0}, Verdict::kBad);
  CHECK(cache2.verdict(1, Point{0, 0}) == Verdict::kBad);
}

TEST_CASE("bad clusters: empty for good, singleton, injected L-shape") {
  Window w(2, 40);
  ScaleHierarchy h = hier({3, 19}, 1.0);
  CoupledConfig open = all_open_config(w);
  MaskedConfigView view(open);

  BoxStateCache cache(view, h);
  CHECK(cache.bad_cluster(1, Point{0, 0}).sites.empty());

  BoxStateCache cache2(view, h);
  cache2.inject(1, Point{2, 2}, Verdict::kBad);
  BadClusterInfo iso = cache2.bad_cluster(1, Point{2, 2});
  CHECK(iso.sites.size() == 1);
  CHECK(iso.sites.contains(Point{2, 2}));

  BoxStateCache cache3(view, h);
  std::vector<Point> ell{Point{0, 0}, Point{1, 0}, Point{2, 0}, Point{2, 1}, Point{2, 2}};
  for (const Point& p : ell) cache3.inject(1, p, Verdict::kBad);
  BadClusterInfo cl = cache3.bad_cluster(1, Point{0, 0});
  CHECK(cl.sites.size() == ell.size());
  for (const Point& p : ell) CHECK(cl.sites.contains(p));
  CHECK(!cl.contaminated);
}

TEST_CASE("scale-k verdict: empty clusters, threshold, random oracle") {
  Window w(2, 40);
  ScaleHierarchy h = hier({3, 5, 7}, 1.0);
  CoupledConfig open = all_open_config(w);
  MaskedConfigView view(open);

  // All scale-1 sites good: good at scale 2.
  BoxStateCache cache(view, h);
  int64_t reach = 30;
  for (int64_t i = -reach; i <= reach; ++i)
    for (int64_t j = -reach; j <= reach; ++j) cache.inject(1, Point{i, j}, Verdict::kGood);
  CHECK(cache.verdict(2, Point{0, 0}) == Verdict::kGood);

  // One bad cluster of size l_2 + 1 intersecting the enlarged box: bad.
  BoxStateCache cache2(view, h);
  for (int64_t i = -reach; i <= reach; ++i)
    for (int64_t j = -reach; j <= reach; ++j) cache2.inject(1, Point{i, j}, Verdict::kGood);
  for (int64_t i = 0; i <= h.l_at(2); ++i) cache2.inject(1, Point{i, 0}, Verdict::kBad);
  CHECK(cache2.verdict(2, Point{0, 0}) == Verdict::kBad);

  // Random verdict maps agree with a direct evaluation of the definition.
  std::mt19937_64 rng(31337);
  for (int rep = 0; rep < 20; ++rep) {
    BoxStateCache cache3(view, h);
    std::set<Point> bad;
    for (int64_t i = -reach; i <= reach; ++i)
      for (int64_t j = -reach; j <= reach; ++j) {
        Verdict v = (rng() % 100 < 25) ? Verdict::kBad : Verdict::kGood;
        if (v == Verdict::kBad) bad.insert(Point{i, j});
        cache3.inject(1, Point{i, j}, v);
      }
    // Oracle: for every scale-1 site in the enlarged l2-box around the
    // origin, the bad component through it must have at most l2 members.
    bool oracle_good = true;
    int64_t l2 = h.l_at(2);
    for (int64_t i = box_lo(3 * l2); i <= box_hi(3 * l2) && oracle_good; ++i)
      for (int64_t j = box_lo(3 * l2); j <= box_hi(3 * l2) && oracle_good; ++j) {
        Point site{i, j};
        if (!bad.count(site)) continue;
        // flood the bad component
        std::set<Point> comp{site};
        std::vector<Point> queue{site};
        while (!queue.empty()) {
          Point cur = queue.back();
          queue.pop_back();
          for (const Point& o : l1_neighbor_offsets(2)) {
            Point nb = cur + o;
            if (bad.count(nb) && !comp.count(nb)) {
              comp.insert(nb);
              queue.push_back(nb);
            }
          }
        }
        if (static_cast<int64_t>(comp.size()) > l2) oracle_good = false;
      }
    Verdict mine = cache3.verdict(2, Point{0, 0});
    REQUIRE((mine == Verdict::kGood) == oracle_good);
  }
}

TEST_CASE("hierarchy consistency: good neighbourhood implies good above") {
  Window w(2, 40);
  ScaleHierarchy h = hier({3, 5}, 1.0);
  CoupledConfig open = all_open_config(w);
  MaskedConfigView view(open);
  BoxStateCache cache(view, h);
  for (int64_t i = -30; i <= 30; ++i)
    for (int64_t j = -30; j <= 30; ++j) cache.inject(1, Point{i, j}, Verdict::kGood);
  CHECK(cache.verdict(2, Point{0, 0}) == Verdict::kGood);
  CHECK(cache.verdict(2, Point{1, 1}) == Verdict::kGood);
}

TEST_CASE("trace: single site, straight run, random-walk bound") {
  ScaleHierarchy h = hier({8, 25});
  Window w(2, 700);
  CoupledConfig open = all_open_config(w);
  MaskedConfigView view(open);
  BoxStateCache cache(view, h);

  LatticePath trivial({Point{0, 0}});
  TraceResult t0 = trace(trivial, 1, cache);
  CHECK(t0.sites.size() == 1);
  CHECK(t0.bad_count == 0);

  // Straight run of length N1 along an axis meets exactly two boxes.
  std::vector<Point> straight;
  for (int64_t i = 0; i <= 8; ++i) straight.push_back(Point{i, 0});
  TraceResult t1 = trace(LatticePath(straight), 1, cache);
  CHECK(t1.sites.size() == 2);

  std::mt19937_64 rng(606);
  for (int rep = 0; rep < 200; ++rep) {
    LatticePath walk = oracle::random_walk(rng, 1 + static_cast<int>(rng() % 500));
    for (int k : {1, 2}) {
      SiteSet sites = trace_sites(walk, k, h);
      double bound = 9.0 * (1.0 + (static_cast<double>(walk.length()) + 1.0) /
                                      static_cast<double>(h.scale_side_i64(k)));
      REQUIRE(static_cast<double>(sites.size()) <= bound);
    }
  }
}

TEST_CASE("scale horizon: all good, forced bad, exceeds depth") {
  Window w(2, 60);
  ScaleHierarchy h = hier({3, 5}, 1.0);
  CoupledConfig open = all_open_config(w);
  MaskedConfigView view(open);

  std::vector<Point> straight;
  for (int64_t i = 0; i <= 30; ++i) straight.push_back(Point{i, 0});
  LatticePath path(straight);

  BoxStateCache cache(view, h);
  for (int64_t i = -20; i <= 20; ++i)
    for (int64_t j = -20; j <= 20; ++j) cache.inject(1, Point{i, j}, Verdict::kGood);
  ScaleHorizon m1 = scale_horizon(path, cache);
  CHECK(!m1.exceeds_depth);
  CHECK(m1.M == 1);

  BoxStateCache cache2(view, h);
  for (int64_t i = -20; i <= 20; ++i)
    for (int64_t j = -20; j <= 20; ++j)
      cache2.inject(1, Point{i, j}, i == 2 && j == 0 ? Verdict::kBad : Verdict::kGood);
  for (int64_t i = -10; i <= 10; ++i)
    for (int64_t j = -10; j <= 10; ++j) cache2.inject(2, Point{i, j}, Verdict::kGood);
  ScaleHorizon m2 = scale_horizon(path, cache2);
  CHECK(!m2.exceeds_depth);
  CHECK(m2.M == 2);
  CHECK(m2.bad_counts[0] == 1);

  BoxStateCache cache3(view, h);
  for (int64_t i = -20; i <= 20; ++i)
    for (int64_t j = -20; j <= 20; ++j) {
      cache3.inject(1, Point{i, j}, Verdict::kBad);
      cache3.inject(2, Point{i, j}, Verdict::kBad);
    }
  ScaleHorizon m3 = scale_horizon(path, cache3);
  CHECK(m3.exceeds_depth);
}

TEST_CASE("locality: verdict unchanged by edits outside the dependence ball") {
  Window w(2, 400);
  ScaleHierarchy h = hier({8, 47});
  EdgeField f = sample_uniform_field(w, 775);
  CoupledConfig cfg = monotone_config(f, 0.72, 0.78);
  MaskedConfigView view(cfg);
  BoxStateCache cache(view, h);
  Verdict before = cache.verdict(1, Point{0, 0});

  // Mutate an edge far outside B_{26 beta N1}(0) (radius 312 at beta = 3).
  EdgeField f2 = f;
  uint64_t far_slot = w.slot_of_edge(Edge(Point{390, 0}, Point{391, 0}));
  f2.values[far_slot] = 1.0 - f2.values[far_slot];
  CoupledConfig cfg2 = monotone_config(f2, 0.72, 0.78);
  MaskedConfigView view2(cfg2);
  BoxStateCache cache2(view2, h);
  CHECK(cache2.verdict(1, Point{0, 0}) == before);
}

TEST_CASE("spread subset: residue classes, pigeonhole, brute force") {
  SiteSet single_class(std::vector<Point>{Point{0, 0}, Point{3, 0}, Point{0, 3}, Point{6, 3}});
  SiteSet s1 = extract_spread_subset(single_class, 3);
  CHECK(s1.size() == single_class.size());

  // One site per residue class of R = 2: the densest class has one member.
  SiteSet spread(std::vector<Point>{Point{0, 0}, Point{1, 0}, Point{0, 1}, Point{1, 1}});
  SiteSet s2 = extract_spread_subset(spread, 2);
  CHECK(s2.size() == 1);

  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    std::set<Point> pts;
    int target = 2 + static_cast<int>(rng() % 40);
    while (static_cast<int>(pts.size()) < target)
      pts.insert(Point{static_cast<int64_t>(rng() % 30) - 15,
                       static_cast<int64_t>(rng() % 30) - 15});
    SiteSet gamma(std::vector<Point>(pts.begin(), pts.end()));
    for (int64_t R : {2, 3, 5}) {
      SiteSet sub = extract_spread_subset(gamma, R);
      REQUIRE(static_cast<double>(sub.size()) >=
              static_cast<double>(gamma.size()) / std::pow(static_cast<double>(R), 2));
      for (const Point& a : sub)
        for (const Point& b : sub)
          if (!(a == b)) REQUIRE(dist_inf(a, b) >= R);
    }
  }
}

TEST_CASE("verdict dump CSV") {
  Window w(2, 30);
  ScaleHierarchy h = hier({8, 47});
  EdgeField f = sample_uniform_field(w, 12);
  CoupledConfig cfg = monotone_config(f, 0.72, 0.78);
  MaskedConfigView view(cfg);
  BoxStateCache cache(view, h);
  SiteSet sites(std::vector<Point>{Point{0, 0}});
  dump_verdicts_csv(cache, {{1, sites}}, "/tmp/percolab_verdicts.csv");
  FILE* fp = std::fopen("/tmp/percolab_verdicts.csv", "r");
  REQUIRE(fp != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, fp) != nullptr);
  CHECK(std::string(line).find("scale,site,verdict") == 0);
  std::fclose(fp);
}
