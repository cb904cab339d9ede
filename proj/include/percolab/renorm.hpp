#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "percolab/chemdist.hpp"
#include "percolab/hierarchy.hpp"
#include "percolab/lattice.hpp"
#include "percolab/percolation.hpp"

namespace percolab {

enum class Verdict : uint8_t { kGood, kBad, kUnevaluated };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kGood: return "good";
    case Verdict::kBad: return "bad";
    default: return "unevaluated";
  }
}

/// Sub-verdicts (i)-(iv) of the scale-1 goodness test.
struct Scale1Detail {
  bool unique_big_cluster = false;   // (i) exactly one p-cluster of diameter >= N1 in B'
  bool all_subboxes_crossing = false;// (ii) that cluster crosses each of the 3^d N1-boxes
  bool short_connections = false;    // (iii) pairwise p-distance within B' at most 12 beta N1
  bool no_large_disjoint = false;    // (iv) disjoint q-components carry < N1 edges
  Verdict verdict = Verdict::kUnevaluated;
};

/// The unique large p-cluster of a good box's enlarged region, with the
/// deterministic anchor used by the bypass links (lexicographically smallest
/// vertex of the plain box's crossing component inside the cluster).
struct CrossingClusterInfo {
  BoxBounds bounds;                  // B'_{N1}(site)
  std::vector<uint8_t> member;       // lex-ordered over bounds
  std::optional<Point> anchor;       // present for good boxes

  bool contains(const Point& p) const;
};

/// Bad cluster C^(k)(site): the L1-connected set of bad-at-scale-k sites
/// through site. `contaminated` marks clusters that touched unevaluated
/// verdicts; their extent is a lower bound only.
struct BadClusterInfo {
  SiteSet sites;
  bool contaminated = false;
};

/// Memoized good/bad verdicts per (scale, site), computed from the masked
/// view of one coupled configuration. Verdicts are immutable once computed;
/// sites whose required neighbourhood leaves the window come back
/// unevaluated (consumers treat them as bad). Supports concurrent fill;
/// evaluation is deterministic so racing duplicates are identical.
class BoxStateCache {
 public:
  BoxStateCache(const MaskedConfigView& view, const ScaleHierarchy& h);

  const ScaleHierarchy& hierarchy() const { return *h_; }
  const MaskedConfigView& view() const { return view_; }

  Verdict verdict(int scale, const Point& site);
  Scale1Detail scale1_detail(const Point& site);
  const CrossingClusterInfo& crossing_cluster(const Point& site);

  /// Full bad cluster through site at the given scale (empty for good sites).
  BadClusterInfo bad_cluster(int scale, const Point& site);

  /// Test and fault-injection hook: pins a verdict before (or instead of)
  /// evaluation.
  void inject(int scale, const Point& site, Verdict v);

  uint64_t evaluations(int scale) const;

 private:
  Verdict compute_scale1(const Point& site, Scale1Detail* detail,
                         CrossingClusterInfo* cluster);
  Verdict compute_scale_k(int scale, const Point& site);

  const MaskedConfigView view_;
  const ScaleHierarchy* h_;
  mutable std::mutex mu_;
  std::vector<std::unordered_map<Point, Verdict, PointHash>> verdicts_;  // per scale
  std::unordered_map<Point, Scale1Detail, PointHash> details_;
  std::unordered_map<Point, std::shared_ptr<CrossingClusterInfo>, PointHash> clusters_;
  std::vector<uint64_t> eval_counts_;
};

/// Trace of a path on the scale-k lattice: the sites whose plain boxes meet
/// the path, and how many of them are bad (unevaluated counts as bad).
struct TraceResult {
  SiteSet sites;
  uint64_t bad_count = 0;
};

TraceResult trace(const LatticePath& path, int k, BoxStateCache& cache);

/// Sites only, no verdicts (cheap, used by the deterministic trace bound).
SiteSet trace_sites(const LatticePath& path, int k, const ScaleHierarchy& h);

/// Smallest scale M <= depth with zero bad boxes met by the path.
struct ScaleHorizon {
  bool exceeds_depth = false;
  int M = 0;  // valid iff !exceeds_depth
  std::vector<uint64_t> bad_counts;  // n_k for k = 1..depth (as far as computed)
};

ScaleHorizon scale_horizon(const LatticePath& path, BoxStateCache& cache);

/// Spread subset of Lemma-style extraction: a subset with pairwise
/// L-infinity distances >= R and size >= |gamma|/R^d, realized by keeping the
/// densest residue class of the partition i + R Z^d.
SiteSet extract_spread_subset(const SiteSet& gamma, int64_t R);

/// Offline inspection dump: scale, site coordinates, verdict, bad-cluster id.
void dump_verdicts_csv(BoxStateCache& cache, const std::vector<std::pair<int, SiteSet>>& evaluated,
                       const std::string& path);

}  // namespace percolab
