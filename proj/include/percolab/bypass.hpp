#pragma once

#include <optional>
#include <string>
#include <vector>

#include "percolab/shells.hpp"

namespace percolab {

/// Replacement of forbidden edges of a path by p-open segments routed
/// through shell boxes.
struct DetourResult {
  LatticePath path;
  std::vector<Edge> added_edges;    // path \ original
  std::vector<Edge> removed_edges;  // original \ path
  int components_bypassed = 0;
  std::vector<int64_t> link_lengths;
  long double length_budget = 0.0L;  // 12 beta N1 sum |shell(e)|
};

enum class DetourFailure {
  kNone = 0,
  kMissingShell,        // an edge of E has no built shell in the family
  kNoRingVisit,         // path reaches a component without touching its ring
  kIntervalOverlap,     // component visit intervals interleave
  kEntryPortionShort,   // |gamma ∩ B'| < N1 at an entry or exit box
  kNoClusterVertex,     // long portion missing a crossing-cluster vertex
  kResidualForbiddenEdge,  // final check: an E-edge survived the splice
};

const char* detour_failure_name(DetourFailure f);

struct DetourOutcome {
  std::optional<DetourResult> result;
  DetourFailure reason = DetourFailure::kNone;
  std::string detail;
};

/// A p-open path from start to end through a *-connected set of scale-1 good
/// boxes, of length at most 12 beta N1 |I|, avoiding the vertex set `avoid`.
/// start/end must lie in the crossing clusters of the enlarged boxes of
/// start_site/end_site (members of I). Reads only the masked view held by the
/// cache.
LatticePath link_through_good_boxes(const SiteSet& boxes, const Point& start,
                                    const Point& start_site, const Point& end,
                                    const Point& end_site, const PointSet& avoid,
                                    BoxStateCache& cache);

/// Bypasses every edge of E along the path using the family's shells:
/// merges the shell interiors into components, walks the path to find
/// entry/exit anchors on each component's ring, links the anchors with
/// p-open segments and splices. All invariants of DetourResult are verified
/// before returning.
DetourOutcome build_detour(const LatticePath& path, const std::vector<Edge>& forbidden,
                           const ShellFamily& family, BoxStateCache& cache);

/// One sample of the constructive distance comparison: q-geodesic, p-closed
/// trimmed-path edges, shells, detour, endpoint stitching by direct BFS in
/// the true p-graph. Reports the realized integer inequality
/// D_p <= D_q + added + stitch.
struct ConstructiveSample {
  bool discarded = false;
  std::string discard_reason;
  uint64_t seed = 0;
  int64_t d_q = -1, d_p = -1;
  uint64_t gamma_length = 0;
  uint64_t trimmed_count = 0;
  uint64_t closed_on_trimmed = 0;   // |E|
  uint64_t bypassed = 0;            // |E| actually routed through shells
  int components = 0;
  long double sum_shell_sizes = 0;
  int64_t added = 0, removed = 0, stitch = 0;
  bool stitch_fallback = false;
  bool inequality_ok = false;
  int M = 0;
  bool horizon_exceeded = false;
  uint64_t shells_built = 0, shells_dropped = 0, shells_inapplicable = 0;
};

ConstructiveSample constructive_distance_bound(const Window& window, double p, double q,
                                               int64_t n, const Point& x_dir,
                                               const ScaleHierarchy& h, uint64_t seed);

}  // namespace percolab
