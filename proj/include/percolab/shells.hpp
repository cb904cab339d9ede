#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "percolab/renorm.hpp"

namespace percolab {

/// A *-connected ring of scale-1 good sites around a target edge,
/// equal to the exterior boundary of its own interior.
struct ShellGeometry {
  SiteSet boxes;           // the shell proper, scale-1 sites
  SiteSet interior_sites;  // inte(boxes)
  int k = 2;               // scale at which the descent started
};

struct Shell {
  Edge edge;
  int k_of_e = 2;
  std::shared_ptr<const ShellGeometry> geom;
};

enum class ShellFailure {
  kNone = 0,
  // Domain limits: the construction does not apply, no shell attempted.
  kHorizonExceeded,     // bad chain reaches M
  kDepthInsufficient,   // hierarchy lacks the scales the edge needs
  kBoundaryUnevaluated, // a needed verdict or cluster leaves the window
  kEndpointDistance,    // post: dis(interior, {0, x}) >= N1 cannot be certified
  // Post violations: construction ran but a guaranteed property failed.
  kShellSiteNotGood,
  kBoundaryIdentity,    // exterior_boundary(interior(shell)) != shell
  kEdgeDistance,        // dis(shell, e) >= (14 beta + 2d) N1 failed
  kSizeBound,           // per-edge size bound failed
};

const char* shell_failure_name(ShellFailure f);
bool shell_failure_is_domain(ShellFailure f);

/// Scale at which the edge is bypassed: 2 when the scale-3 site over the
/// edge's smaller endpoint is good, otherwise the largest k with the sites at
/// scales 3..k all bad. Declares an error when the chain reaches the horizon
/// M or runs past the hierarchy depth.
struct KOfEdgeResult {
  bool ok = false;
  int k = 0;
  ShellFailure reason = ShellFailure::kNone;
};

KOfEdgeResult k_of_edge(const Edge& e, BoxStateCache& cache, int horizon_m);

/// Runs the descent for one edge whose k(e) is already known. The endpoints
/// are the path's ends (the regularized 0 and nx); they feed the interior
/// distance post.
struct ShellOutcome {
  std::optional<Shell> shell;
  ShellFailure reason = ShellFailure::kNone;
};

ShellOutcome build_shell(const Edge& e, int k_e, BoxStateCache& cache, const Point& src,
                         const Point& dst);

/// Per-edge outcome inside a family.
struct EdgeShellRecord {
  Edge edge;
  enum class Status { kBuilt, kDropped, kInapplicable } status = Status::kInapplicable;
  ShellFailure reason = ShellFailure::kNone;
  int shell_index = -1;  // into ShellFamily::shells when built
};

/// Shells for the trimmed path: gamma minus the two boxes of side 4 N_M
/// around the endpoints. Carries the measured aggregate sums and, when the
/// hierarchy is deep enough to state it, the family bound
///   sum |shell|^2 <= 3^{2d} 4 d^2 ((3d)^4 |gamma| N3^2 N2^{2d}
///                                  + sum_{k=3}^{M-1} n_k N_{k+1}^2 N_k^{3d} (3d)^{2k} d).
struct ShellFamily {
  bool horizon_exceeded = false;
  int M = 0;
  std::vector<uint64_t> bad_counts;  // n_k for k = 1..depth(as computed)
  std::vector<Edge> trimmed_edges;
  std::vector<Shell> shells;
  std::vector<EdgeShellRecord> records;
  uint64_t built = 0, dropped = 0, inapplicable = 0;
  long double sum_size = 0.0L, sum_size_sq = 0.0L;
  std::optional<long double> aggregate_bound;
  bool aggregate_ok = true;

  double drop_rate() const {
    uint64_t denom = built + dropped;
    return denom == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(denom);
  }
};

ShellFamily shells_for_path(const LatticePath& path, BoxStateCache& cache, const Point& src,
                            const Point& dst);

/// Visualization dump (JSON: edge, k, shell sites, interior size).
void write_shell_dump(const ShellFamily& family, const std::string& path);

/// Per-edge distance bound (b): dis(shell boxes, {e}) as exact integers.
int64_t shell_edge_distance(const ShellGeometry& geom, const Edge& e, const ScaleHierarchy& h);

/// Distance from the fattened interior to a point set.
int64_t interior_distance(const ShellGeometry& geom, const std::vector<Point>& targets,
                          const ScaleHierarchy& h);

/// The per-edge size bound 2d 3^d (3d)^k l_{k+1} (N_k/N1)^{d+1}.
long double shell_size_bound(int k, const ScaleHierarchy& h);

}  // namespace percolab
