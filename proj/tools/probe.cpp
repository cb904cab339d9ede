// Temporary calibration probe; not part of the deliverable build.
#include <chrono>
#include <cstdio>

#include "percolab/bypass.hpp"
#include "percolab/experiments.hpp"
#include "percolab/report.hpp"
#include "percolab/rng.hpp"

using namespace percolab;
using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
  std::string what = argc > 1 ? argv[1] : "all";

  if (what == "animals" || what == "all") {
    for (int m = 1; m <= 5; ++m)
      std::printf("animals m=%d: %llu\n", m,
                  static_cast<unsigned long long>(enumerate_star_animals(m, 2)));
  }

  if (what == "badbox" || what == "all") {
    for (double p : {0.72, 0.75}) {
      double q = p == 0.72 ? 0.78 : 0.76;
      for (int64_t nb : {8, 12, 16, 24}) {
        auto t0 = Clock::now();
        DecayReport rep = goodbox_decay(p, q, {nb}, 3.0, 500, 12345, 2);
        std::printf("p=%.2f q=%.2f N=%lld  P(bad)=%.4f  (%.0f ms)\n", p, q,
                    static_cast<long long>(nb), rep.rows[0].p_hat, ms_since(t0));
      }
    }
  }

  if (what == "tail" || what == "all") {
    Window w(2, 140);
    auto t0 = Clock::now();
    auto rows = ap_tail_estimate(0.72, 0.5, w, 300, Point{64, 0}, {1.0, 1.5, 2.0, 2.5, 3.0}, 99);
    for (const auto& r : rows) std::printf("beta=%.1f freq=%.4f\n", r.beta, r.frequency);
    std::printf("tail: %.0f ms\n", ms_since(t0));
  }

  if (what == "horizon" || what == "all") {
    // M statistics at the acceptance regime.
    int64_t L = 960;
    Window w(2, L);
    ScaleHierarchy h = build_hierarchy(8, Schedule::kExplicit, 3.0, 2, 2, {8, 47});
    int m1 = 0, m2 = 0, exceeded = 0;
    auto t0 = Clock::now();
    int trials = 10;
    for (int t = 0; t < trials; ++t) {
      ConstructiveSample s = constructive_distance_bound(w, 0.72, 0.78, 160, Point{1, 0}, h,
                                                         trial_seed(2026, t));
      if (s.discarded) ++exceeded;
      else if (s.M == 1) ++m1;
      else if (s.M == 2) ++m2;
      std::printf(
          "trial %d: disc=%d M=%d dq=%lld dp=%lld trimmed=%llu E=%llu built=%llu inap=%llu "
          "stitch=%lld fb=%d ok=%d\n",
          t, s.discarded ? 1 : 0, s.M, static_cast<long long>(s.d_q),
          static_cast<long long>(s.d_p), static_cast<unsigned long long>(s.trimmed_count),
          static_cast<unsigned long long>(s.closed_on_trimmed),
          static_cast<unsigned long long>(s.shells_built),
          static_cast<unsigned long long>(s.shells_inapplicable),
          static_cast<long long>(s.stitch), s.stitch_fallback ? 1 : 0, s.inequality_ok ? 1 : 0);
    }
    std::printf("M=1:%d M=2:%d exceeded:%d  (%.0f ms/trial)\n", m1, m2, exceeded,
                ms_since(t0) / trials);
  }

  if (what == "mu" || what == "all") {
    Window w(2, 232);
    auto t0 = Clock::now();
    EstimateRecord rec = estimate_mu(w, 0.65, 0.8, Point{1, 0}, 100, 10, 777, 2);
    std::printf("mu(0.8) ~ %.4f +- %.4f (%.0f ms/trial)\n", rec.mean_ratio, rec.half_width,
                ms_since(t0) / 10);
  }

  return 0;
}
