#pragma once

#include <string>
#include <vector>

#include "percolab/percolation.hpp"
#include "percolab/window.hpp"

namespace percolab {

/// Distribution on [0, +inf]: mass `finite_mass` on [0, +inf[ described by a
/// step quantile table for the conditioned law, the rest an atom at +inf.
/// The pseudo-inverse convention is value(t) = inf{x : F(x) >= t} on the
/// conditioned CDF F.
class QuantileDistribution {
 public:
  struct Atom {
    double value;  // in [0, +inf[
    double prob;   // conditional probability
  };

  /// Atoms need not be sorted; probabilities must sum to 1.
  static QuantileDistribution from_atoms(std::vector<Atom> atoms, double finite_mass);
  /// Single atom at `value`, convenience.
  static QuantileDistribution dirac(double value, double finite_mass = 1.0);

  double finite_mass() const { return finite_mass_; }
  /// Pseudo-inverse of the conditioned CDF at t in (0, 1].
  double quantile(double t) const;
  /// Conditioned CDF F([0, x]).
  double cdf(double x) const;
  /// Unconditioned mass of {0}.
  double mass_at_zero() const;
  /// Largest finite support value.
  double max_value() const;
  const std::vector<Atom>& atoms() const { return atoms_; }

  /// sup_t |F^{-1}(t) - G^{-1}(t)| over the conditioned quantile functions,
  /// exact for step tables (evaluated between consecutive cumulative levels).
  static double sup_quantile_gap(const QuantileDistribution& f, const QuantileDistribution& g);

 private:
  std::vector<Atom> atoms_;     // sorted by value
  std::vector<double> cum_;     // cumulative conditional probability
  double finite_mass_ = 1.0;
};

/// Per edge: quantile(U(e)) when the chosen level is open, +inf when closed.
EdgeField quantile_passage_times(const EdgeField& field, const QuantileDistribution& dist,
                                 const CoupledConfig& openness, Level level);

/// Non-decreasing step function epsilon -> delta used by the class membership
/// predicate; value at eps is the entry at the largest breakpoint <= eps.
struct DeltaFunction {
  std::vector<std::pair<double, double>> steps;  // sorted by epsilon
  double at(double eps) const;
};

/// The four membership clauses for the distribution class: mass at zero,
/// supercritical finite part, small-value control below eps0, and
/// concentration of the finite part on [0, M].
struct ClassMembership {
  bool zero_mass_ok = false;       // G({0}) <= p1
  bool finite_mass_ok = false;     // G([0,+inf[) > p0
  bool small_values_ok = false;    // G(]0,eps]) <= delta(eps) for eps < eps0
  bool concentration_ok = false;   // G([0,M]) >= (1 - delta0/2) G([0,+inf[)
  bool member = false;
  std::string violated_clause;     // first violated clause, named
};

ClassMembership class_membership(const QuantileDistribution& dist, double p0, double p1, double m,
                                 double eps0, const DeltaFunction& delta, double delta0);

}  // namespace percolab
