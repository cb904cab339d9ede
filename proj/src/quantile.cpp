#include "percolab/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace percolab {

QuantileDistribution QuantileDistribution::from_atoms(std::vector<Atom> atoms,
                                                      double finite_mass) {
  require(finite_mass >= 0.0 && finite_mass <= 1.0, "finite mass must lie in [0,1]");
  require(!atoms.empty(), "quantile table needs at least one atom");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double total = 0.0;
  for (const Atom& a : atoms) {
    require(a.value >= 0.0, "atom values must be non-negative");
    require(a.prob >= 0.0, "atom probabilities must be non-negative");
    total += a.prob;
  }
  require(std::abs(total - 1.0) <= 1e-9, "conditional atom probabilities must sum to 1");
  QuantileDistribution d;
  d.atoms_ = std::move(atoms);
  d.finite_mass_ = finite_mass;
  double cum = 0.0;
  for (const Atom& a : d.atoms_) {
    cum += a.prob;
    d.cum_.push_back(cum);
  }
  d.cum_.back() = 1.0;
  return d;
}

QuantileDistribution QuantileDistribution::dirac(double value, double finite_mass) {
  return from_atoms({{value, 1.0}}, finite_mass);
}

double QuantileDistribution::quantile(double t) const {
  require(t > 0.0 && t <= 1.0, "quantile argument must lie in (0,1]");
  // inf{x : F(x) >= t}: first atom whose cumulative mass reaches t.
  auto it = std::lower_bound(cum_.begin(), cum_.end(), t);
  size_t idx = static_cast<size_t>(it - cum_.begin());
  if (idx >= atoms_.size()) idx = atoms_.size() - 1;
  return atoms_[idx].value;
}

double QuantileDistribution::cdf(double x) const {
  double c = 0.0;
  for (size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].value <= x) c = cum_[i];
  return c;
}

double QuantileDistribution::mass_at_zero() const {
  double c = 0.0;
  for (size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].value == 0.0) c += atoms_[i].prob;
  return finite_mass_ * c;
}

double QuantileDistribution::max_value() const { return atoms_.back().value; }

double QuantileDistribution::sup_quantile_gap(const QuantileDistribution& f,
                                              const QuantileDistribution& g) {
  // Both quantile functions are right-continuous steps in t; the sup is
  // attained on the partition refined by both cumulative level sets.
  std::vector<double> levels{1.0};
  for (double c : f.cum_) levels.push_back(c);
  for (double c : g.cum_) levels.push_back(c);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::remove_if(levels.begin(), levels.end(), [](double t) { return t <= 0.0; }),
               levels.end());
  double sup = 0.0;
  for (double t : levels) sup = std::max(sup, std::abs(f.quantile(t) - g.quantile(t)));
  return sup;
}

EdgeField quantile_passage_times(const EdgeField& field, const QuantileDistribution& dist,
                                 const CoupledConfig& openness, Level level) {
  require(field.window == &openness.window(), "field and openness must share a window");
  require(field.kind == FieldKind::kUniform, "passage times need a uniform field");
  const Window& w = *field.window;
  EdgeField times;
  times.window = &w;
  times.seed = field.seed;
  times.kind = FieldKind::kPassageTime;
  times.values.assign(w.slot_count(), 0.0);
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (uint64_t s = 0; s < w.slot_count(); ++s) {
    if (!w.slot_valid(s)) continue;
    if (!openness.open_at(level, s)) {
      times.values[s] = inf;
      continue;
    }
    double u = field.values[s];
    times.values[s] = dist.quantile(u <= 0.0 ? std::numeric_limits<double>::min() : u);
  }
  return times;
}

double DeltaFunction::at(double eps) const {
  double v = 0.0;
  for (const auto& [e, d] : steps)
    if (e <= eps) v = d;
  return v;
}

ClassMembership class_membership(const QuantileDistribution& dist, double p0, double p1, double m,
                                 double eps0, const DeltaFunction& delta, double delta0) {
  ClassMembership res;
  res.zero_mass_ok = dist.mass_at_zero() <= p1;
  res.finite_mass_ok = dist.finite_mass() > p0;
  // G(]0, eps]) <= delta(eps) for all eps < eps0: both sides are steps, so it
  // suffices to check at the atoms below eps0.
  res.small_values_ok = true;
  for (const auto& atom : dist.atoms()) {
    if (atom.value <= 0.0 || atom.value >= eps0) continue;
    double mass = dist.finite_mass() * (dist.cdf(atom.value) - dist.cdf(0.0));
    if (mass > delta.at(atom.value)) res.small_values_ok = false;
  }
  res.concentration_ok =
      dist.finite_mass() * dist.cdf(m) >= (1.0 - delta0 / 2.0) * dist.finite_mass();
  res.member =
      res.zero_mass_ok && res.finite_mass_ok && res.small_values_ok && res.concentration_ok;
  if (!res.zero_mass_ok)
    res.violated_clause = "G({0}) <= p1";
  else if (!res.finite_mass_ok)
    res.violated_clause = "G([0,+inf[) > p0";
  else if (!res.small_values_ok)
    res.violated_clause = "G(]0,eps]) <= delta(eps)";
  else if (!res.concentration_ok)
    res.violated_clause = "G([0,M]) >= (1 - delta0/2) G([0,+inf[)";
  return res;
}

}  // namespace percolab
