#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctp/variable.hpp"

namespace ctp {

/// Dense nonnegative table over a set of discrete variables.
///
/// The scope is kept sorted by variable id and the values are laid out
/// row-major with the first scope variable varying slowest. An empty scope is
/// a scalar holding one value. Potentials are immutable; every operation below
/// returns a new one.
class Potential {
 public:
  /// The scalar 1.
  Potential();
  Potential(std::vector<Variable> scope, std::vector<double> values);

  static Potential scalar(double value);
  static Potential ones(std::vector<Variable> scope);
  /// Builds a potential from values laid out row-major over `order`, which
  /// may list the variables in any order.
  static Potential from_layout(const std::vector<Variable>& order, std::span<const double> values);

  const std::vector<Variable>& scope() const { return scope_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool is_scalar() const { return scope_.empty(); }
  double scalar_value() const;
  double total() const;
  bool contains(VarId id) const { return scope_contains(scope_, id); }

  /// Cell value for a full assignment of the scope (extra keys are ignored).
  double at(const Evidence& assignment) const;

  /// Values re-laid out row-major over `order`, a permutation of the scope.
  std::vector<double> values_in_layout(const std::vector<Variable>& order) const;

 private:
  std::vector<Variable> scope_;
  std::vector<double> values_;
};

Potential multiply(const Potential& a, const Potential& b);
Potential sum_out(const Potential& p, const std::vector<Variable>& vars);
/// Sums out everything in the scope that is not in `keep`.
Potential marginalize_onto(const Potential& p, const std::vector<Variable>& keep);
Potential restrict(const Potential& p, const Evidence& evidence);
/// Like restrict, but evidence on variables outside the scope is ignored.
Potential apply_evidence(const Potential& p, const Evidence& evidence);
Potential normalize(const Potential& p);
Potential scale(const Potential& p, double factor);

/// Adds the observed variables back to `f0` as indicator dimensions: the
/// result equals f0 where every key of `observed` takes its observed state
/// and 0 elsewhere.
Potential extend_with_evidence_indicator(const Potential& f0, const Evidence& observed);

/// Elementwise comparison on identical scopes:
/// |a - b| <= max(abs_floor, rel * max(|a|, |b|)).
bool approx_equal(const Potential& a, const Potential& b, double rel, double abs_floor = 0.0);
/// Largest |a - b| / max(|a|, |b|) over all cells; infinity on scope mismatch.
double max_relative_difference(const Potential& a, const Potential& b);

}  // namespace ctp
