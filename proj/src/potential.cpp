#include "ctp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ctp/errors.hpp"

namespace ctp {
namespace {

constexpr double kMaxCells = 1u << 30;

std::size_t checked_size(const std::vector<Variable>& scope) {
  const double n = state_space(scope);
  if (n > kMaxCells)
    throw StateSpaceTooLarge("table over {" + join_names(scope) + "} would need " +
                             std::to_string(n) + " cells");
  return static_cast<std::size_t>(n);
}

std::vector<std::size_t> cardinalities(const std::vector<Variable>& scope) {
  std::vector<std::size_t> c;
  c.reserve(scope.size());
  for (const auto& v : scope) c.push_back(v.cardinality());
  return c;
}

// Row-major strides of `of`, re-expressed per variable of `along`; variables
// of `along` missing from `of` get stride 0 so they do not move the offset.
std::vector<std::size_t> strides_along(const std::vector<Variable>& along,
                                       const std::vector<Variable>& of) {
  std::vector<std::size_t> own(of.size(), 1);
  for (std::size_t i = of.size(); i-- > 1;) own[i - 1] = own[i] * of[i].cardinality();
  std::vector<std::size_t> out(along.size(), 0);
  for (std::size_t i = 0; i < along.size(); ++i) {
    auto it = std::lower_bound(of.begin(), of.end(), along[i]);
    if (it != of.end() && *it == along[i]) out[i] = own[static_cast<std::size_t>(it - of.begin())];
  }
  return out;
}

// Visits every assignment of a scope with cardinalities `cards` in row-major
// order, carrying linear offsets into two other tables.
template <class Fn>
void walk(const std::vector<std::size_t>& cards, const std::vector<std::size_t>& sa,
          const std::vector<std::size_t>& sb, std::size_t ia, std::size_t ib, Fn&& fn) {
  const std::size_t dims = cards.size();
  std::size_t total = 1;
  for (auto c : cards) total *= c;
  std::vector<std::size_t> counter(dims, 0);
  for (std::size_t cell = 0; cell < total; ++cell) {
    fn(cell, ia, ib);
    for (std::size_t d = dims; d-- > 0;) {
      ia += sa[d];
      ib += sb[d];
      if (++counter[d] < cards[d]) break;
      ia -= sa[d] * cards[d];
      ib -= sb[d] * cards[d];
      counter[d] = 0;
    }
  }
}

void require_same_definitions(const std::vector<Variable>& a, const std::vector<Variable>& b) {
  for (const auto& v : scope_intersection(a, b)) {
    const auto& w = *std::lower_bound(b.begin(), b.end(), v);
    if (!v.same_definition(w))
      throw ModelError("variable clash on id " + std::to_string(v.id()) + ": '" + v.name() +
                       "' vs '" + w.name() + "'");
  }
}

}  // namespace

Potential::Potential() : values_{1.0} {}

Potential::Potential(std::vector<Variable> scope, std::vector<double> values)
    : scope_(std::move(scope)), values_(std::move(values)) {
  for (std::size_t i = 1; i < scope_.size(); ++i) {
    if (!(scope_[i - 1] < scope_[i]))
      throw ContractViolation("potential scope must be sorted by id without duplicates");
  }
  if (values_.size() != checked_size(scope_))
    throw ContractViolation("potential over {" + join_names(scope_) + "} needs " +
                            std::to_string(checked_size(scope_)) + " values, got " +
                            std::to_string(values_.size()));
  for (double x : values_) {
    if (!std::isfinite(x) || x < 0.0)
      throw ModelError("potential over {" + join_names(scope_) +
                       "} has a negative or non-finite entry");
  }
}

Potential Potential::scalar(double value) { return Potential({}, {value}); }

Potential Potential::ones(std::vector<Variable> scope) {
  auto canon = canonical_scope(std::move(scope));
  const auto n = checked_size(canon);
  return Potential(std::move(canon), std::vector<double>(n, 1.0));
}

Potential Potential::from_layout(const std::vector<Variable>& order,
                                 std::span<const double> values) {
  auto scope = canonical_scope(order);
  if (scope.size() != order.size())
    throw ContractViolation("layout lists a variable twice");
  const auto n = checked_size(scope);
  if (values.size() != n)
    throw ContractViolation("layout over {" + join_names(order) + "} needs " + std::to_string(n) +
                            " values, got " + std::to_string(values.size()));
  std::vector<double> out(n);
  const auto dst = strides_along(order, scope);
  const std::vector<std::size_t> none(order.size(), 0);
  walk(cardinalities(order), dst, none, 0, 0,
       [&](std::size_t cell, std::size_t i, std::size_t) { out[i] = values[cell]; });
  return Potential(std::move(scope), std::move(out));
}

double Potential::scalar_value() const {
  if (!is_scalar()) throw ContractViolation("scalar_value on a non-scalar potential");
  return values_[0];
}

double Potential::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double Potential::at(const Evidence& assignment) const {
  std::size_t index = 0;
  for (const auto& v : scope_) {
    auto it = assignment.find(v);
    if (it == assignment.end())
      throw ContractViolation("assignment does not cover '" + v.name() + "'");
    if (it->second >= v.cardinality())
      throw InputError("state index out of range for '" + v.name() + "'");
    index = index * v.cardinality() + it->second;
  }
  return values_[index];
}

std::vector<double> Potential::values_in_layout(const std::vector<Variable>& order) const {
  if (canonical_scope(order) != scope_ || order.size() != scope_.size())
    throw ContractViolation("layout must be a permutation of the scope");
  std::vector<double> out(values_.size());
  const auto src = strides_along(order, scope_);
  const std::vector<std::size_t> none(order.size(), 0);
  walk(cardinalities(order), src, none, 0, 0,
       [&](std::size_t cell, std::size_t i, std::size_t) { out[cell] = values_[i]; });
  return out;
}

Potential multiply(const Potential& a, const Potential& b) {
  if (a.is_scalar()) return scale(b, a.scalar_value());
  if (b.is_scalar()) return scale(a, b.scalar_value());
  require_same_definitions(a.scope(), b.scope());
  auto scope = scope_union(a.scope(), b.scope());
  std::vector<double> out(checked_size(scope));
  const auto va = a.values();
  const auto vb = b.values();
  walk(cardinalities(scope), strides_along(scope, a.scope()), strides_along(scope, b.scope()), 0,
       0, [&](std::size_t cell, std::size_t i, std::size_t j) { out[cell] = va[i] * vb[j]; });
  return Potential(std::move(scope), std::move(out));
}

Potential sum_out(const Potential& p, const std::vector<Variable>& vars) {
  auto gone = canonical_scope(vars);
  if (!scope_includes(p.scope(), gone))
    throw ContractViolation("sum_out: {" + join_names(scope_difference(gone, p.scope())) +
                            "} not in scope {" + join_names(p.scope()) + "}");
  if (gone.empty()) return p;
  auto kept = scope_difference(p.scope(), gone);
  std::vector<double> out(checked_size(kept), 0.0);
  const auto src = p.values();
  const std::vector<std::size_t> none(p.scope().size(), 0);
  walk(cardinalities(p.scope()), strides_along(p.scope(), kept), none, 0, 0,
       [&](std::size_t cell, std::size_t i, std::size_t) { out[i] += src[cell]; });
  return Potential(std::move(kept), std::move(out));
}

Potential marginalize_onto(const Potential& p, const std::vector<Variable>& keep) {
  return sum_out(p, scope_difference(p.scope(), canonical_scope(keep)));
}

Potential restrict(const Potential& p, const Evidence& evidence) {
  if (evidence.empty()) return p;
  std::vector<Variable> fixed;
  for (const auto& [var, state] : evidence) {
    if (!p.contains(var.id()))
      throw ContractViolation("restrict: '" + var.name() + "' not in scope {" +
                              join_names(p.scope()) + "}");
    if (state >= var.cardinality())
      throw InputError("state index " + std::to_string(state) + " out of range for '" +
                       var.name() + "'");
    fixed.push_back(var);
  }
  auto kept = scope_difference(p.scope(), fixed);
  const auto own = strides_along(p.scope(), p.scope());
  std::size_t base = 0;
  for (std::size_t i = 0; i < p.scope().size(); ++i) {
    auto it = evidence.find(p.scope()[i]);
    if (it != evidence.end()) base += it->second * own[i];
  }
  std::vector<double> out(checked_size(kept));
  const auto src = p.values();
  const std::vector<std::size_t> none(kept.size(), 0);
  walk(cardinalities(kept), strides_along(kept, p.scope()), none, base, 0,
       [&](std::size_t cell, std::size_t i, std::size_t) { out[cell] = src[i]; });
  return Potential(std::move(kept), std::move(out));
}

Potential apply_evidence(const Potential& p, const Evidence& evidence) {
  Evidence present;
  for (const auto& [var, state] : evidence) {
    if (p.contains(var.id())) present.emplace(var, state);
  }
  return restrict(p, present);
}

Potential normalize(const Potential& p) {
  const double mass = p.total();
  if (!(mass > 0.0))
    throw ZeroProbabilityEvidence("cannot normalize a potential with total mass 0");
  return scale(p, 1.0 / mass);
}

Potential scale(const Potential& p, double factor) {
  std::vector<double> out(p.values().begin(), p.values().end());
  for (auto& x : out) x *= factor;
  return Potential(p.scope(), std::move(out));
}

Potential extend_with_evidence_indicator(const Potential& f0, const Evidence& observed) {
  if (observed.empty()) return f0;
  std::vector<Variable> added;
  for (const auto& [var, state] : observed) {
    if (f0.contains(var.id()))
      throw ContractViolation("indicator variable '" + var.name() + "' already in scope");
    if (state >= var.cardinality())
      throw InputError("state index out of range for '" + var.name() + "'");
    added.push_back(var);
  }
  auto scope = scope_union(f0.scope(), added);
  std::vector<double> out(checked_size(scope), 0.0);
  // Walk f0's cells; each lands on the slice where the added variables sit
  // at their observed states.
  const auto dst = strides_along(f0.scope(), scope);
  const auto own = strides_along(scope, scope);
  std::size_t base = 0;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    auto it = observed.find(scope[i]);
    if (it != observed.end()) base += it->second * own[i];
  }
  const auto src = f0.values();
  const std::vector<std::size_t> none(f0.scope().size(), 0);
  walk(cardinalities(f0.scope()), dst, none, base, 0,
       [&](std::size_t cell, std::size_t i, std::size_t) { out[i] = src[cell]; });
  return Potential(std::move(scope), std::move(out));
}

bool approx_equal(const Potential& a, const Potential& b, double rel, double abs_floor) {
  if (a.scope() != b.scope()) return false;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double diff = std::abs(va[i] - vb[i]);
    const double mag = std::max(std::abs(va[i]), std::abs(vb[i]));
    if (diff > std::max(abs_floor, rel * mag)) return false;
  }
  return true;
}

double max_relative_difference(const Potential& a, const Potential& b) {
  if (a.scope() != b.scope()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double mag = std::max(std::abs(va[i]), std::abs(vb[i]));
    if (mag > 0.0) worst = std::max(worst, std::abs(va[i] - vb[i]) / mag);
  }
  return worst;
}

}  // namespace ctp
