#include "ctp/oracle.hpp"

#include <algorithm>
#include <set>

#include "ctp/errors.hpp"

namespace ctp {
namespace {

std::vector<Variable> eliminated(const SemiBayesNet& n, const Query& q) {
  std::vector<Variable> out;
  for (const auto& v : n.variables())
    if (!scope_contains(q.targets, v.id()) && !q.evidence.count(v)) out.push_back(v);
  return out;
}

}  // namespace

Potential brute_force_marginal(const SemiBayesNet& n, const Query& q, double cap) {
  validate_query(n, q);
  const auto everything = scope_union(n.variables(), n.parameters());
  const double cells = state_space(everything);
  if (cells > cap)
    throw StateSpaceTooLarge("brute force over " + std::to_string(everything.size()) +
                             " variables needs " + std::to_string(cells) + " cells");
  // Start from ones over every variable so that variables outside all items
  // are enumerated like the rest.
  auto joint = Potential::ones(everything);
  for (const auto& item : n.items()) joint = multiply(joint, item->table);
  joint = restrict(joint, q.evidence);
  return marginalize_onto(joint, scope_union(q.targets, q.parameters));
}

Potential variable_elimination_marginal(const SemiBayesNet& n, const Query& q,
                                        const std::vector<Variable>& order) {
  validate_query(n, q);
  if (canonical_scope(order) != eliminated(n, q) || order.size() != eliminated(n, q).size())
    throw ContractViolation("elimination order must be a permutation of the unobserved non-targets");

  std::vector<Potential> factors;
  for (const auto& item : n.items()) factors.push_back(apply_evidence(item->table, q.evidence));
  double factor = 1.0;
  for (const auto& v : order) {
    Potential bucket;
    bool touched = false;
    std::vector<Potential> kept;
    for (auto& f : factors) {
      if (f.contains(v.id())) {
        bucket = multiply(bucket, f);
        touched = true;
      } else {
        kept.push_back(std::move(f));
      }
    }
    factors = std::move(kept);
    if (touched)
      factors.push_back(sum_out(bucket, {v}));
    else
      factor *= static_cast<double>(v.cardinality());
  }
  Potential result = Potential::scalar(factor);
  for (const auto& f : factors) result = multiply(result, f);
  std::vector<Variable> missing;
  for (const auto& x : q.targets)
    if (!result.contains(x.id())) missing.push_back(x);
  if (!missing.empty()) result = multiply(result, Potential::ones(missing));
  return result;
}

std::vector<Variable> min_degree_order(const SemiBayesNet& n, const Query& q) {
  auto remaining = eliminated(n, q);
  // Interaction graph over the restricted item scopes.
  std::vector<std::set<VarId>> scopes;
  for (const auto& item : n.items()) {
    std::set<VarId> s;
    for (const auto& v : item->table.scope())
      if (!q.evidence.count(v)) s.insert(v.id());
    scopes.push_back(std::move(s));
  }
  std::vector<Variable> order;
  while (!remaining.empty()) {
    std::size_t best = 0;
    std::size_t best_degree = SIZE_MAX;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      std::set<VarId> nb;
      for (const auto& s : scopes)
        if (s.count(remaining[i].id())) nb.insert(s.begin(), s.end());
      if (nb.size() < best_degree) best_degree = nb.size(), best = i;
    }
    const auto v = remaining[best];
    std::set<VarId> merged;
    std::vector<std::set<VarId>> next;
    for (auto& s : scopes) {
      if (s.count(v.id()))
        merged.insert(s.begin(), s.end());
      else
        next.push_back(std::move(s));
    }
    merged.erase(v.id());
    next.push_back(std::move(merged));
    scopes = std::move(next);
    order.push_back(v);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return order;
}

}  // namespace ctp
