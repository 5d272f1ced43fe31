#include "ctp/variable.hpp"

#include <algorithm>
#include <set>

#include "ctp/errors.hpp"

namespace ctp {

Variable::Variable(VarId id, std::string name, std::vector<std::string> states, VariableKind kind) {
  if (states.empty()) throw ModelError("variable '" + name + "' has no states");
  std::set<std::string_view> seen;
  for (const auto& s : states) {
    if (!seen.insert(s).second)
      throw ModelError("variable '" + name + "' has duplicate state '" + s + "'");
  }
  data_ = std::make_shared<const Data>(Data{id, std::move(name), std::move(states), kind});
}

std::optional<std::size_t> Variable::state_index(std::string_view label) const {
  const auto& s = states();
  auto it = std::find(s.begin(), s.end(), label);
  if (it == s.end()) return std::nullopt;
  return static_cast<std::size_t>(it - s.begin());
}

bool Variable::same_definition(const Variable& other) const {
  return data_ == other.data_ ||
         (id() == other.id() && name() == other.name() && states() == other.states());
}

std::vector<Variable> canonical_scope(std::vector<Variable> vars) {
  std::sort(vars.begin(), vars.end());
  std::vector<Variable> out;
  out.reserve(vars.size());
  for (auto& v : vars) {
    if (!out.empty() && out.back() == v) {
      if (!out.back().same_definition(v))
        throw ModelError("variable id " + std::to_string(v.id()) + " is bound to both '" +
                         out.back().name() + "' and '" + v.name() + "'");
      continue;
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Variable> scope_union(const std::vector<Variable>& a, const std::vector<Variable>& b) {
  std::vector<Variable> all(a);
  all.insert(all.end(), b.begin(), b.end());
  return canonical_scope(std::move(all));
}

std::vector<Variable> scope_difference(const std::vector<Variable>& a,
                                       const std::vector<Variable>& b) {
  std::vector<Variable> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Variable> scope_intersection(const std::vector<Variable>& a,
                                         const std::vector<Variable>& b) {
  std::vector<Variable> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool scope_contains(const std::vector<Variable>& scope, VarId id) {
  auto it = std::lower_bound(scope.begin(), scope.end(), id,
                             [](const Variable& v, VarId x) { return v.id() < x; });
  return it != scope.end() && it->id() == id;
}

bool scope_includes(const std::vector<Variable>& outer, const std::vector<Variable>& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

double state_space(const std::vector<Variable>& scope) {
  double n = 1.0;
  for (const auto& v : scope) n *= static_cast<double>(v.cardinality());
  return n;
}

std::string join_names(const std::vector<Variable>& vars, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += sep;
    out += vars[i].name();
  }
  return out;
}

std::string format_evidence(const Evidence& evidence, std::string_view sep) {
  std::string out;
  bool first = true;
  for (const auto& [var, state] : evidence) {
    if (!first) out += sep;
    first = false;
    out += var.name();
    out += '=';
    out += state < var.cardinality() ? var.states()[state] : "#" + std::to_string(state);
  }
  return out;
}

}  // namespace ctp
