#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctp {

using VarId = int;

enum class VariableKind { net, parameter, auxiliary };

/// A discrete variable with a fixed, ordered list of state labels.
///
/// Copies share the same immutable definition, so passing Variables around by
/// value is cheap. Two Variables compare equal when their ids are equal;
/// `same_definition` checks that name and states agree as well.
class Variable {
 public:
  Variable(VarId id, std::string name, std::vector<std::string> states,
           VariableKind kind = VariableKind::net);

  VarId id() const { return data_->id; }
  const std::string& name() const { return data_->name; }
  const std::vector<std::string>& states() const { return data_->states; }
  std::size_t cardinality() const { return data_->states.size(); }
  VariableKind kind() const { return data_->kind; }

  std::optional<std::size_t> state_index(std::string_view label) const;
  bool same_definition(const Variable& other) const;

  friend bool operator==(const Variable& a, const Variable& b) { return a.id() == b.id(); }
  friend std::strong_ordering operator<=>(const Variable& a, const Variable& b) {
    return a.id() <=> b.id();
  }

 private:
  struct Data {
    VarId id;
    std::string name;
    std::vector<std::string> states;
    VariableKind kind;
  };
  std::shared_ptr<const Data> data_;
};

/// Observed values: variable -> state index. Ordered by variable id.
using Evidence = std::map<Variable, std::size_t>;

/// Sorts by id and drops duplicates; throws ModelError if two entries share
/// an id but disagree on name or states.
std::vector<Variable> canonical_scope(std::vector<Variable> vars);

std::vector<Variable> scope_union(const std::vector<Variable>& a, const std::vector<Variable>& b);
std::vector<Variable> scope_difference(const std::vector<Variable>& a,
                                       const std::vector<Variable>& b);
std::vector<Variable> scope_intersection(const std::vector<Variable>& a,
                                         const std::vector<Variable>& b);
bool scope_contains(const std::vector<Variable>& scope, VarId id);
bool scope_includes(const std::vector<Variable>& outer, const std::vector<Variable>& inner);

/// Product of cardinalities, as a double so large scopes do not overflow.
double state_space(const std::vector<Variable>& scope);

std::string join_names(const std::vector<Variable>& vars, std::string_view sep = ",");
std::string format_evidence(const Evidence& evidence, std::string_view sep = ",");

}  // namespace ctp
