#pragma once

#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ctp/graph.hpp"
#include "ctp/potential.hpp"
#include "ctp/variable.hpp"

namespace ctp {

/// One conditional P(child | parents), possibly mentioning parameters.
///
/// For an auxiliary child the table holds only the child = 0 slice, so the
/// child itself is absent from the table scope.
struct Item {
  Variable child;
  std::vector<Variable> parents;  // declaration order
  Potential table;

  /// {child} plus parents, as vertex ids.
  VertexSet family() const;
  bool is_sliced() const { return !table.contains(child.id()); }
  std::string describe() const;
};

using ItemPtr = std::shared_ptr<const Item>;

ItemPtr make_item(Variable child, std::vector<Variable> parents, Potential table);

/// A Bayesian net whose roots may lack priors, optionally carrying parameters.
///
/// The unspecified roots are the roots with no item; the parameters are the
/// table variables that are not vertices of the DAG. Both are derived, never
/// declared. Nets are immutable and share their item tables.
class SemiBayesNet {
 public:
  SemiBayesNet() = default;
  SemiBayesNet(std::vector<Variable> variables, std::vector<Arc> arcs, std::vector<ItemPtr> items);

  /// Builds the arcs from the items' parent lists.
  static SemiBayesNet from_items(std::vector<Variable> variables, std::vector<ItemPtr> items);

  const std::vector<Variable>& variables() const { return variables_; }
  const DiGraph& dag() const { return dag_; }
  const std::vector<ItemPtr>& items() const { return items_; }
  const std::vector<Variable>& unspecified_roots() const { return unspecified_roots_; }
  const std::vector<Variable>& parameters() const { return parameters_; }
  VertexSet vertex_ids() const { return dag_.vertices(); }

  bool empty() const { return variables_.empty(); }
  bool is_bayesian() const { return unspecified_roots_.empty() && parameters_.empty(); }
  bool has_variable(VarId id) const { return scope_contains(variables_, id); }
  const Variable& variable(VarId id) const;
  std::optional<Variable> find(std::string_view name) const;
  ItemPtr item_for(VarId child) const;
  std::vector<Variable> to_variables(const VertexSet& ids) const;

  UGraph moral_graph() const { return moralize(dag_); }

 private:
  std::vector<Variable> variables_;
  DiGraph dag_;
  std::vector<ItemPtr> items_;  // sorted by child id
  std::vector<Variable> unspecified_roots_;
  std::vector<Variable> parameters_;
};

/// P_N(X, Y = Y0 : W). Targets and parameters are sorted by id.
struct Query {
  std::vector<Variable> targets;
  Evidence evidence;
  std::vector<Variable> parameters;
};

/// Query over `n` with the net's own parameter set. Validates that targets
/// and evidence are net variables, disjoint, and carry legal states.
Query make_query(const SemiBayesNet& n, std::vector<Variable> targets, Evidence evidence = {});
void validate_query(const SemiBayesNet& n, const Query& q);
/// "targets;evidence;params" with '-' for an empty field.
std::string format_query(const Query& q);

/// Product of all items; its scope is the union of the item scopes.
Potential prior_joint_potential(const SemiBayesNet& n);

/// Splits `n` along a decomposition of its moral graph. Items that mention a
/// vertex of part1 - part2 go to the first net, the rest to the second, so an
/// item lying wholly inside the separator ends up in the second. Each part
/// keeps the arcs into the children it owns an item for; unspecified roots
/// are recomputed.
std::pair<SemiBayesNet, SemiBayesNet> induced_decomposition(const SemiBayesNet& n,
                                                            const Decomposition& d);

/// Sub-net on `keep`: its vertices and the items whose family lies inside.
SemiBayesNet subnet(const SemiBayesNet& n, const VertexSet& keep);

/// Componentwise union; throws ModelError when both nets define a
/// conditional for the same variable.
SemiBayesNet net_union(const SemiBayesNet& a, const SemiBayesNet& b);

/// How a query's targets and evidence fall relative to a separator.
struct SubquerySplit {
  VertexSet separator;
  std::vector<Variable> x1, x2, xs;
  Evidence y1, y2, ys;
  Evidence y_minus_1;  // ys + y2, the evidence seen by the second part
  Evidence y_minus_2;  // ys + y1, the evidence seen by the first part
};

struct InducedQueries {
  SubquerySplit split;
  Query first;   // P_N1(X1, S - YS, Y-2 : W1)
  Query second;  // P_N2(X2, S - YS, Y-1 : W2)
};

InducedQueries split_query(const Query& q, const Decomposition& d, const SemiBayesNet& n1,
                           const SemiBayesNet& n2);

/// Grafts an answer `f` (whose scope covers `separator`) onto `n1` through a
/// fresh binary auxiliary child of every separator vertex; only the
/// aux = 0 slice P(aux = 0 | separator) = f is stored. Variables of f outside
/// the separator become parameters of the result.
SemiBayesNet append_answer(const SemiBayesNet& n1, const VertexSet& separator, const Potential& f,
                           const Variable& auxiliary);

/// A fresh binary auxiliary variable with states "0" and "1".
Variable make_auxiliary(VarId id, std::string name);

/// One leaf, and every other vertex is a parent of it.
bool is_simple(const SemiBayesNet& n);

/// Leaves of the DAG that carry evidence in `q`.
std::vector<Variable> laden_nodes(const SemiBayesNet& n, const Query& q);

/// Same variables, arcs and item tables (compared by identity of the shared
/// tables or by value).
bool structurally_equal(const SemiBayesNet& a, const SemiBayesNet& b);

}  // namespace ctp
