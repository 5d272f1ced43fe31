#include "ctp/semibn.hpp"

#include <algorithm>
#include <set>

#include "ctp/errors.hpp"

namespace ctp {
namespace {

VertexSet ids_of(const std::vector<Variable>& vars) {
  VertexSet out;
  for (const auto& v : vars) out.push_back(v.id());
  return vset::make(std::move(out));
}

std::vector<Arc> arcs_of(const std::vector<ItemPtr>& items) {
  std::vector<Arc> arcs;
  for (const auto& item : items)
    for (const auto& p : item->parents) arcs.emplace_back(p.id(), item->child.id());
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  return arcs;
}

}  // namespace

VertexSet Item::family() const {
  VertexSet out{child.id()};
  for (const auto& p : parents) out.push_back(p.id());
  return vset::make(std::move(out));
}

std::string Item::describe() const {
  std::string out = "P(" + child.name();
  if (is_sliced()) out += "=0";
  if (!parents.empty()) out += "|" + join_names(parents);
  std::vector<Variable> extra;
  for (const auto& v : table.scope())
    if (v != child && std::find(parents.begin(), parents.end(), v) == parents.end())
      extra.push_back(v);
  if (!extra.empty()) out += " : " + join_names(extra);
  return out + ")";
}

ItemPtr make_item(Variable child, std::vector<Variable> parents, Potential table) {
  return std::make_shared<const Item>(Item{std::move(child), std::move(parents), std::move(table)});
}

// ---------------------------------------------------------------------------

SemiBayesNet::SemiBayesNet(std::vector<Variable> variables, std::vector<Arc> arcs,
                           std::vector<ItemPtr> items)
    : variables_(canonical_scope(std::move(variables))), items_(std::move(items)) {
  std::set<std::string_view> names;
  for (const auto& v : variables_)
    if (!names.insert(v.name()).second) throw ModelError("duplicate variable name '" + v.name() + "'");

  std::sort(items_.begin(), items_.end(),
            [](const ItemPtr& a, const ItemPtr& b) { return a->child < b->child; });
  dag_ = DiGraph(ids_of(variables_), arcs);
  if (dag_.arcs() != arcs_of(items_))
    throw ModelError("arcs must be exactly the parent links of the items");

  std::vector<Variable> table_vars;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const Item& item = *items_[i];
    const auto& child = item.child;
    if (i > 0 && items_[i - 1]->child == child)
      throw ModelError("two conditionals for '" + child.name() + "'");
    if (!has_variable(child.id()) || !variable(child.id()).same_definition(child))
      throw ModelError("conditional for unknown variable '" + child.name() + "'");
    const auto parents = canonical_scope(item.parents);
    if (parents.size() != item.parents.size())
      throw ModelError("repeated parent in the conditional for '" + child.name() + "'");
    if (ids_of(parents) != dag_.parents(child.id()))
      throw ModelError("parents of '" + child.name() + "' disagree with the graph");
    if (!scope_includes(item.table.scope(), parents))
      throw ModelError("table for '" + child.name() + "' does not cover its parents");
    if (item.is_sliced() && child.kind() != VariableKind::auxiliary)
      throw ModelError("table for '" + child.name() + "' omits the child");
    const auto family = item.family();
    for (const auto& v : item.table.scope()) {
      if (has_variable(v.id())) {
        if (!vset::contains(family, v.id()))
          throw ModelError("table for '" + child.name() + "' mentions '" + v.name() +
                           "', which is neither the child nor a parent");
        if (!variable(v.id()).same_definition(v))
          throw ModelError("table for '" + child.name() + "' redefines '" + v.name() + "'");
      } else {
        table_vars.push_back(v);
      }
    }
  }
  parameters_ = canonical_scope(std::move(table_vars));
  for (const auto& w : parameters_)
    if (names.count(w.name()))
      throw ModelError("parameter '" + w.name() + "' shares its name with a net variable");

  for (const auto& v : variables_) {
    const bool owned = item_for(v.id()) != nullptr;
    const bool root = dag_.parents(v.id()).empty();
    if (!owned && !root)
      throw ModelError("'" + v.name() + "' has parents but no conditional");
    if (!owned) unspecified_roots_.push_back(v);
  }
}

SemiBayesNet SemiBayesNet::from_items(std::vector<Variable> variables, std::vector<ItemPtr> items) {
  auto arcs = arcs_of(items);
  return SemiBayesNet(std::move(variables), std::move(arcs), std::move(items));
}

const Variable& SemiBayesNet::variable(VarId id) const {
  auto it = std::lower_bound(variables_.begin(), variables_.end(), id,
                             [](const Variable& v, VarId x) { return v.id() < x; });
  if (it == variables_.end() || it->id() != id)
    throw ContractViolation("variable id " + std::to_string(id) + " not in net");
  return *it;
}

std::optional<Variable> SemiBayesNet::find(std::string_view name) const {
  for (const auto& v : variables_)
    if (v.name() == name) return v;
  return std::nullopt;
}

ItemPtr SemiBayesNet::item_for(VarId child) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), child,
                             [](const ItemPtr& a, VarId x) { return a->child.id() < x; });
  if (it == items_.end() || (*it)->child.id() != child) return nullptr;
  return *it;
}

std::vector<Variable> SemiBayesNet::to_variables(const VertexSet& ids) const {
  std::vector<Variable> out;
  out.reserve(ids.size());
  for (VertexId id : ids) out.push_back(variable(id));
  return out;
}

// ---------------------------------------------------------------------------

void validate_query(const SemiBayesNet& n, const Query& q) {
  for (const auto& x : q.targets)
    if (!n.has_variable(x.id())) throw ContractViolation("target '" + x.name() + "' is not in the net");
  for (const auto& [y, state] : q.evidence) {
    if (!n.has_variable(y.id()))
      throw ContractViolation("observed '" + y.name() + "' is not in the net");
    if (state >= y.cardinality())
      throw InputError("state index " + std::to_string(state) + " out of range for '" + y.name() + "'");
    if (scope_contains(q.targets, y.id()))
      throw ContractViolation("'" + y.name() + "' is both a target and observed");
  }
  if (q.parameters != n.parameters())
    throw ContractViolation("query parameters {" + join_names(q.parameters) +
                            "} differ from the net's {" + join_names(n.parameters()) + "}");
}

Query make_query(const SemiBayesNet& n, std::vector<Variable> targets, Evidence evidence) {
  Query q{canonical_scope(std::move(targets)), std::move(evidence), n.parameters()};
  validate_query(n, q);
  return q;
}

std::string format_query(const Query& q) {
  auto field = [](std::string s) { return s.empty() ? std::string("-") : s; };
  return field(join_names(q.targets)) + ";" + field(format_evidence(q.evidence)) + ";" +
         field(join_names(q.parameters));
}

Potential prior_joint_potential(const SemiBayesNet& n) {
  Potential joint;
  for (const auto& item : n.items()) joint = multiply(joint, item->table);
  return joint;
}

std::pair<SemiBayesNet, SemiBayesNet> induced_decomposition(const SemiBayesNet& n,
                                                            const Decomposition& d) {
  const auto all = n.vertex_ids();
  if (vset::unite(d.part1, d.part2) != all || vset::intersect(d.part1, d.part2) != d.separator)
    throw ContractViolation("decomposition does not cover the net or its parts overlap off the separator");
  const auto only_first = vset::minus(d.part1, d.part2);
  std::vector<ItemPtr> first, second;
  for (const auto& item : n.items()) {
    const auto fam = item->family();
    if (!vset::is_subset(fam, d.part1) && !vset::is_subset(fam, d.part2))
      throw ContractViolation(item->describe() + " straddles the separator");
    (vset::intersect(fam, only_first).empty() ? second : first).push_back(item);
  }
  return {SemiBayesNet::from_items(n.to_variables(d.part1), std::move(first)),
          SemiBayesNet::from_items(n.to_variables(d.part2), std::move(second))};
}

SemiBayesNet subnet(const SemiBayesNet& n, const VertexSet& keep) {
  const auto kept = vset::intersect(n.vertex_ids(), keep);
  std::vector<ItemPtr> items;
  for (const auto& item : n.items())
    if (vset::is_subset(item->family(), kept)) items.push_back(item);
  return SemiBayesNet::from_items(n.to_variables(kept), std::move(items));
}

SemiBayesNet net_union(const SemiBayesNet& a, const SemiBayesNet& b) {
  auto vars = scope_union(a.variables(), b.variables());
  std::vector<ItemPtr> items(a.items());
  for (const auto& item : b.items()) {
    auto mine = a.item_for(item->child.id());
    if (mine == item) continue;
    if (mine) throw ModelError("both nets define a conditional for '" + item->child.name() + "'");
    items.push_back(item);
  }
  return SemiBayesNet::from_items(std::move(vars), std::move(items));
}

InducedQueries split_query(const Query& q, const Decomposition& d, const SemiBayesNet& n1,
                           const SemiBayesNet& n2) {
  SubquerySplit s;
  s.separator = d.separator;
  for (const auto& x : q.targets) {
    if (vset::contains(d.separator, x.id()))
      s.xs.push_back(x);
    else if (vset::contains(d.part1, x.id()))
      s.x1.push_back(x);
    else
      s.x2.push_back(x);
  }
  for (const auto& [y, state] : q.evidence) {
    if (vset::contains(d.separator, y.id()))
      s.ys.emplace(y, state);
    else if (vset::contains(d.part1, y.id()))
      s.y1.emplace(y, state);
    else
      s.y2.emplace(y, state);
  }
  s.y_minus_1 = s.ys;
  s.y_minus_1.insert(s.y2.begin(), s.y2.end());
  s.y_minus_2 = s.ys;
  s.y_minus_2.insert(s.y1.begin(), s.y1.end());

  VertexSet unobserved_sep;
  for (VertexId v : d.separator)
    if (std::none_of(s.ys.begin(), s.ys.end(), [&](const auto& kv) { return kv.first.id() == v; }))
      unobserved_sep.push_back(v);

  InducedQueries out;
  out.first = Query{scope_union(s.x1, n1.to_variables(unobserved_sep)), s.y_minus_2, n1.parameters()};
  out.second = Query{scope_union(s.x2, n2.to_variables(unobserved_sep)), s.y_minus_1, n2.parameters()};
  out.split = std::move(s);
  return out;
}

Variable make_auxiliary(VarId id, std::string name) {
  return Variable(id, std::move(name), {"0", "1"}, VariableKind::auxiliary);
}

SemiBayesNet append_answer(const SemiBayesNet& n1, const VertexSet& separator, const Potential& f,
                           const Variable& auxiliary) {
  if (!vset::is_subset(separator, n1.vertex_ids()))
    throw ContractViolation("append_answer: separator is not inside the net");
  const auto sep_vars = n1.to_variables(separator);
  if (!scope_includes(f.scope(), sep_vars))
    throw ContractViolation("append_answer: answer scope {" + join_names(f.scope()) +
                            "} does not cover the separator {" + join_names(sep_vars) + "}");
  for (const auto& v : scope_difference(f.scope(), sep_vars))
    if (n1.has_variable(v.id()))
      throw ContractViolation("append_answer: '" + v.name() + "' would be both a vertex and a parameter");
  const bool clash =
      n1.has_variable(auxiliary.id()) || scope_contains(n1.parameters(), auxiliary.id()) ||
      n1.find(auxiliary.name()).has_value() ||
      std::any_of(n1.parameters().begin(), n1.parameters().end(),
                  [&](const Variable& w) { return w.name() == auxiliary.name(); });
  if (clash) throw InternalError("auxiliary variable '" + auxiliary.name() + "' is not fresh");

  auto vars = n1.variables();
  vars.push_back(auxiliary);
  auto items = n1.items();
  items.push_back(make_item(auxiliary, sep_vars, f));
  return SemiBayesNet::from_items(std::move(vars), std::move(items));
}

bool is_simple(const SemiBayesNet& n) {
  const auto leaves = n.dag().leaves();
  if (leaves.size() != 1) return false;
  return vset::minus(n.vertex_ids(), leaves) == n.dag().parents(leaves.front());
}

std::vector<Variable> laden_nodes(const SemiBayesNet& n, const Query& q) {
  std::vector<Variable> out;
  for (VertexId leaf : n.dag().leaves()) {
    const auto& v = n.variable(leaf);
    if (q.evidence.count(v)) out.push_back(v);
  }
  return out;
}

bool structurally_equal(const SemiBayesNet& a, const SemiBayesNet& b) {
  if (a.variables().size() != b.variables().size() || a.items().size() != b.items().size())
    return false;
  for (std::size_t i = 0; i < a.variables().size(); ++i)
    if (!a.variables()[i].same_definition(b.variables()[i])) return false;
  if (a.dag().arcs() != b.dag().arcs()) return false;
  for (std::size_t i = 0; i < a.items().size(); ++i) {
    const auto& x = *a.items()[i];
    const auto& y = *b.items()[i];
    if (a.items()[i] == b.items()[i]) continue;
    if (x.child != y.child || x.parents != y.parents || x.table.scope() != y.table.scope()) return false;
    if (!std::equal(x.table.values().begin(), x.table.values().end(), y.table.values().begin()))
      return false;
  }
  return true;
}

}  // namespace ctp
