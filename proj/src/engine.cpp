#include "ctp/engine.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "ctp/errors.hpp"

namespace ctp {
namespace {

std::vector<VertexSet> query_separators(const SemiBayesNet& n, const UGraph& g, const Query& q) {
  VertexSet laden;
  std::map<VertexId, VertexSet> parents;
  for (const auto& l : laden_nodes(n, q)) {
    laden.push_back(l.id());
    parents[l.id()] = n.dag().parents(l.id());
  }
  return nmc_separators(g, laden, parents);
}

std::string names_of(const SemiBayesNet& n, const VertexSet& ids) {
  return "{" + join_names(n.to_variables(ids)) + "}";
}

std::size_t measure(const SemiBayesNet& n) { return n.items().size() + n.variables().size(); }

bool observed(const Query& q, VarId id) {
  return std::any_of(q.evidence.begin(), q.evidence.end(),
                     [&](const auto& kv) { return kv.first.id() == id; });
}

// Items plus vertices of several nets; the nets never share an item.
SemiBayesNet union_of(const std::vector<SemiBayesNet>& nodes, const std::vector<bool>& alive,
                      std::size_t skip) {
  std::vector<Variable> vars;
  std::vector<ItemPtr> items;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!alive[k] || k == skip) continue;
    vars = scope_union(vars, nodes[k].variables());
    items.insert(items.end(), nodes[k].items().begin(), nodes[k].items().end());
  }
  return SemiBayesNet::from_items(std::move(vars), std::move(items));
}

class DefaultStrategy : public PickStrategy {
 public:
  std::string name() const override { return "default"; }
  std::size_t pick_leaf(std::span<const LeafCandidate> leaves) override {
    std::size_t best = 0;
    for (std::size_t i = 1; i < leaves.size(); ++i)
      if (leaves[i].state_space < leaves[best].state_space) best = i;
    return best;
  }
  std::size_t pick_laden_node(std::span<const LadenCandidate> laden) override {
    std::size_t best = 0;
    for (std::size_t i = 1; i < laden.size(); ++i)
      if (laden[i].state_space < laden[best].state_space) best = i;
    return best;
  }
};

class FirstLeafStrategy : public PickStrategy {
 public:
  std::string name() const override { return "first-leaf"; }
  std::size_t pick_leaf(std::span<const LeafCandidate>) override { return 0; }
  std::size_t pick_laden_node(std::span<const LadenCandidate>) override { return 0; }
};

class RandomStrategy : public PickStrategy {
 public:
  explicit RandomStrategy(std::uint64_t seed) : rng_(seed) {}
  std::string name() const override { return "random"; }
  std::size_t pick_leaf(std::span<const LeafCandidate> leaves) override { return draw(leaves.size()); }
  std::size_t pick_laden_node(std::span<const LadenCandidate> laden) override {
    return draw(laden.size());
  }

 private:
  std::size_t draw(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::mt19937_64 rng_;
};

class ScriptedStrategy : public DefaultStrategy {
 public:
  explicit ScriptedStrategy(std::vector<std::string> labels) : labels_(std::move(labels)) {}
  std::string name() const override { return "scripted"; }
  std::size_t pick_leaf(std::span<const LeafCandidate> leaves) override {
    if (next_ >= labels_.size() || leaves.front().depth != 0)
      return DefaultStrategy::pick_leaf(leaves);
    for (std::size_t i = 0; i < leaves.size(); ++i)
      if (leaves[i].label == labels_[next_]) {
        ++next_;
        return i;
      }
    throw ContractViolation("scripted pick '" + labels_[next_] + "' is not a current leaf");
  }

 private:
  std::vector<std::string> labels_;
  std::size_t next_ = 0;
};

}  // namespace

std::string node_label(std::size_t index) { return "C" + std::to_string(index); }

// ---------------------------------------------------------------------------
// Component tree

std::vector<std::size_t> ComponentTree::neighbors(std::size_t node) const {
  std::vector<std::size_t> out;
  for (const auto& l : links) {
    if (l.a == node) out.push_back(l.b);
    if (l.b == node) out.push_back(l.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ComponentTree::validate(const SemiBayesNet& original) const {
  if (nodes.empty() || links.size() + 1 != nodes.size())
    throw InternalError("component tree: " + std::to_string(nodes.size()) + " nodes but " +
                        std::to_string(links.size()) + " links");
  std::vector<bool> seen(nodes.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto w : neighbors(u))
      if (!seen[w]) seen[w] = true, stack.push_back(w);
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw InternalError("component tree is not connected");

  for (const auto& l : links) {
    const auto shared = vset::intersect(nodes[l.a].vertex_ids(), nodes[l.b].vertex_ids());
    if (shared != l.separator)
      throw InternalError("component tree: linked nodes share " + names_of(original, shared) +
                          ", not their separator " + names_of(original, l.separator));
  }
  // Running intersection: the nodes holding any one vertex form a subtree,
  // i.e. they are joined by (count - 1) links whose separators hold it.
  for (VertexId v : original.vertex_ids()) {
    std::size_t holders = 0;
    for (const auto& node : nodes) holders += vset::contains(node.vertex_ids(), v);
    std::size_t joins = 0;
    for (const auto& l : links) joins += vset::contains(l.separator, v);
    if (holders == 0 || joins + 1 != holders)
      throw InternalError("component tree breaks running intersection at '" +
                          original.variable(v).name() + "'");
  }
  std::vector<ItemPtr> items;
  for (const auto& node : nodes) items.insert(items.end(), node.items().begin(), node.items().end());
  std::sort(items.begin(), items.end());
  auto expected = original.items();
  std::sort(expected.begin(), expected.end());
  if (items != expected) throw InternalError("component tree nodes do not partition the items");
}

std::vector<std::string> ComponentTree::describe(std::size_t first_label) const {
  std::vector<std::string> out;
  std::vector<Variable> all;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string line = "NODE " + node_label(first_label + i) + ": vars={" +
                       join_names(nodes[i].variables()) + "} items=";
    for (std::size_t k = 0; k < nodes[i].items().size(); ++k)
      line += (k ? " " : "") + nodes[i].items()[k]->describe();
    out.push_back(line);
    all = scope_union(all, nodes[i].variables());
  }
  for (const auto& l : links) {
    std::vector<Variable> sep;
    for (const auto& v : all)
      if (vset::contains(l.separator, v.id())) sep.push_back(v);
    out.push_back("LINK " + node_label(first_label + l.a) + " -- " + node_label(first_label + l.b) +
                  ": {" + join_names(sep) + "}");
  }
  return out;
}

ComponentTree build_component_tree(const SemiBayesNet& n, const Query& q) {
  const auto g = n.moral_graph();
  if (connected_components(g).size() != 1)
    throw ContractViolation("build_component_tree: the moral graph is not connected");
  const auto separators = query_separators(n, g, q);
  if (separators.empty()) throw ContractViolation("build_component_tree: the net has no NMC separator");

  ComponentTree tree;
  tree.nodes.push_back(n);
  for (const auto& s : separators) {
    bool used = false;
    for (;;) {
      std::size_t i = 0;
      for (; i < tree.nodes.size(); ++i) {
        const auto vi = tree.nodes[i].vertex_ids();
        if (vset::is_subset(s, vi) && is_separator(g.induced(vi), s)) break;
      }
      if (i == tree.nodes.size()) break;
      used = true;
      const auto d = decompose_at(g.induced(tree.nodes[i].vertex_ids()), s);
      auto [c1, c2] = induced_decomposition(tree.nodes[i], d);
      for (auto& l : tree.links) {
        if (l.a > i) ++l.a;
        if (l.b > i) ++l.b;
        const bool moves = !vset::is_subset(l.separator, c1.vertex_ids());
        if (l.a == i && moves) l.a = i + 1;
        if (l.b == i && moves) l.b = i + 1;
      }
      tree.nodes[i] = std::move(c1);
      tree.nodes.insert(tree.nodes.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(c2));
      tree.links.push_back(TreeLink{i, i + 1, s});
    }
    if (!used)
      throw InternalError("separator " + names_of(n, s) + " splits no component of the tree");
  }
  tree.validate(n);
  return tree;
}

// ---------------------------------------------------------------------------
// Strategies and trace

std::shared_ptr<PickStrategy> make_default_strategy() { return std::make_shared<DefaultStrategy>(); }
std::shared_ptr<PickStrategy> make_first_leaf_strategy() {
  return std::make_shared<FirstLeafStrategy>();
}
std::shared_ptr<PickStrategy> make_random_strategy(std::uint64_t seed) {
  return std::make_shared<RandomStrategy>(seed);
}
std::shared_ptr<PickStrategy> make_scripted_strategy(std::vector<std::string> labels) {
  return std::make_shared<ScriptedStrategy>(std::move(labels));
}

std::string format_trace(const Trace& trace) {
  std::ostringstream os;
  for (const auto& line : trace.tree) os << line << '\n';
  for (const auto& s : trace.steps)
    os << "STEP " << s.index << ": pick=" << s.pick << " query=" << s.query
       << " append-to=" << s.append_to << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Free functions

Potential combine(const Potential& a1, const Potential& a2, const SubquerySplit& split) {
  std::vector<Variable> drop;
  auto product = multiply(a1, a2);
  for (VertexId v : split.separator) {
    const bool in_ys = std::any_of(split.ys.begin(), split.ys.end(),
                                   [&](const auto& kv) { return kv.first.id() == v; });
    if (in_ys) continue;
    if (!a1.contains(v) || !a2.contains(v))
      throw InternalError("combine: separator vertex " + std::to_string(v) +
                          " missing from an answer");
    if (!scope_contains(split.xs, v))
      drop.push_back(*std::find_if(product.scope().begin(), product.scope().end(),
                                   [&](const Variable& x) { return x.id() == v; }));
  }
  return sum_out(product, drop);
}

Potential direct_marginal(const SemiBayesNet& n, const Query& q) {
  Potential acc;
  std::vector<Variable> mentioned;
  for (const auto& item : n.items()) {
    mentioned = scope_union(mentioned, item->table.scope());
    acc = multiply(acc, apply_evidence(item->table, q.evidence));
  }
  std::vector<Variable> drop;
  for (const auto& v : acc.scope())
    if (!scope_contains(q.targets, v.id()) && !scope_contains(q.parameters, v.id())) drop.push_back(v);
  acc = sum_out(acc, drop);

  double factor = 1.0;
  std::vector<Variable> free_targets;
  for (const auto& v : n.variables()) {
    if (scope_contains(mentioned, v.id()) || q.evidence.count(v)) continue;
    if (scope_contains(q.targets, v.id()))
      free_targets.push_back(v);
    else
      factor *= static_cast<double>(v.cardinality());
  }
  if (factor != 1.0) acc = scale(acc, factor);
  if (!free_targets.empty()) acc = multiply(acc, Potential::ones(free_targets));
  return acc;
}

Potential main_query(const SemiBayesNet& n, const Query& q, std::shared_ptr<PickStrategy> strategy) {
  EngineConfig config;
  config.strategy = std::move(strategy);
  return Engine(std::move(config)).answer(n, q);
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  if (!config_.strategy) config_.strategy = make_default_strategy();
}

void Engine::reset() {
  stats_ = {};
  trace_ = {};
  traced_nodes_ = 0;
}

void Engine::warn(const std::string& message) {
  if (config_.warn) config_.warn(message);
}

void Engine::begin(const SemiBayesNet& n, const Query& q) {
  validate_query(n, q);
  depth_ = 0;
  VarId top = -1;
  for (const auto& v : n.variables()) top = std::max(top, v.id());
  for (const auto& w : n.parameters()) top = std::max(top, w.id());
  next_aux_id_ = std::max(next_aux_id_, top + 1);
}

Potential Engine::answer(const SemiBayesNet& n, const Query& q) {
  begin(n, q);
  return main(n, q);
}

Potential Engine::serial_reduction(const SemiBayesNet& n, const Query& q) {
  begin(n, q);
  return serial(n, q);
}

Potential Engine::parallel_reduction1(const SemiBayesNet& n, const Query& q) {
  begin(n, q);
  return parallel(n, q);
}

Potential Engine::posterior(const SemiBayesNet& n, std::vector<Variable> targets,
                            const Evidence& evidence) {
  if (!n.is_bayesian())
    throw ModelError("a posterior needs a Bayesian net; unspecified roots: {" +
                     join_names(n.unspecified_roots()) + "}");
  const auto q = make_query(n, std::move(targets), evidence);
  const auto joint = answer(n, q);
  if (!(joint.total() > 0.0))
    throw ZeroProbabilityEvidence("evidence " + format_evidence(evidence, ", ") +
                                  " has probability 0");
  return normalize(joint);
}

Potential Engine::main(const SemiBayesNet& n, const Query& q) {
  ++stats_.main_calls;
  if (n.empty()) return Potential::scalar(1.0);
  const auto g = n.moral_graph();
  const auto components = connected_components(g);
  if (components.size() > 1) return split_components(n, q, components);
  if (!query_separators(n, g, q).empty()) return serial(n, q);
  return parallel(n, q);
}

Potential Engine::recurse(const SemiBayesNet& parent, const SemiBayesNet& child, const Query& q) {
  const bool smaller = child.items().size() < parent.items().size() ||
                       child.variables().size() < parent.variables().size();
  if (!smaller)
    throw InternalError("recursion on a net that is not smaller: " +
                        std::to_string(measure(child)) + " vs " + std::to_string(measure(parent)));
  ++stats_.recursion_checks;
  ++depth_;
  auto result = main(child, q);
  --depth_;
  return result;
}

Potential Engine::split_components(const SemiBayesNet& n, const Query& q,
                                   const std::vector<VertexSet>& components) {
  Potential acc;
  for (const auto& comp : components) {
    auto part = subnet(n, comp);
    Query sub{{}, {}, part.parameters()};
    for (const auto& x : q.targets)
      if (vset::contains(comp, x.id())) sub.targets.push_back(x);
    for (const auto& [y, state] : q.evidence)
      if (vset::contains(comp, y.id())) sub.evidence.emplace(y, state);
    acc = multiply(acc, recurse(n, part, sub));
  }
  return acc;
}

Potential Engine::serial(const SemiBayesNet& n, const Query& q) {
  const auto tree = build_component_tree(n, q);
  const bool tracing = config_.record_trace && depth_ == 0;
  const std::size_t base = tracing ? traced_nodes_ : 0;
  if (tracing) {
    for (auto& line : tree.describe(base)) trace_.tree.push_back(std::move(line));
    traced_nodes_ += tree.nodes.size();
  }

  auto nodes = tree.nodes;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < nodes.size(); ++i) labels.push_back(node_label(base + i));
  std::vector<bool> alive(nodes.size(), true);
  std::size_t alive_count = nodes.size();

  std::size_t aux_counter = 0;
  auto fresh_name = [&] {
    for (;;) {
      auto name = "v" + std::to_string(++aux_counter);
      const bool taken = n.find(name).has_value() ||
                         std::any_of(n.parameters().begin(), n.parameters().end(),
                                     [&](const Variable& w) { return w.name() == name; });
      if (!taken) return name;
    }
  };

  Query cq = q;
  while (alive_count > 1) {
    std::vector<LeafCandidate> candidates;
    std::vector<const TreeLink*> candidate_links;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!alive[i]) continue;
      const TreeLink* only = nullptr;
      int degree = 0;
      for (const auto& l : tree.links)
        if ((l.a == i && alive[l.b]) || (l.b == i && alive[l.a])) ++degree, only = &l;
      if (degree != 1) continue;
      const auto& leaf = nodes[i];
      std::vector<Variable> scope = leaf.parameters();
      for (const auto& v : leaf.variables()) {
        const bool in_s = vset::contains(only->separator, v.id());
        if ((in_s && !observed(cq, v.id())) || (!in_s && scope_contains(cq.targets, v.id())))
          scope.push_back(v);
      }
      scope = canonical_scope(std::move(scope));
      const double space = state_space(scope);
      candidates.push_back(LeafCandidate{i, labels[i], std::move(scope), space, depth_});
      candidate_links.push_back(only);
    }
    if (candidates.empty()) throw InternalError("component tree has no leaf");
    const auto pos = config_.strategy->pick_leaf(candidates);
    if (pos >= candidates.size()) throw ContractViolation("pick_leaf returned an invalid position");
    const auto i = candidates[pos].node;
    const auto& link = *candidate_links[pos];
    const auto j = link.a == i ? link.b : link.a;
    const auto& s = link.separator;

    const auto rest = union_of(nodes, alive, i);
    const auto current = net_union(nodes[i], rest);
    if (!is_complete(current.moral_graph(), s) ||
        vset::intersect(nodes[i].vertex_ids(), rest.vertex_ids()) != s)
      throw InternalError("separator " + names_of(n, s) + " would need a fill edge");
    ++stats_.separator_checks;

    const Decomposition d{s, nodes[i].vertex_ids(), rest.vertex_ids()};
    const auto iq = split_query(cq, d, nodes[i], rest);
    const auto f0 = recurse(current, nodes[i], iq.first);
    const auto f = extend_with_evidence_indicator(f0, iq.split.ys);
    const auto aux = make_auxiliary(next_aux_id_++, fresh_name());

    if (tracing)
      trace_.steps.push_back(
          TraceStep{trace_.steps.size() + 1, labels[i], format_query(iq.first), labels[j]});
    nodes[j] = append_answer(nodes[j], s, f, aux);
    labels[j] += "'";
    alive[i] = false;
    --alive_count;
    ++stats_.serial_steps;

    cq.targets = scope_difference(cq.targets, iq.split.x1);
    for (const auto& [y, state] : iq.split.y1) cq.evidence.erase(y);
    cq.evidence.emplace(aux, 0);
    cq.parameters = scope_union(cq.parameters, iq.split.x1);
    const auto updated = union_of(nodes, alive, nodes.size());
    validate_query(updated, cq);
    if (config_.observer && depth_ == 0) config_.observer(updated, cq);
  }

  const auto last = static_cast<std::size_t>(std::find(alive.begin(), alive.end(), true) - alive.begin());
  const auto& final_node = nodes[last];
  if (tracing)
    trace_.steps.push_back(TraceStep{trace_.steps.size() + 1, labels[last], format_query(cq), "-"});
  if (final_node.items().size() < n.items().size() ||
      final_node.variables().size() < n.variables().size())
    return recurse(n, final_node, cq);
  // Several answers appended on one separator can rebuild a net as large as
  // `n`; their laden auxiliary leaves make a laden-node split available.
  return parallel(final_node, cq);
}

Potential Engine::parallel(const SemiBayesNet& n, const Query& q) {
  if (is_simple(n)) {
    ++stats_.direct_marginals;
    return direct_marginal(n, q);
  }
  const auto laden = laden_nodes(n, q);
  if (laden.empty()) {
    warn("no NMC separator and no laden node in a non-simple net over {" +
         join_names(n.variables()) + "}; marginalizing directly");
    ++stats_.fallback_count;
    ++stats_.direct_marginals;
    return direct_marginal(n, q);
  }
  std::vector<LadenCandidate> candidates;
  for (const auto& l : laden) {
    auto parents = n.to_variables(n.dag().parents(l.id()));
    const double space = state_space(parents);
    candidates.push_back(LadenCandidate{l, std::move(parents), space});
  }
  const auto pos = config_.strategy->pick_laden_node(candidates);
  if (pos >= candidates.size()) throw ContractViolation("pick_laden_node returned an invalid position");
  const auto& l = candidates[pos].node;
  const auto& s = n.dag().parents(l.id());

  const auto g = n.moral_graph();
  if (!is_complete(g, s)) throw InternalError("parents of '" + l.name() + "' are not married");
  ++stats_.separator_checks;
  const auto d = decompose_at(g, s, l.id());
  const auto [n1, n2] = induced_decomposition(n, d);
  const auto iq = split_query(q, d, n1, n2);
  ++stats_.laden_splits;
  const auto a1 = recurse(n, n1, iq.first);
  const auto a2 = recurse(n, n2, iq.second);
  return combine(a1, a2, iq.split);
}

}  // namespace ctp
