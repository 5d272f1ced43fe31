#include "ctp/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

#include "ctp/errors.hpp"

namespace ctp {

namespace vset {

VertexSet make(std::vector<VertexId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool contains(const VertexSet& s, VertexId v) { return std::binary_search(s.begin(), s.end(), v); }

bool is_subset(const VertexSet& inner, const VertexSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

VertexSet unite(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet minus(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet intersect(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace vset

// ---------------------------------------------------------------------------
// DiGraph

DiGraph::DiGraph(VertexSet vertices, std::vector<Arc> arcs) : vertices_(vset::make(std::move(vertices))) {
  parents_.resize(vertices_.size());
  children_.resize(vertices_.size());
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  for (const auto& [from, to] : arcs) {
    if (!has_vertex(from) || !has_vertex(to))
      throw ContractViolation("arc " + std::to_string(from) + "->" + std::to_string(to) +
                              " has an endpoint outside the vertex set");
    if (from == to) throw ModelError("self-loop on vertex " + std::to_string(from));
    parents_[index_of(to)].push_back(from);
    children_[index_of(from)].push_back(to);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  arcs_ = std::move(arcs);
  if (topological_order().size() != vertices_.size()) throw ModelError("cycle detected in the directed graph");
}

std::size_t DiGraph::index_of(VertexId v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || *it != v)
    throw ContractViolation("vertex " + std::to_string(v) + " not in graph");
  return static_cast<std::size_t>(it - vertices_.begin());
}

const VertexSet& DiGraph::parents(VertexId v) const { return parents_[index_of(v)]; }
const VertexSet& DiGraph::children(VertexId v) const { return children_[index_of(v)]; }

VertexSet DiGraph::roots() const {
  VertexSet out;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (parents_[i].empty()) out.push_back(vertices_[i]);
  return out;
}

VertexSet DiGraph::leaves() const {
  VertexSet out;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (children_[i].empty()) out.push_back(vertices_[i]);
  return out;
}

std::vector<VertexId> DiGraph::topological_order() const {
  std::vector<std::size_t> indegree(vertices_.size());
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    indegree[i] = parents_[i].size();
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<VertexId> order;
  while (!ready.empty()) {
    const auto i = ready.top();
    ready.pop();
    order.push_back(vertices_[i]);
    for (VertexId c : children_[i]) {
      const auto j = index_of(c);
      if (--indegree[j] == 0) ready.push(j);
    }
  }
  return order;
}

// ---------------------------------------------------------------------------
// UGraph

UGraph::UGraph(VertexSet vertices, std::vector<Edge> edges) : vertices_(vset::make(std::move(vertices))) {
  adjacency_.resize(vertices_.size());
  for (const auto& [u, v] : edges) {
    if (u == v) throw ContractViolation("self-loop on vertex " + std::to_string(u));
    adjacency_[index_of(u)].push_back(v);
    adjacency_[index_of(v)].push_back(u);
  }
  for (auto& adj : adjacency_) adj = vset::make(std::move(adj));
}

std::size_t UGraph::index_of(VertexId v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || *it != v)
    throw ContractViolation("vertex " + std::to_string(v) + " not in graph");
  return static_cast<std::size_t>(it - vertices_.begin());
}

std::size_t UGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& adj : adjacency_) twice += adj.size();
  return twice / 2;
}

std::vector<Edge> UGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (VertexId w : adjacency_[i])
      if (vertices_[i] < w) out.emplace_back(vertices_[i], w);
  return out;
}

bool UGraph::has_edge(VertexId u, VertexId v) const { return vset::contains(neighbors(u), v); }

const VertexSet& UGraph::neighbors(VertexId v) const { return adjacency_[index_of(v)]; }

UGraph UGraph::induced(const VertexSet& keep) const {
  const auto kept = vset::intersect(vertices_, keep);
  std::vector<Edge> es;
  for (VertexId v : kept)
    for (VertexId w : neighbors(v))
      if (v < w && vset::contains(kept, w)) es.emplace_back(v, w);
  return UGraph(kept, std::move(es));
}

UGraph UGraph::without(const VertexSet& drop) const { return induced(vset::minus(vertices_, drop)); }

// ---------------------------------------------------------------------------

UGraph moralize(const DiGraph& g) {
  std::vector<Edge> es;
  for (const auto& [from, to] : g.arcs()) es.emplace_back(from, to);
  for (VertexId v : g.vertices()) {
    const auto& ps = g.parents(v);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) es.emplace_back(ps[i], ps[j]);
  }
  return UGraph(g.vertices(), std::move(es));
}

std::vector<VertexSet> connected_components(const UGraph& g) {
  std::vector<VertexSet> out;
  std::set<VertexId> seen;
  for (VertexId start : g.vertices()) {
    if (seen.count(start)) continue;
    VertexSet comp;
    std::vector<VertexId> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (VertexId w : g.neighbors(v))
        if (seen.insert(w).second) stack.push_back(w);
    }
    out.push_back(vset::make(std::move(comp)));
  }
  return out;
}

bool is_complete(const UGraph& g, const VertexSet& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (!g.has_edge(s[i], s[j])) return false;
  return true;
}

bool is_separator(const UGraph& g, const VertexSet& s) {
  return connected_components(g.without(s)).size() >= 2;
}

namespace {

bool is_full_component(const UGraph& g, const VertexSet& comp, const VertexSet& s) {
  for (VertexId x : s) {
    const auto& adj = g.neighbors(x);
    const bool touches = std::any_of(adj.begin(), adj.end(),
                                     [&](VertexId w) { return vset::contains(comp, w); });
    if (!touches) return false;
  }
  return true;
}

}  // namespace

bool is_minimal_separator(const UGraph& g, const VertexSet& s) {
  if (!vset::is_subset(s, g.vertices())) return false;
  std::size_t full = 0;
  for (const auto& comp : connected_components(g.without(s)))
    if (is_full_component(g, comp, s)) ++full;
  return full >= 2;
}

Decomposition decompose_at(const UGraph& g, const VertexSet& s, std::optional<VertexId> anchor) {
  if (!vset::is_subset(s, g.vertices()))
    throw ContractViolation("invalid separator: not a subset of the vertex set");
  if (!is_complete(g, s)) throw ContractViolation("invalid separator: not complete");
  const auto comps = connected_components(g.without(s));
  if (comps.size() < 2) throw ContractViolation("invalid separator: graph stays connected");
  const VertexId a = anchor ? *anchor : comps.front().front();
  if (vset::contains(s, a) || !g.has_vertex(a))
    throw ContractViolation("decomposition anchor must lie outside the separator");
  const auto it = std::find_if(comps.begin(), comps.end(),
                               [&](const VertexSet& c) { return vset::contains(c, a); });
  return Decomposition{s, vset::unite(s, *it), vset::minus(g.vertices(), *it)};
}

// ---------------------------------------------------------------------------
// LEX M

std::vector<VertexId> minimal_elimination_ordering(const UGraph& g, std::vector<Edge>* fill) {
  const auto& verts = g.vertices();
  const std::size_t n = verts.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (VertexId w : g.neighbors(verts[i]))
      adj[i].push_back(static_cast<std::size_t>(std::lower_bound(verts.begin(), verts.end(), w) - verts.begin()));

  std::vector<std::size_t> label(n, 0);
  std::vector<bool> numbered(n, false);
  std::vector<VertexId> elimination(n);

  for (std::size_t step = n; step-- > 0;) {
    std::size_t v = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!numbered[i] && (v == n || label[i] > label[v])) v = i;
    numbered[v] = true;
    elimination[step] = verts[v];

    // Every unnumbered z reachable from v through unnumbered vertices whose
    // labels are all smaller than label[z] gets its label raised.
    const std::size_t levels = 1 + *std::max_element(label.begin(), label.end());
    std::vector<std::vector<std::size_t>> reach(levels);
    std::vector<bool> reached(numbered);
    std::vector<std::size_t> raised;
    for (std::size_t w : adj[v]) {
      if (reached[w]) continue;
      reached[w] = true;
      reach[label[w]].push_back(w);
      raised.push_back(w);
    }
    for (std::size_t j = 0; j < levels; ++j) {
      while (!reach[j].empty()) {
        const std::size_t w = reach[j].back();
        reach[j].pop_back();
        for (std::size_t z : adj[w]) {
          if (reached[z]) continue;
          reached[z] = true;
          if (label[z] > j) {
            reach[label[z]].push_back(z);
            raised.push_back(z);
          } else {
            reach[j].push_back(z);
          }
        }
      }
    }

    for (std::size_t i = 0; i < n; ++i)
      if (!numbered[i]) label[i] *= 2;
    for (std::size_t z : raised) {
      label[z] += 1;
      if (fill && !g.has_edge(verts[v], verts[z])) fill->emplace_back(std::min(verts[v], verts[z]), std::max(verts[v], verts[z]));
    }
    std::vector<std::size_t> distinct;
    for (std::size_t i = 0; i < n; ++i)
      if (!numbered[i]) distinct.push_back(label[i]);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < n; ++i) {
      label[i] = numbered[i] ? 0
                             : static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), label[i]) -
                                                        distinct.begin());
    }
  }
  return elimination;
}

// ---------------------------------------------------------------------------
// Clique separator decomposition

std::vector<VertexSet> CliqueSeparatorDecomposition::separators() const {
  std::vector<VertexSet> out;
  for (const auto& s : splits) out.push_back(s.separator);
  return out;
}

std::vector<VertexSet> CliqueSeparatorDecomposition::atoms() const {
  std::vector<VertexSet> out;
  for (const auto& s : splits) out.push_back(s.atom);
  out.push_back(residual);
  return out;
}

CliqueSeparatorDecomposition clique_separator_decomposition(const UGraph& g) {
  CliqueSeparatorDecomposition out;
  if (g.vertex_count() == 0) return out;
  if (connected_components(g).size() != 1)
    throw ContractViolation("clique_separator_decomposition needs a connected graph");

  std::vector<Edge> fill;
  const auto order = minimal_elimination_ordering(g, &fill);
  auto all_edges = g.edges();
  all_edges.insert(all_edges.end(), fill.begin(), fill.end());
  const UGraph filled(g.vertices(), std::move(all_edges));
  std::map<VertexId, std::size_t> position;
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  VertexSet remaining = g.vertices();
  for (VertexId x : order) {
    if (!vset::contains(remaining, x)) continue;
    VertexSet later;
    for (VertexId y : filled.neighbors(x))
      if (position[y] > position[x]) later.push_back(y);
    if (later.empty() || !vset::is_subset(later, remaining) || !is_complete(g, later)) continue;

    const UGraph current = g.induced(remaining);
    const auto comps = connected_components(current.without(later));
    if (comps.size() < 2) continue;
    const auto own = std::find_if(comps.begin(), comps.end(),
                                  [&](const VertexSet& c) { return vset::contains(c, x); });
    if (!is_full_component(current, *own, later)) continue;
    const auto full = std::count_if(comps.begin(), comps.end(), [&](const VertexSet& c) {
      return is_full_component(current, c, later);
    });
    if (full < 2) continue;

    out.splits.push_back({later, vset::unite(*own, later)});
    remaining = vset::minus(remaining, *own);
  }
  out.residual = std::move(remaining);
  return out;
}

std::vector<VertexSet> nmc_separators(const UGraph& g, const VertexSet& laden,
                                      const std::map<VertexId, VertexSet>& parents) {
  std::vector<VertexSet> found;
  for (const auto& comp : connected_components(g)) {
    for (auto& s : clique_separator_decomposition(g.induced(comp)).separators())
      if (std::find(found.begin(), found.end(), s) == found.end()) found.push_back(std::move(s));
  }
  std::vector<VertexSet> out;
  for (auto& s : found) {
    const bool under_laden = std::any_of(laden.begin(), laden.end(), [&](VertexId l) {
      auto it = parents.find(l);
      return it != parents.end() && vset::is_subset(s, it->second);
    });
    const bool trivial = under_laden && connected_components(g.without(s)).size() <= 2;
    if (!trivial) out.push_back(std::move(s));
  }
  return out;
}

std::string to_dot(const UGraph& g, const std::function<std::string(VertexId)>& label,
                   const VertexSet& highlight) {
  std::ostringstream os;
  os << "graph moral {\n";
  for (VertexId v : g.vertices()) {
    os << "  n" << v << " [label=\"" << label(v) << "\"";
    if (vset::contains(highlight, v)) os << ", shape=box";
    os << "];\n";
  }
  for (const auto& [u, v] : g.edges()) os << "  n" << u << " -- n" << v << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace ctp
