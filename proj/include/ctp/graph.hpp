#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ctp {

using VertexId = int;
/// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<VertexId>;
using Arc = std::pair<VertexId, VertexId>;
using Edge = std::pair<VertexId, VertexId>;

namespace vset {
VertexSet make(std::vector<VertexId> ids);
bool contains(const VertexSet& s, VertexId v);
bool is_subset(const VertexSet& inner, const VertexSet& outer);
VertexSet unite(const VertexSet& a, const VertexSet& b);
VertexSet minus(const VertexSet& a, const VertexSet& b);
VertexSet intersect(const VertexSet& a, const VertexSet& b);
}  // namespace vset

/// Directed acyclic graph. Construction rejects cycles and dangling arcs.
class DiGraph {
 public:
  DiGraph() = default;
  DiGraph(VertexSet vertices, std::vector<Arc> arcs);

  const VertexSet& vertices() const { return vertices_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  bool has_vertex(VertexId v) const { return vset::contains(vertices_, v); }
  const VertexSet& parents(VertexId v) const;
  const VertexSet& children(VertexId v) const;
  VertexSet roots() const;
  VertexSet leaves() const;
  /// Vertices in an order where every parent precedes its children.
  std::vector<VertexId> topological_order() const;

 private:
  std::size_t index_of(VertexId v) const;

  VertexSet vertices_;
  std::vector<Arc> arcs_;
  std::vector<VertexSet> parents_;
  std::vector<VertexSet> children_;
};

/// Simple undirected graph.
class UGraph {
 public:
  UGraph() = default;
  UGraph(VertexSet vertices, std::vector<Edge> edges);

  const VertexSet& vertices() const { return vertices_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const;
  std::vector<Edge> edges() const;
  bool has_vertex(VertexId v) const { return vset::contains(vertices_, v); }
  bool has_edge(VertexId u, VertexId v) const;
  const VertexSet& neighbors(VertexId v) const;

  UGraph induced(const VertexSet& keep) const;
  UGraph without(const VertexSet& drop) const;

 private:
  std::size_t index_of(VertexId v) const;

  VertexSet vertices_;
  std::vector<VertexSet> adjacency_;
};

UGraph moralize(const DiGraph& g);

/// Maximal connected vertex sets, ordered by smallest member.
std::vector<VertexSet> connected_components(const UGraph& g);

bool is_complete(const UGraph& g, const VertexSet& s);

/// True when deleting `s` leaves at least two connected components.
bool is_separator(const UGraph& g, const VertexSet& s);

/// True when `s` is an inclusion-minimal separator: g - s has at least two
/// components whose neighbourhood is all of `s`.
bool is_minimal_separator(const UGraph& g, const VertexSet& s);

/// A split of a graph at a complete separator: parts share exactly the
/// separator and no edge joins part1 - separator to part2 - separator.
struct Decomposition {
  VertexSet separator;
  VertexSet part1;
  VertexSet part2;
};

/// Splits `g` at the complete separator `s`. part1 is `s` plus the component
/// of g - s that holds `anchor` (by default the smallest vertex outside s);
/// part2 is everything else. Throws ContractViolation when `s` is not a
/// complete separator.
Decomposition decompose_at(const UGraph& g, const VertexSet& s,
                           std::optional<VertexId> anchor = std::nullopt);

/// Elimination ordering produced by LEX M (Rose, Tarjan and Lueker), which is
/// inclusion-minimal: no proper subset of its fill edges yields a chordal
/// graph. Ties are broken by smallest vertex id. The first vertex returned is
/// eliminated first. When `fill` is given it receives the added edges.
std::vector<VertexId> minimal_elimination_ordering(const UGraph& g,
                                                   std::vector<Edge>* fill = nullptr);

/// One step of the clique separator decomposition: `atom` (which contains
/// `separator`) is split off the remaining graph.
struct CliqueSplit {
  VertexSet separator;
  VertexSet atom;
};

struct CliqueSeparatorDecomposition {
  std::vector<CliqueSplit> splits;
  VertexSet residual;

  std::vector<VertexSet> separators() const;
  std::vector<VertexSet> atoms() const;
};

/// Decomposes a connected graph at its clique minimal separators.
///
/// Vertices are scanned in LEX M elimination order; a vertex whose later
/// neighbours in the filled graph form a clique of the original graph, and
/// separate the remaining graph minimally, splits off the component that
/// holds it. The resulting atoms contain no clique separator, and every
/// reported separator is a complete minimal separator of `g`. No edge is
/// ever added to `g`; the fill edges only guide the scan.
CliqueSeparatorDecomposition clique_separator_decomposition(const UGraph& g);

/// Distinct separators from the clique separator decomposition (of each
/// connected component of `g`) minus the trivial ones. A separator is
/// trivial when it lies inside the parent set of some laden vertex and its
/// deletion leaves at most two connected components.
std::vector<VertexSet> nmc_separators(const UGraph& g, const VertexSet& laden,
                                      const std::map<VertexId, VertexSet>& parents);

/// Graphviz rendering; separator vertices, if given, are drawn boxed.
std::string to_dot(const UGraph& g, const std::function<std::string(VertexId)>& label,
                   const VertexSet& highlight = {});

}  // namespace ctp
