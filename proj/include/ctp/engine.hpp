#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ctp/semibn.hpp"

namespace ctp {

/// Two tree nodes sharing the separator they were split at.
struct TreeLink {
  std::size_t a = 0;
  std::size_t b = 0;
  VertexSet separator;
};

/// Components of a net cut at its NMC separators, linked into a tree.
struct ComponentTree {
  std::vector<SemiBayesNet> nodes;
  std::vector<TreeLink> links;

  std::vector<std::size_t> neighbors(std::size_t node) const;
  /// Throws InternalError unless the links form a tree with the running
  /// intersection property and the nodes partition the items of `original`.
  void validate(const SemiBayesNet& original) const;
  /// "NODE C0: vars={...} items=..." and "LINK C0 -- C1: {...}" lines, with
  /// node i labelled node_label(first_label + i).
  std::vector<std::string> describe(std::size_t first_label = 0) const;
};

/// Splits a connected `n` at every NMC separator (relative to the laden
/// nodes of `q`).
/// Components are numbered in split order: the part holding the smallest
/// vertex keeps its index and the other part is inserted right after it.
ComponentTree build_component_tree(const SemiBayesNet& n, const Query& q);

std::string node_label(std::size_t index);

struct LeafCandidate {
  std::size_t node = 0;  // index into the component tree
  std::string label;
  std::vector<Variable> answer_scope;
  double state_space = 0.0;
  int depth = 0;  // recursion depth of the reduction asking for the pick
};

struct LadenCandidate {
  Variable node;
  std::vector<Variable> parents;
  double state_space = 0.0;
};

/// Chooses the leaf to reduce next and the laden node to split at. Both
/// return a position in the candidate list, which is never empty.
class PickStrategy {
 public:
  virtual ~PickStrategy() = default;
  virtual std::string name() const = 0;
  virtual std::size_t pick_leaf(std::span<const LeafCandidate> leaves) = 0;
  virtual std::size_t pick_laden_node(std::span<const LadenCandidate> laden) = 0;
};

/// Smallest answer (or parent set) state space; ties go to the first candidate.
std::shared_ptr<PickStrategy> make_default_strategy();
/// First candidate in node (or id) order.
std::shared_ptr<PickStrategy> make_first_leaf_strategy();
/// Uniformly random choices from a seeded generator.
std::shared_ptr<PickStrategy> make_random_strategy(std::uint64_t seed);
/// Picks top-level leaves by label in the given order while the labels
/// last; nested reductions and later picks use the default strategy.
std::shared_ptr<PickStrategy> make_scripted_strategy(std::vector<std::string> labels);

struct TraceStep {
  std::size_t index = 0;
  std::string pick;
  std::string query;
  std::string append_to;  // "-" for the final node
};

struct Trace {
  std::vector<std::string> tree;
  std::vector<TraceStep> steps;
};

std::string format_trace(const Trace& trace);

struct EngineStats {
  std::size_t main_calls = 0;
  std::size_t serial_steps = 0;
  std::size_t laden_splits = 0;
  std::size_t direct_marginals = 0;
  std::size_t separator_checks = 0;  // no-fill assertions that passed
  std::size_t fallback_count = 0;
  std::size_t recursion_checks = 0;
};

using StepObserver = std::function<void(const SemiBayesNet& current, const Query& current_query)>;

struct EngineConfig {
  std::shared_ptr<PickStrategy> strategy;  // default strategy when null
  StepObserver observer;                   // after each top-level serial step
  std::function<void(const std::string&)> warn;
  bool record_trace = false;
};

/// Answers P_N(X, Y = Y0 : W) by component tree propagation.
///
/// Not thread-safe: an Engine carries statistics and a trace; use one per
/// thread.
class Engine {
 public:
  explicit Engine(EngineConfig config = {});

  /// Answer over X ∪ W. Zero-probability evidence yields a zero table.
  Potential answer(const SemiBayesNet& n, const Query& q);
  /// Normalized P(X | evidence) on a Bayesian net.
  Potential posterior(const SemiBayesNet& n, std::vector<Variable> targets,
                      const Evidence& evidence);

  /// The two reduction procedures, exposed for testing. Each expects the
  /// precondition its name implies (NMC separators present or absent).
  Potential serial_reduction(const SemiBayesNet& n, const Query& q);
  Potential parallel_reduction1(const SemiBayesNet& n, const Query& q);

  const EngineStats& stats() const { return stats_; }
  const Trace& trace() const { return trace_; }
  void reset();

 private:
  Potential main(const SemiBayesNet& n, const Query& q);
  Potential recurse(const SemiBayesNet& parent, const SemiBayesNet& child, const Query& q);
  Potential serial(const SemiBayesNet& n, const Query& q);
  Potential parallel(const SemiBayesNet& n, const Query& q);
  Potential split_components(const SemiBayesNet& n, const Query& q,
                             const std::vector<VertexSet>& components);
  void begin(const SemiBayesNet& n, const Query& q);
  void warn(const std::string& message);

  EngineConfig config_;
  EngineStats stats_;
  Trace trace_;
  int depth_ = 0;
  VarId next_aux_id_ = 0;
  std::size_t traced_nodes_ = 0;
};

/// Convenience wrapper around a fresh Engine.
Potential main_query(const SemiBayesNet& n, const Query& q,
                     std::shared_ptr<PickStrategy> strategy = nullptr);

/// Multiplies two induced-subquery answers and sums out the unobserved
/// separator variables that are not targets.
Potential combine(const Potential& a1, const Potential& a2, const SubquerySplit& split);

/// Product of the evidence-restricted items summed down to X ∪ W.
Potential direct_marginal(const SemiBayesNet& n, const Query& q);

}  // namespace ctp
