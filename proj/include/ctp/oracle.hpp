#pragma once

#include <vector>

#include "ctp/semibn.hpp"

namespace ctp {

/// Default cap on the joint table materialized by brute_force_marginal.
inline constexpr double kBruteForceCap = 16777216.0;  // 2^24 cells

/// Materializes the product of every item over all variables and
/// parameters, restricts it by the evidence and sums down to X ∪ W.
/// Throws StateSpaceTooLarge when the joint would exceed `cap` cells.
Potential brute_force_marginal(const SemiBayesNet& n, const Query& q, double cap = kBruteForceCap);

/// Sum-product variable elimination. `order` must be a permutation of the
/// net variables outside X ∪ Y.
Potential variable_elimination_marginal(const SemiBayesNet& n, const Query& q,
                                        const std::vector<Variable>& order);

/// Greedy minimum-degree order over the variables to eliminate.
std::vector<Variable> min_degree_order(const SemiBayesNet& n, const Query& q);

}  // namespace ctp
