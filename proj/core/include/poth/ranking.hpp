#pragma once

#include <span>
#include <string>
#include <vector>

#include "poth/types.hpp"

namespace poth {

/// SUCRA(i) = sum_{r=1}^{n-1} sum_{k<=r} p_ik / (n - 1), accumulated as
/// cumulative ranking curves.
ScoreVector sucra_from_rank_probs(const RankProbabilityMatrix& m);

/// E(rank(i)) = sum_k k p_ik.
std::vector<double> expected_rank(const RankProbabilityMatrix& m);

/// SUCRA(i) = (n - E(rank(i))) / (n - 1). Each expected rank must lie in [1, n].
ScoreVector sucra_from_expected_rank(std::span<const double> expected_ranks,
                                     const TreatmentSet& treatments);

/// Builds the full contrast table from reference contrasts:
/// theta_ij = d_i - d_j and Var = V_ii + V_jj - 2 V_ij, with the reference
/// held at exactly 0 with zero variance. Throws NumericalError when a derived
/// variance is not positive.
PairwiseEffects pairwise_from_reference(const ReferenceEffects& r);

/// P(i) = mean over j != i of Phi(theta_ij / SE_ij), with theta oriented by
/// the treatment set's direction.
ScoreVector pscore_from_pairwise(const PairwiseEffects& p);

/// P-scores restricted to a subset of treatments. The result lists the subset
/// in treatment order, whatever order `subset` uses.
ScoreVector subset_pscore(const PairwiseEffects& p, std::span<const std::string> subset);

/// Index form of subset_pscore; `indices` must be sorted and unique.
ScoreVector subset_pscore(const PairwiseEffects& p, std::span<const std::size_t> indices);

}  // namespace poth
