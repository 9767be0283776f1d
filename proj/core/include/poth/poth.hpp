#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poth/parallel.hpp"
#include "poth/resampling.hpp"
#include "poth/types.hpp"

namespace poth {

/// Values within this distance outside [0, 1] are clamped; anything further
/// is reported as an error.
inline constexpr double kClampTolerance = 1e-12;

/// S^2(n) = (1/n) sum (s_i - 0.5)^2.
double score_variance(const ScoreVector& s);

/// S^2(n) via expected ranks: sum (E_i - (n+1)/2)^2 / (n (n-1)^2).
double variance_from_expected_ranks(std::span<const double> expected_ranks, std::size_t n);

/// S^2_max(n) = (n+1) / (12 (n-1)), the score variance of a fully certain
/// hierarchy.
double max_variance(std::size_t n);

/// POTH = S^2(n) / S^2_max(n) = 12 (n-1) / (n+1) * S^2(n).
///
/// Throws NumericalError when the scores imply a variance above the maximum,
/// which means they were not a valid SUCRA or P-score vector.
double poth_from_scores(const ScoreVector& s);

/// V(n): mean over treatments of the variance of each rank distribution.
double avg_rank_variance(const RankProbabilityMatrix& m);

/// POTH = 1 - 12 V(n) / ((n+1)(n-1)). Valid only for doubly stochastic input;
/// anything else throws ValidationError.
double poth_from_rank_probs(const RankProbabilityMatrix& m);

enum class SubsetKind { explicit_ids, leave_one_out, best_k };

const char* to_string(SubsetKind k) noexcept;

/// A named subset of treatments and how it was chosen.
struct SubsetSpec {
  std::vector<std::string> ids;
  SubsetKind kind = SubsetKind::explicit_ids;
  std::optional<std::string> left_out;  // leave_one_out only
  std::optional<std::size_t> k;         // best_k only

  static SubsetSpec of(std::vector<std::string> ids);
  static SubsetSpec without(const TreatmentSet& set, std::size_t left_out);
  static SubsetSpec best(std::vector<std::string> ids);

  friend bool operator==(const SubsetSpec&, const SubsetSpec&) = default;
};

// Subset scoring needs joint information: pairwise contrasts or draws.
// Marginal rank probabilities and bare score vectors cannot be re-ranked
// within a subset, so those overloads throw UnsupportedSourceError.

ScoreVector subset_scores(const PairwiseEffects& p, std::span<const std::size_t> indices,
                          ExecutionPolicy policy = {});
ScoreVector subset_scores(const DrawsMatrix& d, std::span<const std::size_t> indices,
                          ExecutionPolicy policy = {});

/// Global scores of a joint source: P-scores or SUCRAs from draws.
ScoreVector global_scores(const PairwiseEffects& p, ExecutionPolicy policy = {});
ScoreVector global_scores(const DrawsMatrix& d, ExecutionPolicy policy = {});

/// POTH over the whole network. For draws this goes through the rank
/// probability route, so a permutation matrix gives exactly 1.
double global_poth(const PairwiseEffects& p, ExecutionPolicy policy = {});
double global_poth(const DrawsMatrix& d, ExecutionPolicy policy = {});

double subset_poth(const PairwiseEffects& p, const SubsetSpec& subset, ExecutionPolicy policy = {});
double subset_poth(const DrawsMatrix& d, const SubsetSpec& subset, ExecutionPolicy policy = {});
[[noreturn]] double subset_poth(const RankProbabilityMatrix& m, const SubsetSpec& subset);
[[noreturn]] double subset_poth(const ScoreVector& s, const SubsetSpec& subset);

/// r(j) = POTH - POTH without j, in treatment order. Needs n >= 3.
std::vector<double> poth_residuals(const PairwiseEffects& p, ExecutionPolicy policy = {});
std::vector<double> poth_residuals(const DrawsMatrix& d, ExecutionPolicy policy = {});
[[noreturn]] std::vector<double> poth_residuals(const RankProbabilityMatrix& m);
[[noreturn]] std::vector<double> poth_residuals(const ScoreVector& s);

/// Cumulative POTH of the best k treatments, k = 2..n.
struct CumulativePoth {
  /// Treatment indices from best to worst by global score. Equal scores keep
  /// treatment order.
  std::vector<std::size_t> order;
  /// values[k - 2] is cPOTH_k.
  std::vector<double> values;
  /// True when equal scores straddle a best-k boundary, making that set's
  /// membership depend on the tie rule.
  bool boundary_tie = false;

  double at(std::size_t k) const { return values.at(k - 2); }
};

/// Best-k ordering from a score vector, shared by cumulative_poth and plots.
std::vector<std::size_t> best_first_order(const ScoreVector& s);

CumulativePoth cumulative_poth(const PairwiseEffects& p, ExecutionPolicy policy = {});
CumulativePoth cumulative_poth(const DrawsMatrix& d, ExecutionPolicy policy = {});
[[noreturn]] CumulativePoth cumulative_poth(const RankProbabilityMatrix& m);
[[noreturn]] CumulativePoth cumulative_poth(const ScoreVector& s);

}  // namespace poth
