#include "poth/poth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poth/error.hpp"
#include "poth/ranking.hpp"

namespace poth {

namespace {

double clamp_poth(double value) {
  if (value < 0.0) {
    if (value >= -kClampTolerance) return 0.0;
    throw NumericalError("POTH evaluated to " + std::to_string(value) + ", below 0");
  }
  if (value > 1.0) {
    if (value <= 1.0 + kClampTolerance) return 1.0;
    throw NumericalError(
        "inconsistent scores: variance exceeds the maximum for a valid SUCRA/P-score vector "
        "(POTH would be " + std::to_string(value) + ")");
  }
  return value;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

[[noreturn]] void unsupported(const char* what) {
  throw UnsupportedSourceError(
      std::string(what) +
      " needs joint ranking information (pairwise effects or draws); marginal rank "
      "probabilities and bare scores cannot be re-ranked within a subset");
}

// Pairwise and draws sources share the leave-one-out and best-k machinery.
double poth_of(const PairwiseEffects& p, std::span<const std::size_t> idx, ExecutionPolicy) {
  return poth_from_scores(subset_pscore(p, idx));
}

double poth_of(const DrawsMatrix& d, std::span<const std::size_t> idx, ExecutionPolicy policy) {
  return poth_from_rank_probs(subset_rank_probs_from_draws(d, idx, policy));
}

template <typename Source>
std::vector<double> residuals_impl(const Source& src, ExecutionPolicy policy) {
  const std::size_t n = src.treatments().size();
  if (n < 3) {
    throw ValidationError("POTH residuals need at least 3 treatments, got " + std::to_string(n));
  }
  const auto all = all_indices(n);
  const double global = poth_of(src, all, policy);
  std::vector<double> out(n);
  parallel_for(n, policy, [&](std::size_t j) {
    std::vector<std::size_t> rest;
    rest.reserve(n - 1);
    for (auto i : all) {
      if (i != j) rest.push_back(i);
    }
    out[j] = global - poth_of(src, rest, ExecutionPolicy{1});
  });
  return out;
}

template <typename Source>
CumulativePoth cumulative_impl(const Source& src, const ScoreVector& scores,
                               ExecutionPolicy policy) {
  const std::size_t n = scores.size();
  CumulativePoth out;
  out.order = best_first_order(scores);
  for (std::size_t k = 2; k < n; ++k) {
    if (std::abs(scores[out.order[k - 1]] - scores[out.order[k]]) <= kClampTolerance) {
      out.boundary_tie = true;
    }
  }
  out.values.resize(n - 1);
  parallel_for(n - 1, policy, [&](std::size_t slot) {
    const std::size_t k = slot + 2;
    std::vector<std::size_t> best(out.order.begin(), out.order.begin() + static_cast<long>(k));
    std::sort(best.begin(), best.end());
    out.values[slot] = poth_of(src, best, ExecutionPolicy{1});
  });
  return out;
}

}  // namespace

const char* to_string(SubsetKind k) noexcept {
  switch (k) {
    case SubsetKind::explicit_ids: return "explicit";
    case SubsetKind::leave_one_out: return "leave-one-out";
    case SubsetKind::best_k: return "best-k";
  }
  return "explicit";
}

double score_variance(const ScoreVector& s) {
  double sum = 0.0;
  for (double v : s.values()) sum += (v - 0.5) * (v - 0.5);
  return sum / static_cast<double>(s.size());
}

double variance_from_expected_ranks(std::span<const double> expected_ranks, std::size_t n) {
  if (n < 2) throw ValidationError("need at least 2 treatments");
  if (expected_ranks.size() != n) {
    throw ValidationError("got " + std::to_string(expected_ranks.size()) +
                          " expected ranks for n = " + std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  const double centre = (nd + 1.0) / 2.0;
  double sum = 0.0;
  for (double e : expected_ranks) {
    if (!std::isfinite(e) || e < 1.0 - 1e-9 || e > nd + 1e-9) {
      throw ValidationError("expected rank " + std::to_string(e) + " is outside [1, " +
                            std::to_string(n) + "]");
    }
    sum += (e - centre) * (e - centre);
  }
  return sum / (nd * (nd - 1.0) * (nd - 1.0));
}

double max_variance(std::size_t n) {
  if (n < 2) throw ValidationError("need at least 2 treatments");
  const double nd = static_cast<double>(n);
  return (nd + 1.0) / (12.0 * (nd - 1.0));
}

double poth_from_scores(const ScoreVector& s) {
  const double n = static_cast<double>(s.size());
  return clamp_poth(12.0 * (n - 1.0) / (n + 1.0) * score_variance(s));
}

double avg_rank_variance(const RankProbabilityMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  const auto eranks = expected_rank(m);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = eranks[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) {
      const double dev = static_cast<double>(k + 1) - e;
      total += dev * dev * m.probs()(i, k);
    }
  }
  return total / static_cast<double>(n);
}

double poth_from_rank_probs(const RankProbabilityMatrix& m) {
  if (!m.is_doubly_stochastic()) {
    throw ValidationError(
        "POTH from rank probabilities needs a doubly stochastic matrix; column sums deviate "
        "from 1 by " + std::to_string(m.max_column_deviation()));
  }
  const double n = static_cast<double>(m.size());
  return clamp_poth(1.0 - 12.0 * avg_rank_variance(m) / ((n + 1.0) * (n - 1.0)));
}

// --- subsets ---------------------------------------------------------------

SubsetSpec SubsetSpec::of(std::vector<std::string> ids) {
  return SubsetSpec{std::move(ids), SubsetKind::explicit_ids, std::nullopt, std::nullopt};
}

SubsetSpec SubsetSpec::without(const TreatmentSet& set, std::size_t left_out) {
  SubsetSpec spec{{}, SubsetKind::leave_one_out, set.label(left_out), std::nullopt};
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i != left_out) spec.ids.push_back(set.label(i));
  }
  return spec;
}

SubsetSpec SubsetSpec::best(std::vector<std::string> ids) {
  const std::size_t k = ids.size();
  return SubsetSpec{std::move(ids), SubsetKind::best_k, std::nullopt, k};
}

ScoreVector subset_scores(const PairwiseEffects& p, std::span<const std::size_t> indices,
                          ExecutionPolicy) {
  return subset_pscore(p, indices);
}

ScoreVector subset_scores(const DrawsMatrix& d, std::span<const std::size_t> indices,
                          ExecutionPolicy policy) {
  return sucra_from_rank_probs(subset_rank_probs_from_draws(d, indices, policy));
}

ScoreVector global_scores(const PairwiseEffects& p, ExecutionPolicy) {
  return pscore_from_pairwise(p);
}

ScoreVector global_scores(const DrawsMatrix& d, ExecutionPolicy policy) {
  return sucra_from_draws(d, policy);
}

double global_poth(const PairwiseEffects& p, ExecutionPolicy policy) {
  return poth_of(p, all_indices(p.size()), policy);
}

double global_poth(const DrawsMatrix& d, ExecutionPolicy policy) {
  return poth_of(d, all_indices(d.size()), policy);
}

double subset_poth(const PairwiseEffects& p, const SubsetSpec& subset, ExecutionPolicy policy) {
  const auto idx = p.treatments().resolve_subset(subset.ids);
  return poth_of(p, idx, policy);
}

double subset_poth(const DrawsMatrix& d, const SubsetSpec& subset, ExecutionPolicy policy) {
  const auto idx = d.treatments().resolve_subset(subset.ids);
  return poth_of(d, idx, policy);
}

double subset_poth(const RankProbabilityMatrix&, const SubsetSpec&) { unsupported("subset POTH"); }
double subset_poth(const ScoreVector&, const SubsetSpec&) { unsupported("subset POTH"); }

std::vector<double> poth_residuals(const PairwiseEffects& p, ExecutionPolicy policy) {
  return residuals_impl(p, policy);
}

std::vector<double> poth_residuals(const DrawsMatrix& d, ExecutionPolicy policy) {
  return residuals_impl(d, policy);
}

std::vector<double> poth_residuals(const RankProbabilityMatrix&) { unsupported("POTH residuals"); }
std::vector<double> poth_residuals(const ScoreVector&) { unsupported("POTH residuals"); }

std::vector<std::size_t> best_first_order(const ScoreVector& s) {
  auto order = all_indices(s.size());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return order;
}

CumulativePoth cumulative_poth(const PairwiseEffects& p, ExecutionPolicy policy) {
  return cumulative_impl(p, global_scores(p, policy), policy);
}

CumulativePoth cumulative_poth(const DrawsMatrix& d, ExecutionPolicy policy) {
  return cumulative_impl(d, global_scores(d, policy), policy);
}

CumulativePoth cumulative_poth(const RankProbabilityMatrix&) { unsupported("cumulative POTH"); }
CumulativePoth cumulative_poth(const ScoreVector&) { unsupported("cumulative POTH"); }

}  // namespace poth
