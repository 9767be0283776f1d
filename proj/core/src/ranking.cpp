#include "poth/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poth/error.hpp"
#include "poth/normal.hpp"

namespace poth {

namespace {

// Row tolerance admits row sums slightly above one, so scores can drift past
// the unit interval by rounding; pull them back.
double clamp_unit(double s) { return std::clamp(s, 0.0, 1.0); }

}  // namespace

ScoreVector sucra_from_rank_probs(const RankProbabilityMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  const auto& p = m.probs();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double cumulative = 0.0;
    double area = 0.0;
    for (Eigen::Index r = 0; r < n - 1; ++r) {
      cumulative += p(i, r);
      area += cumulative;
    }
    out[static_cast<std::size_t>(i)] = clamp_unit(area / static_cast<double>(n - 1));
  }
  return ScoreVector(std::move(out), ScoreKind::sucra, m.treatments());
}

std::vector<double> expected_rank(const RankProbabilityMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double e = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) e += static_cast<double>(k + 1) * m.probs()(i, k);
    out[static_cast<std::size_t>(i)] = e;
  }
  return out;
}

ScoreVector sucra_from_expected_rank(std::span<const double> expected_ranks,
                                     const TreatmentSet& treatments) {
  const std::size_t n = treatments.size();
  if (expected_ranks.size() != n) {
    throw ValidationError("got " + std::to_string(expected_ranks.size()) +
                          " expected ranks for " + std::to_string(n) + " treatments");
  }
  constexpr double slack = 1e-9;
  const double nd = static_cast<double>(n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = expected_ranks[i];
    if (!std::isfinite(e) || e < 1.0 - slack || e > nd + slack) {
      throw ValidationError("expected rank of '" + treatments.label(i) + "' is outside [1, " +
                            std::to_string(n) + "]");
    }
    out[i] = clamp_unit((nd - e) / (nd - 1.0));
  }
  return ScoreVector(std::move(out), ScoreKind::sucra, treatments);
}

PairwiseEffects pairwise_from_reference(const ReferenceEffects& r) {
  const auto& set = r.treatments();
  const auto n = static_cast<Eigen::Index>(set.size());
  const auto& d = r.effects();
  const auto& v = r.covariance();

  auto effect = [&](std::size_t t) {
    auto row = r.effect_row(t);
    return row ? d(static_cast<Eigen::Index>(*row)) : 0.0;
  };
  auto cov = [&](std::size_t a, std::size_t b) {
    auto ra = r.effect_row(a);
    auto rb = r.effect_row(b);
    if (!ra || !rb) return 0.0;
    return v(static_cast<Eigen::Index>(*ra), static_cast<Eigen::Index>(*rb));
  };

  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd se = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      const double var = cov(i, i) + cov(j, j) - 2.0 * cov(i, j);
      const double scale = cov(i, i) + cov(j, j);
      // Relative floor: perfectly correlated contrasts cancel to rounding noise.
      if (!(var > 1e-12 * scale) || !(var > 0.0)) {
        throw NumericalError("degenerate covariance: contrast '" + set.label(i) + "' vs '" +
                             set.label(j) + "' has non-positive variance");
      }
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      theta(a, b) = effect(i) - effect(j);
      theta(b, a) = -theta(a, b);
      se(a, b) = se(b, a) = std::sqrt(var);
    }
  }
  return PairwiseEffects(std::move(theta), std::move(se), set);
}

ScoreVector subset_pscore(const PairwiseEffects& p, std::span<const std::size_t> indices) {
  const std::size_t m = indices.size();
  if (m < 2) throw ValidationError("a subset needs at least 2 treatments");
  const double sign = orientation(p.treatments().direction());
  std::vector<double> out(m);
  for (std::size_t a = 0; a < m; ++a) {
    const auto i = static_cast<Eigen::Index>(indices[a]);
    double sum = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const auto j = static_cast<Eigen::Index>(indices[b]);
      sum += normal_cdf(sign * p.theta()(i, j) / p.se()(i, j));
    }
    out[a] = sum / static_cast<double>(m - 1);
  }
  return ScoreVector(std::move(out), ScoreKind::pscore, p.treatments().subset(indices));
}

ScoreVector subset_pscore(const PairwiseEffects& p, std::span<const std::string> subset) {
  const auto idx = p.treatments().resolve_subset(subset);
  return subset_pscore(p, std::span<const std::size_t>(idx));
}

ScoreVector pscore_from_pairwise(const PairwiseEffects& p) {
  std::vector<std::size_t> all(p.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return subset_pscore(p, std::span<const std::size_t>(all));
}

}  // namespace poth
