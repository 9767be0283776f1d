#include "poth/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "poth/error.hpp"
#include "poth/ranking.hpp"

namespace poth {

const char* to_string(DrawsSource s) noexcept {
  return s == DrawsSource::sampled ? "sampled" : "supplied";
}

DrawsMatrix::DrawsMatrix(DrawsData draws, TreatmentSet treatments, DrawsSource source,
                         std::optional<std::uint64_t> seed)
    : draws_(std::move(draws)),
      treatments_(std::move(treatments)),
      source_(source),
      seed_(seed) {
  if (draws_.rows() < 1) throw ValidationError("draws matrix has no draws");
  if (static_cast<std::size_t>(draws_.cols()) != treatments_.size()) {
    throw ValidationError("draws have " + std::to_string(draws_.cols()) + " columns but there are " +
                          std::to_string(treatments_.size()) + " treatments");
  }
  for (Eigen::Index r = 0; r < draws_.rows(); ++r) {
    for (Eigen::Index c = 0; c < draws_.cols(); ++c) {
      if (!std::isfinite(draws_(r, c))) {
        throw ValidationError("draw " + std::to_string(r + 1) + ", treatment '" +
                              treatments_.label(static_cast<std::size_t>(c)) +
                              "' is not finite");
      }
    }
  }
  if (source_ == DrawsSource::sampled && !seed_) {
    throw ValidationError("sampled draws must record their seed");
  }
}

DrawsMatrix DrawsMatrix::with_direction(Direction d) const {
  DrawsMatrix copy = *this;
  copy.treatments_ = treatments_.with_direction(d);
  return copy;
}

bool operator==(const DrawsMatrix& a, const DrawsMatrix& b) {
  return a.treatments_ == b.treatments_ && a.source_ == b.source_ && a.seed_ == b.seed_ &&
         same_matrix(a.draws_, b.draws_);
}

// --- sampling -------------------------------------------------------------

Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& covariance) {
  const auto m = covariance.rows();
  if (m == 0) return Eigen::MatrixXd(0, 0);
  const double mean_diag = covariance.diagonal().mean();
  if (mean_diag == 0.0) {
    if (covariance.isZero(0.0)) return Eigen::MatrixXd::Zero(m, m);
    throw NumericalError("covariance is not positive semi-definite");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
    return llt.matrixL();
  }
  for (double factor = 1e-10; factor <= 1e-6 * 1.0000001; factor *= 10.0) {
    Eigen::MatrixXd jittered = covariance;
    jittered.diagonal().array() += factor * mean_diag;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
      return llt.matrixL();
    }
  }
  throw NumericalError(
      "covariance is not positive semi-definite (Cholesky failed after jitter up to 1e-6 x "
      "mean variance)");
}

DrawsMatrix sample_mvn(const ReferenceEffects& r, std::size_t n_draws, std::uint64_t seed,
                       ExecutionPolicy policy) {
  if (n_draws < 1) throw ValidationError("n_draws must be at least 1");
  const Eigen::MatrixXd chol = jittered_cholesky(r.covariance());
  const auto& mean = r.effects();
  const auto m = mean.size();
  const std::size_t n = r.treatments().size();

  // Column of each effect row in the full treatment layout.
  std::vector<Eigen::Index> column(static_cast<std::size_t>(m));
  for (std::size_t t = 0; t < n; ++t) {
    if (auto row = r.effect_row(t)) column[*row] = static_cast<Eigen::Index>(t);
  }

  DrawsData out = DrawsData::Zero(static_cast<Eigen::Index>(n_draws), static_cast<Eigen::Index>(n));
  const std::size_t blocks = (n_draws + kSampleBlock - 1) / kSampleBlock;
  parallel_for(blocks, policy, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(m);
    Eigen::VectorXd x(m);
    const std::size_t end = std::min(n_draws, (b + 1) * kSampleBlock);
    for (std::size_t row = b * kSampleBlock; row < end; ++row) {
      for (Eigen::Index k = 0; k < m; ++k) z(k) = normal(engine);
      x.noalias() = mean + chol * z;
      for (Eigen::Index k = 0; k < m; ++k) {
        out(static_cast<Eigen::Index>(row), column[static_cast<std::size_t>(k)]) = x(k);
      }
    }
  });
  return DrawsMatrix(std::move(out), r.treatments(), DrawsSource::sampled, seed);
}

// --- rank counting --------------------------------------------------------

namespace {

constexpr std::size_t kCountBlock = 8192;

using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Order of `indices` from best to worst in one draw; ties keep index order.
void order_draw(const DrawsData& draws, Eigen::Index row, std::span<const std::size_t> indices,
                double sign, std::vector<std::size_t>& order) {
  order.resize(indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = sign * draws(row, static_cast<Eigen::Index>(indices[a]));
    const double vb = sign * draws(row, static_cast<Eigen::Index>(indices[b]));
    if (va != vb) return va > vb;
    return a < b;
  });
}

}  // namespace

RankProbabilityMatrix subset_rank_probs_from_draws(const DrawsMatrix& d,
                                                   std::span<const std::size_t> indices,
                                                   ExecutionPolicy policy) {
  const std::size_t m = indices.size();
  if (m < 2) throw ValidationError("a subset needs at least 2 treatments");
  const std::size_t n_draws = d.n_draws();
  const double sign = orientation(d.treatments().direction());
  const auto mi = static_cast<Eigen::Index>(m);

  const std::size_t blocks = (n_draws + kCountBlock - 1) / kCountBlock;
  std::vector<Counts> partial(blocks, Counts::Zero(mi, mi));
  parallel_for(blocks, policy, [&](std::size_t b) {
    std::vector<std::size_t> order;
    Counts& counts = partial[b];
    const std::size_t end = std::min(n_draws, (b + 1) * kCountBlock);
    for (std::size_t row = b * kCountBlock; row < end; ++row) {
      order_draw(d.draws(), static_cast<Eigen::Index>(row), indices, sign, order);
      for (std::size_t k = 0; k < m; ++k) {
        ++counts(static_cast<Eigen::Index>(order[k]), static_cast<Eigen::Index>(k));
      }
    }
  });

  Counts total = Counts::Zero(mi, mi);
  for (const auto& c : partial) total += c;
  Eigen::MatrixXd probs = total.cast<double>() / static_cast<double>(n_draws);
  return RankProbabilityMatrix(std::move(probs), d.treatments().subset(indices));
}

RankProbabilityMatrix subset_rank_probs_from_draws(const DrawsMatrix& d,
                                                   std::span<const std::string> subset,
                                                   ExecutionPolicy policy) {
  const auto idx = d.treatments().resolve_subset(subset);
  return subset_rank_probs_from_draws(d, std::span<const std::size_t>(idx), policy);
}

RankProbabilityMatrix rank_probs_from_draws(const DrawsMatrix& d, ExecutionPolicy policy) {
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return subset_rank_probs_from_draws(d, std::span<const std::size_t>(all), policy);
}

std::size_t tied_draw_count(const DrawsMatrix& d, std::span<const std::size_t> indices) {
  std::size_t tied = 0;
  std::vector<double> row(indices.size());
  for (Eigen::Index r = 0; r < d.draws().rows(); ++r) {
    for (std::size_t k = 0; k < indices.size(); ++k) {
      row[k] = d.draws()(r, static_cast<Eigen::Index>(indices[k]));
    }
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) ++tied;
  }
  return tied;
}

std::size_t tied_draw_count(const DrawsMatrix& d) {
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return tied_draw_count(d, all);
}

ScoreVector sucra_from_draws(const DrawsMatrix& d, ExecutionPolicy policy) {
  return sucra_from_rank_probs(rank_probs_from_draws(d, policy));
}

}  // namespace poth
