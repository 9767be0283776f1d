#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "poth/parallel.hpp"
#include "poth/types.hpp"

namespace poth {

using DrawsData = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class DrawsSource { sampled, supplied };

const char* to_string(DrawsSource s) noexcept;

/// N x n relative effects against a common anchor, one row per draw.
class DrawsMatrix {
 public:
  DrawsMatrix(DrawsData draws, TreatmentSet treatments, DrawsSource source,
              std::optional<std::uint64_t> seed = std::nullopt);

  std::size_t n_draws() const noexcept { return static_cast<std::size_t>(draws_.rows()); }
  std::size_t size() const noexcept { return treatments_.size(); }
  const DrawsData& draws() const noexcept { return draws_; }
  const TreatmentSet& treatments() const noexcept { return treatments_; }
  DrawsSource source() const noexcept { return source_; }
  const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }

  /// Same draws with the outcome direction replaced.
  DrawsMatrix with_direction(Direction d) const;

  friend bool operator==(const DrawsMatrix& a, const DrawsMatrix& b);

 private:
  DrawsData draws_;
  TreatmentSet treatments_;
  DrawsSource source_;
  std::optional<std::uint64_t> seed_;
};

inline constexpr std::size_t kDefaultDraws = 10000;

/// Draws per RNG stream. Each block of this many draws gets its own engine
/// seeded from (seed, block index), so output is independent of worker count.
inline constexpr std::size_t kSampleBlock = 4096;

/// Samples N draws from MVN(effects, covariance); the reference column is 0.
///
/// The covariance is factored by Cholesky. If that fails, a jitter of
/// 1e-10 x mean(diag) is added to the diagonal and grown tenfold up to
/// 1e-6 x mean(diag) before giving up with NumericalError.
DrawsMatrix sample_mvn(const ReferenceEffects& r, std::size_t n_draws, std::uint64_t seed,
                       ExecutionPolicy policy = {});

/// Lower Cholesky factor with the jitter escalation used by sample_mvn.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& covariance);

/// p_ik = (# draws where i takes rank k) / N. Rank 1 goes to the best value
/// under the treatment set's direction; exact ties go to the lower index.
RankProbabilityMatrix rank_probs_from_draws(const DrawsMatrix& d, ExecutionPolicy policy = {});

/// Re-ranks every draw over the subset's columns only. The result lists the
/// subset in treatment order.
RankProbabilityMatrix subset_rank_probs_from_draws(const DrawsMatrix& d,
                                                   std::span<const std::string> subset,
                                                   ExecutionPolicy policy = {});

/// Index form; `indices` must be sorted and unique.
RankProbabilityMatrix subset_rank_probs_from_draws(const DrawsMatrix& d,
                                                   std::span<const std::size_t> indices,
                                                   ExecutionPolicy policy = {});

/// Number of draws in which two of the given treatments share a value.
std::size_t tied_draw_count(const DrawsMatrix& d, std::span<const std::size_t> indices);
std::size_t tied_draw_count(const DrawsMatrix& d);

ScoreVector sucra_from_draws(const DrawsMatrix& d, ExecutionPolicy policy = {});

}  // namespace poth
