#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace poth {

/// Exact element-wise equality that is false (rather than asserting) on a
/// shape mismatch.
template <typename A, typename B>
bool same_matrix(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

/// Which end of the outcome scale is preferable.
enum class Direction { larger_is_better, smaller_is_better };

const char* to_string(Direction d) noexcept;
Direction parse_direction(std::string_view s);

/// +1 for larger-is-better, -1 for smaller-is-better. Every metric orients
/// effects through this single factor.
inline double orientation(Direction d) noexcept {
  return d == Direction::larger_is_better ? 1.0 : -1.0;
}

/// Ordered, unique treatment labels plus the outcome direction.
class TreatmentSet {
 public:
  TreatmentSet(std::vector<std::string> labels, Direction direction);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  Direction direction() const noexcept { return direction_; }

  std::optional<std::size_t> find(std::string_view label) const;
  /// Like find() but throws ValidationError for unknown labels.
  std::size_t index_of(std::string_view label) const;

  /// Resolves labels to indices sorted in treatment order. Rejects unknown
  /// or duplicate labels and sets with fewer than two members.
  std::vector<std::size_t> resolve_subset(std::span<const std::string> ids) const;

  TreatmentSet subset(std::span<const std::size_t> indices) const;
  TreatmentSet with_direction(Direction d) const;

  friend bool operator==(const TreatmentSet&, const TreatmentSet&) = default;

 private:
  std::vector<std::string> labels_;
  Direction direction_;
};

/// n x n matrix of p_ik: rows are treatments, columns are ranks.
///
/// Entries within kEntrySlack of [0, 1] are clamped; farther out is an error.
/// Rows must sum to one within kRowTolerance (hard error). Column sums are
/// only checked on demand; see is_doubly_stochastic().
class RankProbabilityMatrix {
 public:
  static constexpr double kRowTolerance = 1e-8;
  static constexpr double kEntrySlack = 1e-12;
  static constexpr double kColumnTolerance = 1e-6;

  RankProbabilityMatrix(Eigen::MatrixXd probs, TreatmentSet treatments);

  std::size_t size() const noexcept { return treatments_.size(); }
  const Eigen::MatrixXd& probs() const noexcept { return probs_; }
  const TreatmentSet& treatments() const noexcept { return treatments_; }

  double max_column_deviation() const;
  bool is_doubly_stochastic(double tol = kColumnTolerance) const {
    return max_column_deviation() <= tol;
  }

  friend bool operator==(const RankProbabilityMatrix& a, const RankProbabilityMatrix& b);

 private:
  Eigen::MatrixXd probs_;
  TreatmentSet treatments_;
};

/// Effects of every non-reference treatment against the reference, with the
/// covariance of those estimates. Effects follow label order, skipping the
/// reference.
class ReferenceEffects {
 public:
  ReferenceEffects(Eigen::VectorXd effects, Eigen::MatrixXd covariance,
                   std::string reference, TreatmentSet treatments);

  const Eigen::VectorXd& effects() const noexcept { return effects_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  const std::string& reference() const noexcept { return reference_; }
  std::size_t reference_index() const noexcept { return reference_index_; }
  const TreatmentSet& treatments() const noexcept { return treatments_; }

  /// Maps a treatment index to its row in effects(), or nullopt for the
  /// reference.
  std::optional<std::size_t> effect_row(std::size_t treatment) const noexcept;

  friend bool operator==(const ReferenceEffects& a, const ReferenceEffects& b);

 private:
  Eigen::VectorXd effects_;
  Eigen::MatrixXd covariance_;
  std::string reference_;
  std::size_t reference_index_ = 0;
  TreatmentSet treatments_;
};

/// Full contrast table: theta(i, j) is the estimate of i versus j.
class PairwiseEffects {
 public:
  PairwiseEffects(Eigen::MatrixXd theta, Eigen::MatrixXd se, TreatmentSet treatments);

  std::size_t size() const noexcept { return treatments_.size(); }
  const Eigen::MatrixXd& theta() const noexcept { return theta_; }
  const Eigen::MatrixXd& se() const noexcept { return se_; }
  const TreatmentSet& treatments() const noexcept { return treatments_; }

  friend bool operator==(const PairwiseEffects& a, const PairwiseEffects& b);

 private:
  Eigen::MatrixXd theta_;
  Eigen::MatrixXd se_;
  TreatmentSet treatments_;
};

enum class ScoreKind { sucra, pscore };

const char* to_string(ScoreKind k) noexcept;
ScoreKind parse_score_kind(std::string_view s);

/// Per-treatment SUCRA or P-score values, each in [0, 1].
class ScoreVector {
 public:
  ScoreVector(std::vector<double> scores, ScoreKind kind, TreatmentSet treatments);

  std::size_t size() const noexcept { return scores_.size(); }
  const std::vector<double>& values() const noexcept { return scores_; }
  double operator[](std::size_t i) const { return scores_[i]; }
  ScoreKind kind() const noexcept { return kind_; }
  const TreatmentSet& treatments() const noexcept { return treatments_; }

  double mean() const;

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

 private:
  std::vector<double> scores_;
  ScoreKind kind_;
  TreatmentSet treatments_;
};

}  // namespace poth
