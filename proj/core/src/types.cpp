#include "poth/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "poth/error.hpp"

namespace poth {

const char* to_string(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::unsupported: return "unsupported";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

const char* to_string(Direction d) noexcept {
  return d == Direction::larger_is_better ? "larger" : "smaller";
}

Direction parse_direction(std::string_view s) {
  if (s == "larger" || s == "larger-is-better") return Direction::larger_is_better;
  if (s == "smaller" || s == "smaller-is-better") return Direction::smaller_is_better;
  throw ValidationError("unknown direction '" + std::string(s) +
                        "' (expected 'larger' or 'smaller')");
}

const char* to_string(ScoreKind k) noexcept {
  return k == ScoreKind::sucra ? "sucra" : "pscore";
}

ScoreKind parse_score_kind(std::string_view s) {
  if (s == "sucra") return ScoreKind::sucra;
  if (s == "pscore") return ScoreKind::pscore;
  throw ValidationError("unknown score kind '" + std::string(s) + "'");
}

// --- TreatmentSet ---------------------------------------------------------

TreatmentSet::TreatmentSet(std::vector<std::string> labels, Direction direction)
    : labels_(std::move(labels)), direction_(direction) {
  if (labels_.size() < 2) {
    throw ValidationError("a treatment set needs at least 2 treatments, got " +
                          std::to_string(labels_.size()));
  }
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw ValidationError("treatment labels must be non-empty");
    if (!seen.insert(l).second) {
      throw ValidationError("duplicate treatment label '" + l + "'");
    }
  }
}

std::optional<std::size_t> TreatmentSet::find(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t TreatmentSet::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw ValidationError("unknown treatment '" + std::string(label) + "'");
}

std::vector<std::size_t> TreatmentSet::resolve_subset(
    std::span<const std::string> ids) const {
  std::vector<std::size_t> idx;
  idx.reserve(ids.size());
  for (const auto& id : ids) idx.push_back(index_of(id));
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
    throw ValidationError("subset lists a treatment more than once");
  }
  if (idx.size() < 2) {
    throw ValidationError("a subset needs at least 2 treatments, got " +
                          std::to_string(idx.size()));
  }
  return idx;
}

TreatmentSet TreatmentSet::subset(std::span<const std::size_t> indices) const {
  std::vector<std::string> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(labels_.at(i));
  return TreatmentSet(std::move(out), direction_);
}

TreatmentSet TreatmentSet::with_direction(Direction d) const {
  TreatmentSet copy = *this;
  copy.direction_ = d;
  return copy;
}

// --- RankProbabilityMatrix ------------------------------------------------

RankProbabilityMatrix::RankProbabilityMatrix(Eigen::MatrixXd probs,
                                             TreatmentSet treatments)
    : probs_(std::move(probs)), treatments_(std::move(treatments)) {
  const auto n = static_cast<Eigen::Index>(treatments_.size());
  if (probs_.rows() != n || probs_.cols() != n) {
    throw ValidationError("rank probability matrix is " + std::to_string(probs_.rows()) +
                          "x" + std::to_string(probs_.cols()) + " but there are " +
                          std::to_string(n) + " treatments");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      double& p = probs_(i, k);
      if (!std::isfinite(p) || p < -kEntrySlack || p > 1.0 + kEntrySlack) {
        throw ValidationError("rank probability for treatment '" +
                              treatments_.label(static_cast<std::size_t>(i)) +
                              "' at rank " + std::to_string(k + 1) +
                              " is outside [0, 1]");
      }
      p = std::clamp(p, 0.0, 1.0);
    }
    const double row = probs_.row(i).sum();
    if (std::abs(row - 1.0) > kRowTolerance) {
      throw ValidationError("rank probabilities for treatment '" +
                            treatments_.label(static_cast<std::size_t>(i)) +
                            "' (row " + std::to_string(i + 1) + ") sum to " +
                            std::to_string(row) + ", not 1");
    }
  }
}

double RankProbabilityMatrix::max_column_deviation() const {
  return (probs_.colwise().sum().array() - 1.0).abs().maxCoeff();
}

bool operator==(const RankProbabilityMatrix& a, const RankProbabilityMatrix& b) {
  return a.treatments_ == b.treatments_ && same_matrix(a.probs_, b.probs_);
}

// --- ReferenceEffects -----------------------------------------------------

ReferenceEffects::ReferenceEffects(Eigen::VectorXd effects, Eigen::MatrixXd covariance,
                                   std::string reference, TreatmentSet treatments)
    : effects_(std::move(effects)),
      covariance_(std::move(covariance)),
      reference_(std::move(reference)),
      treatments_(std::move(treatments)) {
  reference_index_ = treatments_.index_of(reference_);
  const auto m = static_cast<Eigen::Index>(treatments_.size() - 1);
  if (effects_.size() != m) {
    throw ValidationError("expected " + std::to_string(m) +
                          " effects against the reference, got " +
                          std::to_string(effects_.size()));
  }
  if (covariance_.rows() != m || covariance_.cols() != m) {
    throw ValidationError("covariance must be " + std::to_string(m) + "x" +
                          std::to_string(m));
  }
  if (!effects_.allFinite() || !covariance_.allFinite()) {
    throw ValidationError("effects and covariance must be finite");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (covariance_(i, i) < 0.0) {
      throw ValidationError("covariance has a negative variance at row " +
                            std::to_string(i + 1));
    }
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (std::abs(covariance_(i, j) - covariance_(j, i)) > 1e-10) {
        throw ValidationError("covariance is not symmetric at (" + std::to_string(i + 1) +
                              ", " + std::to_string(j + 1) + ")");
      }
    }
  }
}

std::optional<std::size_t> ReferenceEffects::effect_row(std::size_t treatment) const noexcept {
  if (treatment == reference_index_) return std::nullopt;
  return treatment < reference_index_ ? treatment : treatment - 1;
}

bool operator==(const ReferenceEffects& a, const ReferenceEffects& b) {
  return a.treatments_ == b.treatments_ && a.reference_ == b.reference_ &&
         same_matrix(a.effects_, b.effects_) && same_matrix(a.covariance_, b.covariance_);
}

// --- PairwiseEffects ------------------------------------------------------

PairwiseEffects::PairwiseEffects(Eigen::MatrixXd theta, Eigen::MatrixXd se,
                                 TreatmentSet treatments)
    : theta_(std::move(theta)), se_(std::move(se)), treatments_(std::move(treatments)) {
  const auto n = static_cast<Eigen::Index>(treatments_.size());
  if (theta_.rows() != n || theta_.cols() != n || se_.rows() != n || se_.cols() != n) {
    throw ValidationError("pairwise theta and se must both be " + std::to_string(n) + "x" +
                          std::to_string(n));
  }
  auto pair_name = [&](Eigen::Index i, Eigen::Index j) {
    return "'" + treatments_.label(static_cast<std::size_t>(i)) + "' vs '" +
           treatments_.label(static_cast<std::size_t>(j)) + "'";
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    if (theta_(i, i) != 0.0) {
      throw ValidationError("theta diagonal must be 0 for '" +
                            treatments_.label(static_cast<std::size_t>(i)) + "'");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!std::isfinite(theta_(i, j)) || !std::isfinite(se_(i, j))) {
        throw ValidationError("non-finite contrast for " + pair_name(i, j));
      }
      if (!(se_(i, j) > 0.0)) {
        throw ValidationError("standard error must be positive for " + pair_name(i, j));
      }
      if (std::abs(theta_(i, j) + theta_(j, i)) > 1e-10) {
        throw ValidationError("theta is not antisymmetric for " + pair_name(i, j));
      }
      if (std::abs(se_(i, j) - se_(j, i)) > 1e-10) {
        throw ValidationError("se is not symmetric for " + pair_name(i, j));
      }
    }
  }
}

bool operator==(const PairwiseEffects& a, const PairwiseEffects& b) {
  return a.treatments_ == b.treatments_ && same_matrix(a.theta_, b.theta_) &&
         same_matrix(a.se_, b.se_);
}

// --- ScoreVector ----------------------------------------------------------

ScoreVector::ScoreVector(std::vector<double> scores, ScoreKind kind, TreatmentSet treatments)
    : scores_(std::move(scores)), kind_(kind), treatments_(std::move(treatments)) {
  if (scores_.size() != treatments_.size()) {
    throw ValidationError("got " + std::to_string(scores_.size()) + " scores for " +
                          std::to_string(treatments_.size()) + " treatments");
  }
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    const double s = scores_[i];
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw ValidationError("score for '" + treatments_.label(i) + "' is outside [0, 1]");
    }
  }
}

double ScoreVector::mean() const {
  return std::accumulate(scores_.begin(), scores_.end(), 0.0) /
         static_cast<double>(scores_.size());
}

}  // namespace poth
