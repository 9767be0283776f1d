#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "poth/io.hpp"
#include "poth/parallel.hpp"
#include "poth/report.hpp"
#include "poth/resampling.hpp"

namespace poth {

/// What the metrics run on once an input document is resolved.
using Source = std::variant<PairwiseEffects, DrawsMatrix, RankProbabilityMatrix, ScoreVector>;

/// Reference-effects inputs can be scored analytically (P-scores) or by
/// resampling from their multivariate normal sampling distribution.
enum class ReferenceMethod { pscore, resample };

struct AnalysisOptions {
  std::size_t n_draws = kDefaultDraws;
  std::uint64_t seed = 1;
  ReferenceMethod reference_method = ReferenceMethod::pscore;
  /// Explicit subsets to score, by treatment label.
  std::vector<std::vector<std::string>> subsets;
  ExecutionPolicy exec;
};

Source resolve_source(const NetworkInputDocument& doc, const AnalysisOptions& options);

/// Global POTH and scores for any source; residuals and the cumulative series
/// for joint sources; plus the requested subsets. Requesting subsets from a
/// marginal source throws UnsupportedSourceError.
HierarchyReport build_report(const Source& source, const AnalysisOptions& options);

/// resolve_source + build_report, with the document's warnings carried over
/// and sampling provenance recorded.
HierarchyReport analyze(const NetworkInputDocument& doc, const AnalysisOptions& options);

}  // namespace poth
