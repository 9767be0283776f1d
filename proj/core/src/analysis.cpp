#include "poth/analysis.hpp"

#include <cmath>

#include "poth/error.hpp"
#include "poth/ranking.hpp"

namespace poth {

namespace {

template <typename Joint>
void fill_joint(HierarchyReport& report, const Joint& src, const AnalysisOptions& options) {
  const std::size_t n = src.treatments().size();
  if (n >= 3) report.residuals = poth_residuals(src, options.exec);

  auto cumulative = cumulative_poth(src, options.exec);
  report.cumulative = cumulative.values;
  if (cumulative.boundary_tie) {
    report.metadata.warnings.emplace_back(
        "equal scores straddle a best-k boundary; ties resolved by treatment order");
  }

  for (const auto& ids : options.subsets) {
    SubsetSpec spec = SubsetSpec::of(ids);
    const double value = subset_poth(src, spec, options.exec);
    const auto idx = src.treatments().resolve_subset(ids);
    report.subsets.push_back({std::move(spec), value, subset_scores(src, idx, options.exec)});
  }
}

HierarchyReport make_report(double poth, ScoreVector scores, Method method) {
  HierarchyReport r{.poth = poth,
                    .scores = std::move(scores),
                    .residuals = std::nullopt,
                    .cumulative = std::nullopt,
                    .subsets = {},
                    .metadata = {}};
  r.metadata.method = method;
  r.metadata.direction = r.scores.treatments().direction();
  return r;
}

void reject_subsets(const AnalysisOptions& options, const char* what) {
  if (!options.subsets.empty()) {
    throw UnsupportedSourceError(
        std::string("subset POTH is not available for ") + what +
        " input: it needs joint ranking information (pairwise effects or draws)");
  }
}

void warn_score_mean(HierarchyReport& report) {
  const double dev = std::abs(report.scores.mean() - 0.5);
  if (dev > 1e-8) {
    report.metadata.warnings.push_back("scores do not average 0.5 (mean " +
                                       format_number(report.scores.mean()) + ")");
  }
}

}  // namespace

Source resolve_source(const NetworkInputDocument& doc, const AnalysisOptions& options) {
  return std::visit(
      [&](const auto& p) -> Source {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ReferenceEffects>) {
          if (options.reference_method == ReferenceMethod::resample) {
            return sample_mvn(p, options.n_draws, options.seed, options.exec);
          }
          return pairwise_from_reference(p);
        } else {
          return p;
        }
      },
      doc.payload);
}

HierarchyReport build_report(const Source& source, const AnalysisOptions& options) {
  return std::visit(
      [&](const auto& src) -> HierarchyReport {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, PairwiseEffects>) {
          auto r = make_report(global_poth(src, options.exec), global_scores(src, options.exec),
                               Method::pscore);
          fill_joint(r, src, options);
          return r;
        } else if constexpr (std::is_same_v<T, DrawsMatrix>) {
          auto r = make_report(global_poth(src, options.exec), global_scores(src, options.exec),
                               Method::draws);
          r.metadata.n_draws = src.n_draws();
          r.metadata.seed = src.seed();
          r.metadata.tie_count = tied_draw_count(src);
          if (r.metadata.tie_count > 0) {
            r.metadata.warnings.push_back(std::to_string(r.metadata.tie_count) +
                                          " draws contain tied values; ties ranked by treatment order");
          }
          fill_joint(r, src, options);
          return r;
        } else if constexpr (std::is_same_v<T, RankProbabilityMatrix>) {
          reject_subsets(options, "rank-probability");
          auto scores = sucra_from_rank_probs(src);
          const bool doubly = src.is_doubly_stochastic();
          const double poth = doubly ? poth_from_rank_probs(src) : poth_from_scores(scores);
          auto r = make_report(poth, std::move(scores), Method::rank_matrix);
          if (!doubly) {
            r.metadata.warnings.push_back(
                "rank probabilities are not doubly stochastic; POTH computed from SUCRA variance");
          }
          return r;
        } else {
          reject_subsets(options, "score-only");
          auto r = make_report(poth_from_scores(src), src, Method::scores);
          warn_score_mean(r);
          return r;
        }
      },
      source);
}

HierarchyReport analyze(const NetworkInputDocument& doc, const AnalysisOptions& options) {
  HierarchyReport report = build_report(resolve_source(doc, options), options);
  auto& warnings = report.metadata.warnings;
  warnings.insert(warnings.begin(), doc.warnings.begin(), doc.warnings.end());
  return report;
}

}  // namespace poth
