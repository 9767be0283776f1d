#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poth/analysis.hpp"
#include "poth/types.hpp"

namespace poth {

/// Spearman rank correlation; tied values get their average rank.
double spearman(std::span<const double> x, std::span<const double> y);

/// Pearson product-moment correlation.
double pearson(std::span<const double> x, std::span<const double> y);

/// Fraction of unordered treatment pairs whose two-sided z-test p-value,
/// 2 (1 - Phi(|theta| / SE)), is below alpha. Every pair counts, not just
/// directly compared ones.
double prop_significant(const PairwiseEffects& p, double alpha = 0.05);

/// Quantile with linear interpolation between order statistics (R's type 7).
double quantile(std::vector<double> values, double prob);

struct BatchSummaryRow {
  std::string network_id;
  std::size_t n_treatments = 0;
  double poth = 0.0;
  std::optional<std::string> effect_measure;
  std::optional<double> tau_estimate;
  /// Absent for inputs without contrasts (draws, rank probabilities, scores).
  std::optional<double> prop_significant;
  std::vector<std::string> warnings;
};

struct BatchSkip {
  std::string file;
  std::string message;
};

struct BatchSummary {
  std::size_t networks = 0;
  double median_poth = 0.0;
  double q1_poth = 0.0;
  double q3_poth = 0.0;
  double min_poth = 0.0;
  double max_poth = 0.0;
  /// Spearman correlation between network size and POTH, when defined.
  std::optional<double> spearman_size_poth;
  /// Pearson correlation between POTH and tau for each effect measure with at
  /// least two networks reporting tau, when defined.
  std::map<std::string, std::optional<double>> pearson_tau_poth;
  /// Pearson correlation between POTH and the significant-comparison share.
  std::optional<double> pearson_prop_significant_poth;
};

struct BatchResult {
  std::vector<BatchSummaryRow> rows;  // sorted by network_id
  std::vector<BatchSkip> skipped;     // sorted by file name
  BatchSummary summary;
};

struct BatchOptions {
  double alpha = 0.05;
  AnalysisOptions analysis;
};

/// One input file: name (used for diagnostics and as the fallback network id)
/// and contents.
struct BatchFile {
  std::string name;
  std::string contents;
};

/// Scores every parseable JSON network document. Unparseable files are
/// skipped with a diagnostic. Each network samples with its own seed,
/// options.analysis.seed + hash(network_id), so results do not depend on
/// file order or worker count. Throws ValidationError if nothing parses.
BatchResult run_batch(std::vector<BatchFile> files, const BatchOptions& options);

/// Reads every *.json file in `dir` and runs the batch over them.
BatchResult run_batch(const std::filesystem::path& dir, const BatchOptions& options);

/// Stable 64-bit FNV-1a hash used for per-network seeds.
std::uint64_t stable_hash(std::string_view s) noexcept;

/// Summary CSV with the fixed header
/// network_id,n_treatments,poth,effect_measure,tau,prop_significant
std::string write_summary_csv(const BatchResult& result);

/// Canonical JSON of the summary statistics and skipped files.
std::string write_summary_json(const BatchResult& result);

}  // namespace poth
