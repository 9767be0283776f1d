#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poth/poth.hpp"
#include "poth/types.hpp"

namespace poth {

/// How the global scores were obtained.
enum class Method { pscore, draws, rank_matrix, scores };

const char* to_string(Method m) noexcept;
Method parse_method(std::string_view s);

struct ReportMetadata {
  Method method = Method::pscore;
  std::optional<std::size_t> n_draws;
  std::optional<std::uint64_t> seed;
  Direction direction = Direction::larger_is_better;
  std::size_t tie_count = 0;
  std::vector<std::string> warnings;

  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct SubsetResult {
  SubsetSpec spec;
  double poth = 0.0;
  ScoreVector scores;

  friend bool operator==(const SubsetResult&, const SubsetResult&) = default;
};

/// Everything computed for one network.
struct HierarchyReport {
  double poth = 0.0;
  ScoreVector scores;
  /// Per treatment, in treatment order. Absent for n = 2 or marginal sources.
  std::optional<std::vector<double>> residuals;
  /// cumulative[k - 2] = cPOTH_k. Absent for marginal sources.
  std::optional<std::vector<double>> cumulative;
  std::vector<SubsetResult> subsets;
  ReportMetadata metadata;

  friend bool operator==(const HierarchyReport&, const HierarchyReport&) = default;
};

}  // namespace poth
