#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "poth/report.hpp"
#include "poth/resampling.hpp"
#include "poth/types.hpp"

namespace poth {

enum class InputFormat { reference, pairwise, draws, rank_probs, scores };

const char* to_string(InputFormat f) noexcept;
InputFormat parse_input_format(std::string_view s);

/// Provenance carried alongside a network; only used by the batch harness.
struct InputMetadata {
  std::optional<std::string> network_id;
  std::optional<std::string> effect_measure;
  std::optional<double> tau_estimate;
  std::optional<std::string> source_citation;

  friend bool operator==(const InputMetadata&, const InputMetadata&) = default;
};

using InputPayload =
    std::variant<ReferenceEffects, PairwiseEffects, DrawsMatrix, RankProbabilityMatrix, ScoreVector>;

struct NetworkInputDocument {
  InputFormat format;
  InputPayload payload;
  InputMetadata metadata;
  /// Non-fatal ingestion notes (assumed-zero covariances, loose column sums).
  std::vector<std::string> warnings;

  const TreatmentSet& treatments() const;

  /// Compares content; ingestion warnings are not part of a document's identity.
  friend bool operator==(const NetworkInputDocument& a, const NetworkInputDocument& b) {
    return a.format == b.format && a.payload == b.payload && a.metadata == b.metadata;
  }
};

/// Settings a CSV file cannot carry itself.
struct CsvOptions {
  Direction direction = Direction::larger_is_better;
  ScoreKind score_kind = ScoreKind::sucra;
  /// Labelled square covariance matrix accompanying a reference-effects CSV.
  std::optional<std::string> covariance_csv;
};

/// Parses a CSV file in one of the layouts below. Errors carry line/column.
///
///   reference   treatment,effect,se      (reference row: empty effect and se)
///   pairwise    treatment_i,treatment_j,theta,se
///   draws       <label>,<label>,...      (one draw per line)
///   rank-probs  treatment,rank1,...,rankN
///   scores      treatment,score
NetworkInputDocument parse_input_csv(std::string_view bytes, InputFormat format,
                                     const CsvOptions& options = {});

/// Parses the JSON document form. When `declared` is set it must match the
/// document's own "format".
NetworkInputDocument parse_input_json(std::string_view bytes,
                                      std::optional<InputFormat> declared = std::nullopt);

/// Dispatches on content: a leading '{' means JSON, anything else CSV.
NetworkInputDocument parse_input(std::string_view bytes, InputFormat declared,
                                 const CsvOptions& options = {});

/// Canonical JSON for an input document (sorted keys, %.17g numbers).
std::string write_input_json(const NetworkInputDocument& doc);

/// Canonical report JSON: sorted keys, numbers at 17 significant digits, so
/// identical reports serialize to identical bytes.
std::string write_report(const HierarchyReport& report);
HierarchyReport parse_report(std::string_view bytes);

/// Formats a double the way the canonical writers do.
std::string format_number(double v);

}  // namespace poth
