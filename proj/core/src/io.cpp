#include "poth/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "canonical_json.hpp"
#include "poth/error.hpp"

namespace poth {

using nlohmann::json;

const char* to_string(InputFormat f) noexcept {
  switch (f) {
    case InputFormat::reference: return "reference";
    case InputFormat::pairwise: return "pairwise";
    case InputFormat::draws: return "draws";
    case InputFormat::rank_probs: return "rank-probs";
    case InputFormat::scores: return "scores";
  }
  return "reference";
}

InputFormat parse_input_format(std::string_view s) {
  if (s == "reference" || s == "reference-effects") return InputFormat::reference;
  if (s == "pairwise") return InputFormat::pairwise;
  if (s == "draws") return InputFormat::draws;
  if (s == "rank-probs") return InputFormat::rank_probs;
  if (s == "scores") return InputFormat::scores;
  throw ValidationError("unknown input format '" + std::string(s) + "'");
}

const TreatmentSet& NetworkInputDocument::treatments() const {
  return std::visit([](const auto& p) -> const TreatmentSet& { return p.treatments(); }, payload);
}

std::string format_number(double v) {
  if (!std::isfinite(v)) throw NumericalError("cannot serialize a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- CSV ------------------------------------------------------------------

namespace {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

[[noreturn]] void csv_fail(std::size_t line, std::size_t column, const std::string& msg) {
  throw ValidationError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                        ": " + msg);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one physical line. Double-quoted cells may contain commas; "" is an
// escaped quote. Cells are trimmed.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"' && trim(cell).empty()) {
      quoted = true;
      was_quoted = true;
      cell.clear();
    } else if (c == ',') {
      cells.push_back(was_quoted ? cell : trim(cell));
      cell.clear();
      was_quoted = false;
    } else {
      cell += c;
    }
  }
  if (quoted) csv_fail(line_no, cells.size() + 1, "unterminated quoted field");
  cells.push_back(was_quoted ? cell : trim(cell));
  return cells;
}

std::vector<CsvRow> read_csv(std::string_view bytes) {
  std::vector<CsvRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    auto end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) rows.push_back({line_no, split_csv_line(line, line_no)});
    pos = end + 1;
  }
  if (rows.empty()) throw ValidationError("input is empty");
  return rows;
}

double parse_cell(const CsvRow& row, std::size_t col) {
  const std::string& text = row.cells.at(col);
  if (text.empty()) csv_fail(row.line, col + 1, "expected a number, found an empty cell");
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range) {
    csv_fail(row.line, col + 1, "number '" + text + "' is out of range");
  }
  if (ec != std::errc() || ptr != last) {
    csv_fail(row.line, col + 1, "'" + text + "' is not a number");
  }
  if (!std::isfinite(value)) csv_fail(row.line, col + 1, "'" + text + "' is not finite");
  return value;
}

void expect_width(const CsvRow& row, std::size_t width) {
  if (row.cells.size() != width) {
    csv_fail(row.line, std::min(row.cells.size(), width) + 1,
             "expected " + std::to_string(width) + " fields, found " +
                 std::to_string(row.cells.size()));
  }
}

void expect_header(const CsvRow& header, const std::vector<std::string>& names) {
  expect_width(header, names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (header.cells[i] != names[i]) {
      csv_fail(header.line, i + 1,
               "expected header '" + names[i] + "', found '" + header.cells[i] + "'");
    }
  }
}

void check_unique(const std::vector<CsvRow>& rows, std::size_t col) {
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (!seen.insert(r.cells[col]).second) {
      csv_fail(r.line, col + 1, "duplicate treatment '" + r.cells[col] + "'");
    }
  }
}

Eigen::MatrixXd covariance_from_csv(std::string_view bytes, const std::vector<std::string>& order,
                                    const Eigen::VectorXd& se, std::vector<std::string>& warnings) {
  const auto rows = read_csv(bytes);
  const auto& header = rows.front();
  const std::size_t m = order.size();
  expect_width(header, m + 1);
  std::vector<std::size_t> col_of(m + 1);
  std::vector<bool> used(m, false);
  for (std::size_t c = 1; c <= m; ++c) {
    auto it = std::find(order.begin(), order.end(), header.cells[c]);
    if (it == order.end()) {
      csv_fail(header.line, c + 1,
               "covariance column '" + header.cells[c] + "' is not a non-reference treatment");
    }
    const auto k = static_cast<std::size_t>(it - order.begin());
    if (used[k]) csv_fail(header.line, c + 1, "duplicate covariance column '" + header.cells[c] + "'");
    used[k] = true;
    col_of[c] = k;
  }
  if (rows.size() != m + 1) {
    throw ValidationError("covariance matrix must have " + std::to_string(m) + " rows, found " +
                          std::to_string(rows.size() - 1));
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(m),
                                                  static_cast<Eigen::Index>(m), std::nan(""));
  std::vector<bool> row_seen(m, false);
  bool filled_zero = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    expect_width(row, m + 1);
    auto it = std::find(order.begin(), order.end(), row.cells[0]);
    if (it == order.end()) csv_fail(row.line, 1, "unknown covariance row '" + row.cells[0] + "'");
    const auto i = static_cast<std::size_t>(it - order.begin());
    if (row_seen[i]) csv_fail(row.line, 1, "duplicate covariance row '" + row.cells[0] + "'");
    row_seen[i] = true;
    for (std::size_t c = 1; c <= m; ++c) {
      const std::size_t j = col_of[c];
      double v = 0.0;
      if (row.cells[c].empty()) {
        if (i == j) {
          v = se(static_cast<Eigen::Index>(i)) * se(static_cast<Eigen::Index>(i));
        } else {
          filled_zero = true;
        }
      } else {
        v = parse_cell(row, c);
      }
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  if (filled_zero) warnings.emplace_back("missing covariance entries assumed 0");
  return cov;
}

NetworkInputDocument reference_from_csv(const std::vector<CsvRow>& rows, const CsvOptions& opt) {
  expect_header(rows.front(), {"treatment", "effect", "se"});
  std::vector<CsvRow> body(rows.begin() + 1, rows.end());
  for (const auto& r : body) expect_width(r, 3);
  check_unique(body, 0);

  std::vector<std::string> labels;
  std::vector<std::string> non_reference;
  std::vector<double> effects;
  std::vector<double> ses;
  std::optional<std::string> reference;
  for (const auto& r : body) {
    labels.push_back(r.cells[0]);
    if (r.cells[1].empty() && r.cells[2].empty()) {
      if (reference) csv_fail(r.line, 2, "more than one reference row (empty effect and se)");
      reference = r.cells[0];
      continue;
    }
    non_reference.push_back(r.cells[0]);
    effects.push_back(parse_cell(r, 1));
    const double se = parse_cell(r, 2);
    if (se < 0.0) csv_fail(r.line, 3, "standard error must be non-negative");
    ses.push_back(se);
  }
  if (!reference) {
    throw ValidationError("no reference row: leave effect and se empty for the reference treatment");
  }

  std::vector<std::string> warnings;
  const auto m = static_cast<Eigen::Index>(effects.size());
  Eigen::VectorXd eff = Eigen::Map<const Eigen::VectorXd>(effects.data(), m);
  Eigen::VectorXd se = Eigen::Map<const Eigen::VectorXd>(ses.data(), m);
  Eigen::MatrixXd cov;
  if (opt.covariance_csv) {
    cov = covariance_from_csv(*opt.covariance_csv, non_reference, se, warnings);
  } else {
    cov = se.array().square().matrix().asDiagonal();
    if (m > 1) warnings.emplace_back("covariance off-diagonals not supplied; assumed 0");
  }
  TreatmentSet set(std::move(labels), opt.direction);
  return {InputFormat::reference, ReferenceEffects(eff, cov, *reference, std::move(set)), {},
          std::move(warnings)};
}

NetworkInputDocument pairwise_from_csv(const std::vector<CsvRow>& rows, const CsvOptions& opt) {
  expect_header(rows.front(), {"treatment_i", "treatment_j", "theta", "se"});
  std::vector<std::string> labels;
  auto index = [&](const std::string& l) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it != labels.end()) return static_cast<std::size_t>(it - labels.begin());
    labels.push_back(l);
    return labels.size() - 1;
  };
  struct Entry {
    std::size_t i, j;
    double theta, se;
  };
  std::vector<Entry> entries;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    expect_width(row, 4);
    if (row.cells[0].empty()) csv_fail(row.line, 1, "empty treatment label");
    if (row.cells[1].empty()) csv_fail(row.line, 2, "empty treatment label");
    if (row.cells[0] == row.cells[1]) csv_fail(row.line, 2, "a treatment cannot be compared with itself");
    const auto i = index(row.cells[0]);
    const auto j = index(row.cells[1]);
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second) {
      csv_fail(row.line, 1, "comparison '" + row.cells[0] + "' vs '" + row.cells[1] +
                                "' appears more than once");
    }
    const double se = parse_cell(row, 3);
    if (!(se > 0.0)) csv_fail(row.line, 4, "standard error must be positive");
    entries.push_back({i, j, parse_cell(row, 2), se});
  }
  const std::size_t n = labels.size();
  if (n < 2) throw ValidationError("pairwise input needs at least one comparison");
  if (seen.size() != n * (n - 1) / 2) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!seen.contains({i, j})) {
          throw ValidationError("missing comparison '" + labels[i] + "' vs '" + labels[j] +
                                "'; every pair of treatments needs a row");
        }
      }
    }
  }
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(ni, ni);
  Eigen::MatrixXd se = Eigen::MatrixXd::Zero(ni, ni);
  for (const auto& e : entries) {
    const auto a = static_cast<Eigen::Index>(e.i);
    const auto b = static_cast<Eigen::Index>(e.j);
    theta(a, b) = e.theta;
    theta(b, a) = -e.theta;
    se(a, b) = se(b, a) = e.se;
  }
  return {InputFormat::pairwise,
          PairwiseEffects(std::move(theta), std::move(se), TreatmentSet(std::move(labels), opt.direction)),
          {}, {}};
}

NetworkInputDocument draws_from_csv(const std::vector<CsvRow>& rows, const CsvOptions& opt) {
  const auto& header = rows.front();
  for (std::size_t c = 0; c < header.cells.size(); ++c) {
    if (header.cells[c].empty()) csv_fail(header.line, c + 1, "empty treatment label");
  }
  TreatmentSet set(header.cells, opt.direction);
  const std::size_t n = set.size();
  if (rows.size() < 2) throw ValidationError("draws input has a header but no draws");
  DrawsData draws(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(n));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    expect_width(rows[r], n);
    for (std::size_t c = 0; c < n; ++c) {
      draws(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = parse_cell(rows[r], c);
    }
  }
  return {InputFormat::draws, DrawsMatrix(std::move(draws), std::move(set), DrawsSource::supplied),
          {}, {}};
}

NetworkInputDocument rank_probs_from_csv(const std::vector<CsvRow>& rows, const CsvOptions& opt) {
  const std::size_t n = rows.size() - 1;
  std::vector<std::string> header{"treatment"};
  for (std::size_t k = 1; k <= n; ++k) header.push_back("rank" + std::to_string(k));
  expect_header(rows.front(), header);
  std::vector<CsvRow> body(rows.begin() + 1, rows.end());
  check_unique(body, 0);
  std::vector<std::string> labels;
  Eigen::MatrixXd probs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    expect_width(body[r], n + 1);
    labels.push_back(body[r].cells[0]);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double p = parse_cell(body[r], k + 1);
      if (p < 0.0 || p > 1.0) csv_fail(body[r].line, k + 2, "probability outside [0, 1]");
      probs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > RankProbabilityMatrix::kRowTolerance) {
      csv_fail(body[r].line, 2, "rank probabilities sum to " + format_number(sum) + ", not 1");
    }
  }
  RankProbabilityMatrix m(std::move(probs), TreatmentSet(std::move(labels), opt.direction));
  std::vector<std::string> warnings;
  if (!m.is_doubly_stochastic()) {
    warnings.push_back("rank probability columns do not sum to 1 (max deviation " +
                       format_number(m.max_column_deviation()) + ")");
  }
  return {InputFormat::rank_probs, std::move(m), {}, std::move(warnings)};
}

NetworkInputDocument scores_from_csv(const std::vector<CsvRow>& rows, const CsvOptions& opt) {
  expect_header(rows.front(), {"treatment", "score"});
  std::vector<CsvRow> body(rows.begin() + 1, rows.end());
  check_unique(body, 0);
  std::vector<std::string> labels;
  std::vector<double> values;
  for (const auto& r : body) {
    expect_width(r, 2);
    labels.push_back(r.cells[0]);
    const double s = parse_cell(r, 1);
    if (s < 0.0 || s > 1.0) csv_fail(r.line, 2, "score outside [0, 1]");
    values.push_back(s);
  }
  ScoreVector sv(std::move(values), opt.score_kind, TreatmentSet(std::move(labels), opt.direction));
  return {InputFormat::scores, std::move(sv), {}, {}};
}

}  // namespace

NetworkInputDocument parse_input_csv(std::string_view bytes, InputFormat format,
                                     const CsvOptions& options) {
  const auto rows = read_csv(bytes);
  switch (format) {
    case InputFormat::reference: return reference_from_csv(rows, options);
    case InputFormat::pairwise: return pairwise_from_csv(rows, options);
    case InputFormat::draws: return draws_from_csv(rows, options);
    case InputFormat::rank_probs: return rank_probs_from_csv(rows, options);
    case InputFormat::scores: return scores_from_csv(rows, options);
  }
  throw ValidationError("unknown input format");
}

// --- JSON input -----------------------------------------------------------

namespace {

const char* payload_key(InputFormat f) {
  switch (f) {
    case InputFormat::reference: return "reference_effects";
    case InputFormat::pairwise: return "pairwise";
    case InputFormat::draws: return "draws";
    case InputFormat::rank_probs: return "rank_probs";
    case InputFormat::scores: return "scores";
  }
  return "";
}

constexpr InputFormat kAllFormats[] = {InputFormat::reference, InputFormat::pairwise,
                                       InputFormat::draws, InputFormat::rank_probs,
                                       InputFormat::scores};

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing \"" + key + "\"");
  return *it;
}

std::string json_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ValidationError(where + " must be a string");
  return v.get<std::string>();
}

double json_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where + " is not a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(where + " is not finite");
  return d;
}

Eigen::VectorXd json_vector(const json& v, std::size_t n, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + " must be an array");
  if (v.size() != n) {
    throw ValidationError(where + " must have " + std::to_string(n) + " entries, found " +
                          std::to_string(v.size()));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out(static_cast<Eigen::Index>(i)) = json_number(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

template <typename Matrix>
Matrix json_matrix(const json& v, std::optional<std::size_t> rows, std::size_t cols,
                   const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + " must be an array of rows");
  if (rows && v.size() != *rows) {
    throw ValidationError(where + " must have " + std::to_string(*rows) + " rows, found " +
                          std::to_string(v.size()));
  }
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < v.size(); ++r) {
    const auto& row = v[r];
    const std::string rw = where + " row " + std::to_string(r + 1);
    if (!row.is_array() || row.size() != cols) {
      throw ValidationError(rw + " must have " + std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          json_number(row[c], rw + ", column " + std::to_string(c + 1));
    }
  }
  return out;
}

InputMetadata metadata_from_json(const json& doc) {
  InputMetadata meta;
  auto it = doc.find("metadata");
  if (it == doc.end() || it->is_null()) return meta;
  if (!it->is_object()) throw ValidationError("\"metadata\" must be an object");
  for (const auto& [key, value] : it->items()) {
    if (value.is_null()) continue;
    if (key == "network_id") meta.network_id = json_string(value, "metadata.network_id");
    else if (key == "effect_measure") meta.effect_measure = json_string(value, "metadata.effect_measure");
    else if (key == "source_citation") meta.source_citation = json_string(value, "metadata.source_citation");
    else if (key == "tau_estimate") meta.tau_estimate = json_number(value, "metadata.tau_estimate");
    else throw ValidationError("unknown metadata field \"" + key + "\"");
  }
  return meta;
}

}  // namespace

NetworkInputDocument parse_input_json(std::string_view bytes, std::optional<InputFormat> declared) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("input document must be a JSON object");

  static const std::set<std::string> known{"format", "treatments", "direction", "metadata",
                                           "reference_effects", "pairwise", "draws",
                                           "rank_probs", "scores"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw ValidationError("unknown field \"" + key + "\"");
  }

  const InputFormat format = parse_input_format(json_string(field(doc, "format", "document"), "\"format\""));
  if (declared && *declared != format) {
    throw ValidationError(std::string("document format is '") + to_string(format) +
                          "' but '" + to_string(*declared) + "' was declared");
  }
  for (auto f : kAllFormats) {
    if (f != format && doc.contains(payload_key(f))) {
      throw ValidationError(std::string("payload \"") + payload_key(f) +
                            "\" does not match format '" + to_string(format) + "'");
    }
  }

  const auto& labels_json = field(doc, "treatments", "document");
  if (!labels_json.is_array()) throw ValidationError("\"treatments\" must be an array");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < labels_json.size(); ++i) {
    labels.push_back(json_string(labels_json[i], "treatments[" + std::to_string(i) + "]"));
  }
  Direction direction = Direction::larger_is_better;
  if (auto it = doc.find("direction"); it != doc.end()) {
    direction = parse_direction(json_string(*it, "\"direction\""));
  }
  TreatmentSet set(std::move(labels), direction);
  const std::size_t n = set.size();

  std::vector<std::string> warnings;
  std::optional<InputPayload> result;
  const std::string key = payload_key(format);
  const json& payload = field(doc, key.c_str(), "document");

  switch (format) {
    case InputFormat::reference: {
      if (!payload.is_object()) throw ValidationError("\"reference_effects\" must be an object");
      const std::string reference = json_string(field(payload, "reference", key), key + ".reference");
      Eigen::VectorXd effects = json_vector(field(payload, "effects", key), n - 1, key + ".effects");
      const bool has_cov = payload.contains("covariance");
      const bool has_se = payload.contains("se");
      if (has_cov == has_se) {
        throw ValidationError(key + " needs exactly one of \"covariance\" or \"se\"");
      }
      Eigen::MatrixXd cov;
      if (has_cov) {
        cov = json_matrix<Eigen::MatrixXd>(payload["covariance"], n - 1, n - 1, key + ".covariance");
      } else {
        Eigen::VectorXd se = json_vector(payload["se"], n - 1, key + ".se");
        if ((se.array() < 0.0).any()) throw ValidationError(key + ".se must be non-negative");
        cov = se.array().square().matrix().asDiagonal();
        if (n > 2) warnings.emplace_back("covariance off-diagonals not supplied; assumed 0");
      }
      result = ReferenceEffects(std::move(effects), std::move(cov), reference, set);
      break;
    }
    case InputFormat::pairwise: {
      if (!payload.is_object()) throw ValidationError("\"pairwise\" must be an object");
      auto theta = json_matrix<Eigen::MatrixXd>(field(payload, "theta", key), n, n, key + ".theta");
      auto se = json_matrix<Eigen::MatrixXd>(field(payload, "se", key), n, n, key + ".se");
      se.diagonal().setZero();
      result = PairwiseEffects(std::move(theta), std::move(se), set);
      break;
    }
    case InputFormat::draws: {
      auto draws = json_matrix<DrawsData>(payload, std::nullopt, n, "draws");
      result = DrawsMatrix(std::move(draws), set, DrawsSource::supplied);
      break;
    }
    case InputFormat::rank_probs: {
      RankProbabilityMatrix m(json_matrix<Eigen::MatrixXd>(payload, n, n, "rank_probs"), set);
      if (!m.is_doubly_stochastic()) {
        warnings.push_back("rank probability columns do not sum to 1 (max deviation " +
                               format_number(m.max_column_deviation()) + ")");
      }
      result = std::move(m);
      break;
    }
    case InputFormat::scores: {
      if (!payload.is_object()) throw ValidationError("\"scores\" must be an object");
      ScoreKind kind = ScoreKind::sucra;
      if (payload.contains("kind")) kind = parse_score_kind(json_string(payload["kind"], "scores.kind"));
      Eigen::VectorXd values = json_vector(field(payload, "values", key), n, "scores.values");
      result = ScoreVector(std::vector<double>(values.data(), values.data() + values.size()), kind, set);
      break;
    }
  }
  return {format, std::move(*result), metadata_from_json(doc), std::move(warnings)};
}

NetworkInputDocument parse_input(std::string_view bytes, InputFormat declared,
                                 const CsvOptions& options) {
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && bytes[first] == '{') {
    return parse_input_json(bytes, declared);
  }
  return parse_input_csv(bytes, declared, options);
}

// --- canonical JSON writer -----------------------------------------------

namespace {

template <typename Matrix>
json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json scores_object(const ScoreVector& s) {
  json obj = json::object();
  for (std::size_t i = 0; i < s.size(); ++i) obj[s.treatments().label(i)] = s[i];
  return obj;
}

}  // namespace

std::string write_input_json(const NetworkInputDocument& doc) {
  const auto& set = doc.treatments();
  json out;
  out["format"] = to_string(doc.format);
  out["treatments"] = set.labels();
  out["direction"] = to_string(set.direction());

  json meta = json::object();
  if (doc.metadata.network_id) meta["network_id"] = *doc.metadata.network_id;
  if (doc.metadata.effect_measure) meta["effect_measure"] = *doc.metadata.effect_measure;
  if (doc.metadata.tau_estimate) meta["tau_estimate"] = *doc.metadata.tau_estimate;
  if (doc.metadata.source_citation) meta["source_citation"] = *doc.metadata.source_citation;
  if (!meta.empty()) out["metadata"] = std::move(meta);

  const std::string key = payload_key(doc.format);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ReferenceEffects>) {
          out[key] = {{"reference", p.reference()},
                      {"effects", std::vector<double>(p.effects().data(), p.effects().data() + p.effects().size())},
                      {"covariance", matrix_json(p.covariance())}};
        } else if constexpr (std::is_same_v<T, PairwiseEffects>) {
          out[key] = {{"theta", matrix_json(p.theta())}, {"se", matrix_json(p.se())}};
        } else if constexpr (std::is_same_v<T, DrawsMatrix>) {
          out[key] = matrix_json(p.draws());
        } else if constexpr (std::is_same_v<T, RankProbabilityMatrix>) {
          out[key] = matrix_json(p.probs());
        } else {
          out[key] = {{"kind", to_string(p.kind())}, {"values", p.values()}};
        }
      },
      doc.payload);
  return canonical_json(out);
}

// --- report ---------------------------------------------------------------

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::pscore: return "pscore";
    case Method::draws: return "draws";
    case Method::rank_matrix: return "rank-matrix";
    case Method::scores: return "scores";
  }
  return "pscore";
}

Method parse_method(std::string_view s) {
  if (s == "pscore") return Method::pscore;
  if (s == "draws") return Method::draws;
  if (s == "rank-matrix") return Method::rank_matrix;
  if (s == "scores") return Method::scores;
  throw ValidationError("unknown method '" + std::string(s) + "'");
}

std::string write_report(const HierarchyReport& r) {
  const auto& set = r.scores.treatments();
  json out;
  out["poth"] = r.poth;
  out["kind"] = to_string(r.scores.kind());
  out["treatments"] = set.labels();
  out["scores"] = scores_object(r.scores);
  if (r.residuals) {
    json res = json::object();
    for (std::size_t i = 0; i < set.size(); ++i) res[set.label(i)] = (*r.residuals)[i];
    out["residuals"] = std::move(res);
  } else {
    out["residuals"] = nullptr;
  }
  out["cumulative"] = r.cumulative ? json(*r.cumulative) : json(nullptr);

  json subsets = json::array();
  for (const auto& s : r.subsets) {
    json entry;
    entry["ids"] = s.spec.ids;
    entry["kind"] = to_string(s.spec.kind);
    entry["left_out"] = s.spec.left_out ? json(*s.spec.left_out) : json(nullptr);
    entry["k"] = s.spec.k ? json(*s.spec.k) : json(nullptr);
    entry["poth"] = s.poth;
    entry["treatments"] = s.scores.treatments().labels();
    entry["scores"] = scores_object(s.scores);
    subsets.push_back(std::move(entry));
  }
  out["subsets"] = std::move(subsets);

  const auto& m = r.metadata;
  out["metadata"] = {
      {"method", to_string(m.method)},
      {"n_draws", m.n_draws ? json(*m.n_draws) : json(nullptr)},
      {"seed", m.seed ? json(*m.seed) : json(nullptr)},
      {"direction", to_string(m.direction)},
      {"tie_count", m.tie_count},
      {"warnings", m.warnings},
  };
  return canonical_json(out);
}

namespace {

std::vector<std::string> json_labels(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + " must be an array");
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(json_string(x, where));
  return out;
}

ScoreVector scores_from_object(const json& obj, const TreatmentSet& set, ScoreKind kind,
                               const std::string& where) {
  if (!obj.is_object() || obj.size() != set.size()) {
    throw ValidationError(where + " must map each treatment to a score");
  }
  std::vector<double> values;
  for (const auto& l : set.labels()) values.push_back(json_number(field(obj, l.c_str(), where), where + "." + l));
  return ScoreVector(std::move(values), kind, set);
}

}  // namespace

HierarchyReport parse_report(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("report must be a JSON object");

  const auto& meta = field(doc, "metadata", "report");
  ReportMetadata m;
  m.method = parse_method(json_string(field(meta, "method", "metadata"), "metadata.method"));
  m.direction = parse_direction(json_string(field(meta, "direction", "metadata"), "metadata.direction"));
  if (const auto& v = field(meta, "n_draws", "metadata"); !v.is_null()) m.n_draws = v.get<std::size_t>();
  if (const auto& v = field(meta, "seed", "metadata"); !v.is_null()) m.seed = v.get<std::uint64_t>();
  m.tie_count = field(meta, "tie_count", "metadata").get<std::size_t>();
  m.warnings = json_labels(field(meta, "warnings", "metadata"), "metadata.warnings");

  const ScoreKind kind = parse_score_kind(json_string(field(doc, "kind", "report"), "kind"));
  TreatmentSet set(json_labels(field(doc, "treatments", "report"), "treatments"), m.direction);

  HierarchyReport r{
      .poth = json_number(field(doc, "poth", "report"), "poth"),
      .scores = scores_from_object(field(doc, "scores", "report"), set, kind, "scores"),
      .residuals = std::nullopt,
      .cumulative = std::nullopt,
      .subsets = {},
      .metadata = std::move(m),
  };
  if (const auto& res = field(doc, "residuals", "report"); !res.is_null()) {
    if (!res.is_object()) throw ValidationError("residuals must be an object or null");
    std::vector<double> values;
    for (const auto& l : set.labels()) values.push_back(json_number(field(res, l.c_str(), "residuals"), "residuals." + l));
    r.residuals = std::move(values);
  }
  if (const auto& cum = field(doc, "cumulative", "report"); !cum.is_null()) {
    if (!cum.is_array() || cum.size() != set.size() - 1) {
      throw ValidationError("cumulative must hold one value for each k = 2..n");
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < cum.size(); ++i) values.push_back(json_number(cum[i], "cumulative"));
    r.cumulative = std::move(values);
  }
  for (const auto& s : field(doc, "subsets", "report")) {
    SubsetSpec spec;
    spec.ids = json_labels(field(s, "ids", "subset"), "subset.ids");
    const std::string kind_name = json_string(field(s, "kind", "subset"), "subset.kind");
    if (kind_name == "explicit") spec.kind = SubsetKind::explicit_ids;
    else if (kind_name == "leave-one-out") spec.kind = SubsetKind::leave_one_out;
    else if (kind_name == "best-k") spec.kind = SubsetKind::best_k;
    else throw ValidationError("unknown subset kind '" + kind_name + "'");
    if (const auto& v = field(s, "left_out", "subset"); !v.is_null()) spec.left_out = json_string(v, "subset.left_out");
    if (const auto& v = field(s, "k", "subset"); !v.is_null()) spec.k = v.get<std::size_t>();
    TreatmentSet sub(json_labels(field(s, "treatments", "subset"), "subset.treatments"), set.direction());
    r.subsets.push_back({std::move(spec), json_number(field(s, "poth", "subset"), "subset.poth"),
                         scores_from_object(field(s, "scores", "subset"), sub, kind, "subset.scores")});
  }
  return r;
}

}  // namespace poth
