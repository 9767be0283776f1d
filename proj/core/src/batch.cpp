#include "poth/batch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "canonical_json.hpp"
#include "poth/error.hpp"
#include "poth/normal.hpp"
#include "poth/ranking.hpp"

namespace poth {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("correlation inputs differ in length (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw ValidationError("correlation needs at least 2 observations");
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> try_corr(double (*corr)(std::span<const double>, std::span<const double>),
                               const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return corr(x, y);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ValidationError("correlation is undefined when an input has zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double prop_significant(const PairwiseEffects& p, double alpha) {
  const auto n = static_cast<Eigen::Index>(p.size());
  std::size_t significant = 0;
  std::size_t pairs = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      ++pairs;
      if (two_sided_p(p.theta()(i, j) / p.se()(i, j)) < alpha) ++significant;
    }
  }
  return static_cast<double>(significant) / static_cast<double>(pairs);
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::uint64_t stable_hash(std::string_view s) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

BatchResult run_batch(std::vector<BatchFile> files, const BatchOptions& options) {
  std::sort(files.begin(), files.end(),
            [](const BatchFile& a, const BatchFile& b) { return a.name < b.name; });

  struct Outcome {
    std::optional<BatchSummaryRow> row;
    std::optional<BatchSkip> skip;
  };
  std::vector<Outcome> outcomes(files.size());

  parallel_for(files.size(), options.analysis.exec, [&](std::size_t f) {
    const auto& file = files[f];
    try {
      const auto doc = parse_input_json(file.contents);
      std::string id = doc.metadata.network_id.value_or(
          std::filesystem::path(file.name).stem().string());

      AnalysisOptions opt = options.analysis;
      opt.subsets.clear();
      opt.exec = ExecutionPolicy{1};
      opt.seed = options.analysis.seed + stable_hash(id);
      const auto report = analyze(doc, opt);

      BatchSummaryRow row;
      row.network_id = std::move(id);
      row.n_treatments = doc.treatments().size();
      row.poth = report.poth;
      row.effect_measure = doc.metadata.effect_measure;
      row.tau_estimate = doc.metadata.tau_estimate;
      row.warnings = report.metadata.warnings;
      if (const auto* pw = std::get_if<PairwiseEffects>(&doc.payload)) {
        row.prop_significant = prop_significant(*pw, options.alpha);
      } else if (const auto* ref = std::get_if<ReferenceEffects>(&doc.payload)) {
        row.prop_significant = prop_significant(pairwise_from_reference(*ref), options.alpha);
      }
      outcomes[f].row = std::move(row);
    } catch (const std::exception& e) {
      outcomes[f].skip = BatchSkip{file.name, e.what()};
    }
  });

  BatchResult result;
  for (auto& o : outcomes) {
    if (o.row) result.rows.push_back(std::move(*o.row));
    if (o.skip) result.skipped.push_back(std::move(*o.skip));
  }
  if (result.rows.empty()) {
    throw ValidationError("batch corpus has no parseable networks (" +
                          std::to_string(result.skipped.size()) + " skipped)");
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const auto& a, const auto& b) { return a.network_id < b.network_id; });

  auto& s = result.summary;
  std::vector<double> poth, size;
  for (const auto& r : result.rows) {
    poth.push_back(r.poth);
    size.push_back(static_cast<double>(r.n_treatments));
  }
  s.networks = result.rows.size();
  s.median_poth = quantile(poth, 0.5);
  s.q1_poth = quantile(poth, 0.25);
  s.q3_poth = quantile(poth, 0.75);
  s.min_poth = *std::min_element(poth.begin(), poth.end());
  s.max_poth = *std::max_element(poth.begin(), poth.end());
  s.spearman_size_poth = try_corr(spearman, size, poth);

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_measure;
  std::vector<double> sig_x, sig_y;
  for (const auto& r : result.rows) {
    if (r.tau_estimate && r.effect_measure) {
      auto& [tau, p] = by_measure[*r.effect_measure];
      tau.push_back(*r.tau_estimate);
      p.push_back(r.poth);
    }
    if (r.prop_significant) {
      sig_x.push_back(*r.prop_significant);
      sig_y.push_back(r.poth);
    }
  }
  for (const auto& [measure, xy] : by_measure) {
    s.pearson_tau_poth[measure] = try_corr(pearson, xy.second, xy.first);
  }
  s.pearson_prop_significant_poth = try_corr(pearson, sig_y, sig_x);
  return result;
}

BatchResult run_batch(const std::filesystem::path& dir, const BatchOptions& options) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("cannot read batch directory '" + dir.string() + "'");
  }
  std::vector<BatchFile> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw IoError("cannot open '" + entry.path().string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    files.push_back({entry.path().filename().string(), buf.str()});
  }
  if (files.empty()) throw ValidationError("no *.json network files in '" + dir.string() + "'");
  return run_batch(std::move(files), options);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string write_summary_csv(const BatchResult& result) {
  std::ostringstream out;
  out << "network_id,n_treatments,poth,effect_measure,tau,prop_significant\n";
  for (const auto& r : result.rows) {
    out << csv_field(r.network_id) << ',' << r.n_treatments << ',' << format_number(r.poth) << ','
        << csv_field(r.effect_measure.value_or("")) << ','
        << (r.tau_estimate ? format_number(*r.tau_estimate) : "") << ','
        << (r.prop_significant ? format_number(*r.prop_significant) : "") << '\n';
  }
  return out.str();
}

std::string write_summary_json(const BatchResult& result) {
  using nlohmann::json;
  const auto& s = result.summary;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json tau = json::object();
  for (const auto& [measure, value] : s.pearson_tau_poth) tau[measure] = opt(value);
  json skipped = json::array();
  for (const auto& k : result.skipped) skipped.push_back({{"file", k.file}, {"message", k.message}});
  json out = {
      {"networks", s.networks},
      {"median_poth", s.median_poth},
      {"q1_poth", s.q1_poth},
      {"q3_poth", s.q3_poth},
      {"min_poth", s.min_poth},
      {"max_poth", s.max_poth},
      {"spearman_size_poth", opt(s.spearman_size_poth)},
      {"pearson_tau_poth", tau},
      {"pearson_prop_significant_poth", opt(s.pearson_prop_significant_poth)},
      {"skipped", skipped},
  };
  return canonical_json(out);
}

}  // namespace poth
