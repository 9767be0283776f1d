#include "poth_cli/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "poth/analysis.hpp"
#include "poth/batch.hpp"
#include "poth/error.hpp"
#include "poth/io.hpp"

namespace poth::cli {

namespace {

struct Config {
  std::string command;
  std::string input;
  std::optional<std::string> format;
  std::optional<std::string> direction;
  std::size_t n_draws = kDefaultDraws;
  std::uint64_t seed = 1;
  std::vector<std::string> subsets;  // each "a,b,c"
  std::optional<std::string> output;
  std::string plot_kind = "cumulative";
  std::string score_kind = "sucra";
  std::optional<std::string> covariance;
  std::string method = "pscore";
  unsigned threads = 0;
  std::string dir;
  std::optional<std::string> out_csv;
  std::optional<std::string> summary_json;
  double alpha = 0.05;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return buf.str();
}

void emit(const Config& cfg, const std::string& bytes, std::ostream& out) {
  if (!cfg.output) {
    out << bytes;
    return;
  }
  std::ofstream f(*cfg.output, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + *cfg.output + "' for writing");
  f << bytes;
  f.close();
  if (!f) throw IoError("cannot write '" + *cfg.output + "'");
}

std::vector<std::string> split_ids(const std::string& list) {
  std::vector<std::string> ids;
  std::string cur;
  std::istringstream in(list);
  while (std::getline(in, cur, ',')) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    ids.push_back(b == std::string::npos ? std::string{} : cur.substr(b, e - b + 1));
  }
  if (ids.empty()) throw ValidationError("--subset needs a comma-separated list of treatments");
  return ids;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

bool looks_like_json(std::string_view bytes) {
  const auto p = bytes.find_first_not_of(" \t\r\n");
  return p != std::string_view::npos && bytes[p] == '{';
}

NetworkInputDocument load_input(const Config& cfg) {
  const std::string bytes = read_file(cfg.input);
  std::optional<InputFormat> declared;
  if (cfg.format) declared = parse_input_format(*cfg.format);

  NetworkInputDocument doc = [&] {
    if (looks_like_json(bytes)) return parse_input_json(bytes, declared);
    if (!declared) throw ValidationError("--format is required for CSV input");
    CsvOptions opt;
    if (cfg.direction) opt.direction = parse_direction(*cfg.direction);
    opt.score_kind = parse_score_kind(cfg.score_kind);
    if (cfg.covariance) opt.covariance_csv = read_file(*cfg.covariance);
    return parse_input_csv(bytes, *declared, opt);
  }();

  if (cfg.direction && parse_direction(*cfg.direction) != doc.treatments().direction()) {
    throw ValidationError(std::string("--direction ") + *cfg.direction +
                          " conflicts with the document's direction '" +
                          to_string(doc.treatments().direction()) + "'");
  }
  if (cfg.covariance && doc.format != InputFormat::reference) {
    throw ValidationError("--covariance only applies to reference-effects input");
  }
  return doc;
}

AnalysisOptions analysis_options(const Config& cfg) {
  AnalysisOptions opt;
  opt.n_draws = cfg.n_draws;
  opt.seed = cfg.seed;
  opt.reference_method = cfg.method == "resample" ? ReferenceMethod::resample : ReferenceMethod::pscore;
  for (const auto& s : cfg.subsets) opt.subsets.push_back(split_ids(s));
  opt.exec = ExecutionPolicy{cfg.threads};
  return opt;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

bool joint(const Source& s) {
  return std::holds_alternative<PairwiseEffects>(s) || std::holds_alternative<DrawsMatrix>(s);
}

HierarchyReport compute_report(const Config& cfg, std::ostream& err, bool needs_joint) {
  const auto doc = load_input(cfg);
  const auto options = analysis_options(cfg);
  const auto source = resolve_source(doc, options);
  if (needs_joint && !joint(source)) {
    throw UnsupportedSourceError(
        "'" + cfg.command + "' needs joint ranking information (pairwise effects, reference "
        "effects or draws); " + to_string(doc.format) + " input only carries marginal scores");
  }
  auto report = build_report(source, options);
  auto& w = report.metadata.warnings;
  w.insert(w.begin(), doc.warnings.begin(), doc.warnings.end());
  print_warnings(w, err);
  return report;
}

int cmd_compute(const Config& cfg, std::ostream& out, std::ostream& err) {
  emit(cfg, write_report(compute_report(cfg, err, false)), out);
  return kExitOk;
}

int cmd_subset(const Config& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.subsets.empty()) throw ValidationError("'subset' needs at least one --subset list");
  emit(cfg, write_report(compute_report(cfg, err, false)), out);
  return kExitOk;
}

int cmd_residuals(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto report = compute_report(cfg, err, true);
  if (!report.residuals) {
    throw ValidationError("residuals need at least 3 treatments (leaving one out must leave 2)");
  }
  const auto& labels = report.scores.treatments().labels();
  std::string csv = "treatment,score,residual\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    csv += csv_field(labels[i]) + ',' + format_number(report.scores[i]) + ',' +
           format_number((*report.residuals)[i]) + '\n';
  }
  emit(cfg, csv, out);
  return kExitOk;
}

int cmd_cumulative(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto report = compute_report(cfg, err, true);
  const auto order = best_first_order(report.scores);
  const auto& labels = report.scores.treatments().labels();
  std::string csv = "k,treatment,cpoth\n";
  for (std::size_t k = 2; k <= order.size(); ++k) {
    csv += std::to_string(k) + ',' + csv_field(labels[order[k - 1]]) + ',' +
           format_number((*report.cumulative)[k - 2]) + '\n';
  }
  emit(cfg, csv, out);
  return kExitOk;
}

int cmd_plot(const Config& cfg, std::ostream& out, std::ostream&) {
  const auto report = parse_report(read_file(cfg.input));
  emit(cfg, render_svg(report, parse_plot_kind(cfg.plot_kind)), out);
  return kExitOk;
}

int cmd_batch(const Config& cfg, std::ostream& out, std::ostream& err) {
  BatchOptions opt;
  opt.alpha = cfg.alpha;
  opt.analysis = analysis_options(cfg);
  if (!opt.analysis.subsets.empty()) throw ValidationError("'batch' does not take --subset");
  const auto result = run_batch(std::filesystem::path(cfg.dir), opt);
  for (const auto& s : result.skipped) err << "warning: skipped " << s.file << ": " << s.message << '\n';

  const std::string csv = write_summary_csv(result);
  Config sink = cfg;
  sink.output = cfg.out_csv;
  emit(sink, csv, out);
  if (cfg.summary_json) {
    sink.output = cfg.summary_json;
    emit(sink, write_summary_json(result), out);
  }
  return kExitOk;
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::validation:
    case ErrorCategory::unsupported:
      return kExitValidation;
    case ErrorCategory::io:
      return kExitIo;
    case ErrorCategory::numerical:
      return kExitNumerical;
  }
  return kExitValidation;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

void add_input_options(CLI::App& sub, Config& cfg) {
  sub.add_option("--input", cfg.input, "Input file (CSV or JSON)")->required();
  sub.add_option("--format", cfg.format, "Input format")
      ->check(CLI::IsMember({"reference", "pairwise", "draws", "rank-probs", "scores"}));
  sub.add_option("--direction", cfg.direction, "Which end of the outcome scale is better")
      ->check(CLI::IsMember({"larger", "smaller"}));
  sub.add_option("--n-draws", cfg.n_draws, "Draws when resampling reference effects")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub.add_option("--seed", cfg.seed, "Resampling seed")->capture_default_str();
  sub.add_option("--method", cfg.method, "How reference effects are scored")
      ->capture_default_str()
      ->check(CLI::IsMember({"pscore", "resample"}));
  sub.add_option("--covariance", cfg.covariance, "Labelled covariance CSV for reference effects");
  sub.add_option("--score-kind", cfg.score_kind, "Kind of a scores CSV")
      ->capture_default_str()
      ->check(CLI::IsMember({"sucra", "pscore"}));
  sub.add_option("--threads", cfg.threads, "Worker threads (0 = hardware)")->capture_default_str();
  sub.add_option("--output", cfg.output, "Output file (default stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Certainty of treatment hierarchies: SUCRA, P-scores and POTH", "poth"};
  app.require_subcommand(1);

  auto* compute = app.add_subcommand("compute", "Global POTH, scores, residuals and cumulative POTH");
  add_input_options(*compute, cfg);
  compute->add_option("--subset", cfg.subsets, "Comma-separated treatments; repeatable");

  auto* subset = app.add_subcommand("subset", "Report with subset POTH for each --subset");
  add_input_options(*subset, cfg);
  subset->add_option("--subset", cfg.subsets, "Comma-separated treatments; repeatable")->required();

  auto* residuals = app.add_subcommand("residuals", "Leave-one-out POTH residuals as CSV");
  add_input_options(*residuals, cfg);

  auto* cumulative = app.add_subcommand("cumulative", "Cumulative POTH over the best k as CSV");
  add_input_options(*cumulative, cfg);

  auto* plot = app.add_subcommand("plot", "SVG plot of a report series");
  plot->add_option("--input", cfg.input, "Report JSON written by 'compute'")->required();
  plot->add_option("--plot-kind", cfg.plot_kind, "Series to draw")
      ->capture_default_str()
      ->check(CLI::IsMember({"residuals", "cumulative", "scores"}));
  plot->add_option("--output", cfg.output, "Output file (default stdout)");

  auto* batch = app.add_subcommand("batch", "POTH across a directory of JSON network documents");
  batch->add_option("--dir", cfg.dir, "Directory of *.json network documents")->required();
  batch->add_option("--out", cfg.out_csv, "Summary CSV (default stdout)");
  batch->add_option("--summary", cfg.summary_json, "Summary statistics JSON");
  batch->add_option("--alpha", cfg.alpha, "Significance level")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  batch->add_option("--n-draws", cfg.n_draws, "Draws when resampling reference effects")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  batch->add_option("--seed", cfg.seed, "Base seed; each network adds a hash of its id")
      ->capture_default_str();
  batch->add_option("--method", cfg.method, "How reference effects are scored")
      ->capture_default_str()
      ->check(CLI::IsMember({"pscore", "resample"}));
  batch->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error:usage: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }

  const std::vector<std::pair<CLI::App*, std::function<int(const Config&, std::ostream&, std::ostream&)>>>
      commands = {{compute, cmd_compute},       {subset, cmd_subset}, {residuals, cmd_residuals},
                  {cumulative, cmd_cumulative}, {plot, cmd_plot},     {batch, cmd_batch}};
  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) {
        cfg.command = sub->get_name();
        return fn(cfg, out, err);
      }
    }
    throw ValidationError("no subcommand given");
  } catch (const Error& e) {
    err << "error:" << to_string(e.category()) << ": " << one_line(e.what()) << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error:internal: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }
}

}  // namespace poth::cli
