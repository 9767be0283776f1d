// Acceptance suite: one line per criterion, "AC<n> PASS|FAIL|SKIP <summary>".
// Exit status is nonzero if any criterion fails.
//
//   poth_acceptance [--worked-examples DIR]
//
// DIR may hold transplant.json, depression.json and ici.json: network input
// documents (pairwise or reference effects) with the published estimates.
// Criterion 8 is skipped when DIR is not given.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "poth/analysis.hpp"
#include "poth/batch.hpp"
#include "poth/io.hpp"
#include "poth/poth.hpp"
#include "poth/ranking.hpp"
#include "poth_cli/cli.hpp"

namespace fs = std::filesystem;
namespace t = poth::testing;
using namespace poth;

namespace {

enum class Outcome { pass, fail, skip };

struct Check {
  std::vector<std::string> failures;
  std::string note;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(17);
      s << what << ": got " << got << ", want " << want << " +- " << tol;
      expect(false, s.str());
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome(Check&)> body;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---- criteria --------------------------------------------------------------

Outcome ac1(Check& c) {
  std::mt19937_64 rng(1);
  for (std::size_t n = 2; n <= 25; ++n) {
    auto perm = t::iota(n);
    for (int rep = 0; rep < 5; ++rep) {
      std::shuffle(perm.begin(), perm.end(), rng);
      const RankProbabilityMatrix m(t::permutation_matrix(perm), t::labels(n));
      c.expect(poth_from_rank_probs(m) == 1.0, "permutation n=" + std::to_string(n) + " not exactly 1");
      // SUCRA values (n - k)/(n - 1) are inexact in binary, so the score route is held to 1e-12.
      c.near(poth_from_scores(sucra_from_rank_probs(m)), 1.0, 1e-12, "permutation via SUCRA n=" + std::to_string(n));
    }
    const RankProbabilityMatrix u(Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n)), t::labels(n));
    c.near(poth_from_rank_probs(u), 0.0, 1e-12, "uniform n=" + std::to_string(n));
    c.near(poth_from_scores(sucra_from_rank_probs(u)), 0.0, 1e-12, "uniform via SUCRA n=" + std::to_string(n));
  }
  return Outcome::pass;
}

Outcome ac2(Check& c) {
  auto run = [](std::vector<double> s) {
    return poth_from_scores(ScoreVector(std::move(s), ScoreKind::sucra, t::labels(4)));
  };
  const double a = run({0.411, 0.472, 0.530, 0.586});
  const double b = run({0.005, 0.334, 0.667, 0.994});
  c.near(a, 0.030602, 1e-5, "set 1");
  c.near(b, 0.980111, 1e-5, "set 2");
  std::ostringstream s;
  s.precision(7);
  s << "set1=" << a << " set2=" << b;
  c.note = s.str();
  return Outcome::pass;
}

Outcome ac3(Check& c) {
  std::mt19937_64 rng(3);
  double worst = 0.0, worst_rel = 0.0;
  constexpr int kCases = 1900;
  for (int rep = 0; rep < kCases; ++rep) {
    const std::size_t n = 2 + rep % 19;
    const RankProbabilityMatrix m(t::random_doubly_stochastic(n, rng), t::labels(n));
    const auto sucra = sucra_from_rank_probs(m);
    const double p5 = poth_from_scores(sucra);
    const double p4 = variance_from_expected_ranks(expected_rank(m), n) / max_variance(n);
    const double p9 = poth_from_rank_probs(m);
    worst = std::max({worst, std::abs(p5 - p4), std::abs(p5 - p9), std::abs(p4 - p9)});

    const double dn = static_cast<double>(n);
    const double total = dn * (dn + 1) * (dn - 1) / 12.0;
    const double parts = dn * avg_rank_variance(m) + dn * (dn - 1) * (dn - 1) * score_variance(sucra);
    worst_rel = std::max(worst_rel, std::abs(parts - total) / total);
  }
  c.expect(worst <= 1e-10, "route disagreement " + std::to_string(worst));
  c.expect(worst_rel <= 1e-8, "decomposition relative error " + std::to_string(worst_rel));
  std::ostringstream s;
  s << kCases << " matrices, max route gap " << worst << ", max decomposition rel err " << worst_rel;
  c.note = s.str();
  return Outcome::pass;
}

Outcome ac4(Check& c) {
  std::mt19937_64 rng(4);
  double worst_score = 0.0, worst_poth = 0.0;
  for (std::size_t n = 3; n <= 8; ++n) {
    const auto r = t::random_reference(n, rng);
    const auto draws = sample_mvn(r, 100000, 400 + n);
    const auto sucra = global_scores(draws);
    const auto p = pairwise_from_reference(r);
    const auto pscore = global_scores(p);
    for (std::size_t i = 0; i < n; ++i) worst_score = std::max(worst_score, std::abs(sucra[i] - pscore[i]));
    worst_poth = std::max(worst_poth, std::abs(global_poth(draws) - global_poth(p)));
  }
  c.expect(worst_score <= 0.01, "score gap " + std::to_string(worst_score));
  c.expect(worst_poth <= 0.02, "POTH gap " + std::to_string(worst_poth));
  std::ostringstream s;
  s << "max score gap " << worst_score << ", max POTH gap " << worst_poth;
  c.note = s.str();
  return Outcome::pass;
}

Outcome ac5(Check& c) {
  Eigen::MatrixXd m(3, 3);
  m << 0.5, 0.5, 0, 0.5, 0.5, 0, 0, 0, 1;
  const RankProbabilityMatrix rp(m, TreatmentSet({"A", "B", "C"}, Direction::larger_is_better));
  c.expect(poth_from_scores(sucra_from_rank_probs(rp)) == 0.75, "SUCRA route not exactly 0.75");
  c.expect(poth_from_rank_probs(rp) == 0.75, "variance route not exactly 0.75");
  const auto d = t::cluster_draws();
  c.expect(global_poth(d) == 0.75, "draws POTH not exactly 0.75");
  c.expect(poth_residuals(d) == std::vector<double>{-0.25, -0.25, 0.75}, "residuals differ");
  c.expect(cumulative_poth(d).values == std::vector<double>{0.0, 0.75}, "cumulative differs");
  return Outcome::pass;
}

Outcome ac6(Check& c) {
  for (std::size_t n = 3; n <= 12; ++n) {
    for (double r : poth_residuals(t::ordered_draws(n, 50))) {
      c.expect(r == 0.0, "max-certainty residual nonzero at n=" + std::to_string(n));
    }
  }
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 3 + rep % 10;
    const auto d = t::random_draws(n, 100 + rep % 400, rng);
    for (double r : poth_residuals(d)) c.expect(r >= -1.0 && r <= 1.0, "residual outside [-1,1]");
    c.expect(cumulative_poth(d).at(n) == global_poth(d), "draws cumulative[n] != POTH");
    if (rep % 5 == 0) {
      const auto p = pairwise_from_reference(t::random_reference(n, rng));
      c.expect(cumulative_poth(p).at(n) == global_poth(p), "pairwise cumulative[n] != POTH");
    }
  }
  return Outcome::pass;
}

Outcome ac7(Check& c) {
  const fs::path dir = fs::temp_directory_path() / "poth_acceptance_ac7";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto input = (dir / "reference.csv").string();
  std::ofstream(input) << "treatment,effect,se\nplacebo,,\nA,0.42,0.2\nB,0.35,0.22\nC,0.9,0.4\nD,-0.1,0.3\n"
                          "E,0.38,0.18\n";
  auto invoke = [&](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = cli::run(args, out, err);
    c.expect(rc == 0, "command failed: " + err.str());
  };
  const std::vector<std::string> kinds{"cumulative", "residuals", "scores"};
  std::vector<std::string> runs;
  for (const std::string threads : {"1", "1", "8", "3"}) {
    const auto tag = (dir / ("run" + std::to_string(runs.size()))).string();
    invoke({"compute", "--input", input, "--format", "reference", "--method", "resample", "--n-draws", "20000",
            "--seed", "2024", "--threads", threads, "--output", tag + ".json"});
    std::string bundle = slurp(tag + ".json");
    for (const auto& k : kinds) {
      invoke({"plot", "--input", tag + ".json", "--plot-kind", k, "--output", tag + "." + k + ".svg"});
      bundle += slurp(tag + "." + k + ".svg");
    }
    runs.push_back(bundle);
  }
  for (std::size_t i = 1; i < runs.size(); ++i) c.expect(runs[i] == runs[0], "run " + std::to_string(i) + " differs");
  c.expect(runs[0].find("<svg") != std::string::npos, "no SVG produced");
  fs::remove_all(dir);
  c.note = "report JSON + 3 SVGs identical over runs with 1, 1, 8, 3 threads";
  return Outcome::pass;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

std::optional<std::size_t> find_label(const TreatmentSet& set, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto l = lower(set.label(i));
    for (const auto& n : names) {
      if (l == n) return i;
    }
  }
  return std::nullopt;
}

Outcome ac8(Check& c, const std::optional<fs::path>& dir) {
  if (!dir) {
    c.note = "conditional: needs published effects/SEs, pass --worked-examples DIR";
    return Outcome::skip;
  }
  int seen = 0;
  auto load = [&](const char* name) -> std::optional<PairwiseEffects> {
    const fs::path p = *dir / name;
    if (!fs::exists(p)) return std::nullopt;
    ++seen;
    const auto doc = parse_input_json(slurp(p));
    const auto src = resolve_source(doc, {});
    if (const auto* pw = std::get_if<PairwiseEffects>(&src)) return *pw;
    c.expect(false, std::string(name) + ": need pairwise or reference effects");
    return std::nullopt;
  };

  if (auto p = load("transplant.json")) {
    c.near(global_poth(*p), 0.326, 0.01, "transplant POTH");
    const auto& set = p->treatments();
    if (auto control = find_label(set, {"control", "placebo"})) {
      c.near(subset_poth(*p, SubsetSpec::without(set, *control)), 0.354, 0.01, "transplant non-control subset");
    } else {
      c.expect(false, "transplant: no treatment labelled control");
    }
    if (auto keto = find_label(set, {"ketoconazole"})) {
      c.near(poth_residuals(*p)[*keto], 0.113, 0.01, "transplant Ketoconazole residual");
    } else {
      c.expect(false, "transplant: no treatment labelled Ketoconazole");
    }
  }
  if (auto p = load("depression.json")) c.near(global_poth(*p), 0.559, 0.01, "depression POTH");
  if (auto p = load("ici.json")) {
    c.near(global_poth(*p), 0.838, 0.01, "ICI POTH");
    std::vector<std::string> single;
    for (const auto& l : p->treatments().labels()) {
      const auto ll = lower(l);
      if (ll == "atezolizumab" || ll == "pembrolizumab" || ll == "ipilimumab" || ll == "nivolumab") single.push_back(l);
    }
    if (single.size() == 4) {
      c.near(subset_poth(*p, SubsetSpec::of(single)), 0.777, 0.01, "ICI single-agent subset");
    } else {
      c.expect(false, "ici: expected the four single-agent ICI labels");
    }
  }
  if (seen == 0) {
    c.note = "no worked-example documents found in " + dir->string();
    return Outcome::skip;
  }
  c.note = std::to_string(seen) + " worked example(s) checked";
  return Outcome::pass;
}

Outcome ac9(Check& c) {
  // Batch harness over a generated corpus: every network's reported POTH must
  // satisfy the three-route identity.
  std::mt19937_64 rng(9);
  std::vector<BatchFile> files;
  std::vector<RankProbabilityMatrix> mats;
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i) % 19;
    RankProbabilityMatrix m(t::random_doubly_stochastic(n, rng), t::labels(n));
    InputMetadata meta;
    meta.network_id = "net" + std::to_string(100 + i);
    meta.effect_measure = i % 2 ? "OR" : "MD";
    meta.tau_estimate = 0.01 * i;
    files.push_back({meta.network_id.value() + ".json", write_input_json({InputFormat::rank_probs, m, meta, {}})});
    mats.push_back(std::move(m));
  }
  const auto result = run_batch(files, {});
  c.expect(result.rows.size() == mats.size(), "row count");
  for (std::size_t i = 0; i < mats.size() && i < result.rows.size(); ++i) {
    const auto& m = mats[i];
    const std::size_t n = m.size();
    const double reported = result.rows[i].poth;
    c.near(reported, poth_from_scores(sucra_from_rank_probs(m)), 1e-10, "batch vs SUCRA route");
    c.near(reported, variance_from_expected_ranks(expected_rank(m), n) / max_variance(n), 1e-10,
           "batch vs expected-rank route");
    c.near(reported, static_cast<double>(t::poth_of_scores(t::sucra(t::to_matrix(m.probs())))), 1e-10,
           "batch vs oracle");
  }

  auto v = [](std::initializer_list<double> x) { return std::vector<double>(x); };
  c.near(spearman(v({1, 2, 3}), v({3, 2, 1})), -1.0, 1e-10, "spearman reversed");
  c.near(spearman(v({1, 2, 3}), v({1, 2, 3})), 1.0, 1e-10, "spearman identical");
  c.near(spearman(v({1, 2, 3, 4}), v({1, 3, 2, 4})), 0.8, 1e-10, "spearman one swap");
  c.near(pearson(v({0, 1, 2, 3}), v({1, 3, 5, 7})), 1.0, 1e-10, "pearson linear");
  c.near(pearson(v({0, 1, 2, 3}), v({0, -1, -2, -3})), -1.0, 1e-10, "pearson negated");
  c.near(pearson(v({0, 1, 2}), v({0, 1, 0})), 0.0, 1e-10, "pearson symmetric");

  auto pw = [](std::vector<double> z) {
    const auto n = static_cast<Eigen::Index>(z.size() == 1 ? 2 : 3);
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j, ++k) {
        theta(i, j) = z[k];
        theta(j, i) = -z[k];
      }
    }
    return PairwiseEffects(theta, Eigen::MatrixXd::Ones(n, n), t::labels(static_cast<std::size_t>(n)));
  };
  c.near(prop_significant(pw({0, 0, 0})), 0.0, 1e-10, "prop_significant null");
  c.near(prop_significant(pw({2})), 1.0, 1e-10, "prop_significant z=2");
  c.near(prop_significant(pw({2.5, 0.1, 0.2})), 1.0 / 3.0, 1e-10, "prop_significant mixed");
  c.note = "60-network corpus + correlation/significance examples";
  return Outcome::pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::optional<fs::path> examples;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--worked-examples" && i + 1 < argc) {
      examples = argv[++i];
    } else {
      std::cerr << "usage: poth_acceptance [--worked-examples DIR]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "extremal POTH (permutation = 1, uniform = 0), n = 2..25", 1.0, ac1},
      {2, "score-set POTH values", 1.0, ac2},
      {3, "three-route identity and sum-of-squares decomposition", 30.0, ac3},
      {4, "sampled SUCRA vs analytic P-score", 60.0, ac4},
      {5, "two-cluster configuration", 1.0, ac5},
      {6, "residual and cumulative contracts", 30.0, ac6},
      {7, "byte-identical report and SVG across runs and thread counts", 10.0, ac7},
      {8, "worked examples from published estimates", 60.0, [&](Check& c) { return ac8(c, examples); }},
      {9, "batch harness identities and association statistics", 5.0, ac9},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    Outcome outcome = Outcome::fail;
    const auto start = std::chrono::steady_clock::now();
    try {
      outcome = cr.body(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (outcome != Outcome::skip && secs > cr.budget_s) {
      c.failures.push_back("runtime " + std::to_string(secs) + " s over budget " + std::to_string(cr.budget_s) + " s");
    }
    if (!c.failures.empty()) outcome = Outcome::fail;

    const char* tag = outcome == Outcome::pass ? "PASS" : outcome == Outcome::skip ? "SKIP" : "FAIL";
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.3f s", secs);
    std::cout << "AC" << cr.id << ' ' << tag << "  " << cr.title << " [" << timing << "]";
    if (!c.note.empty()) std::cout << " - " << c.note;
    std::cout << '\n';
    for (const auto& f : c.failures) std::cout << "    " << f << '\n';
    if (outcome == Outcome::fail) ++failed;
  }
  std::cout << (failed ? "FAILED " : "OK ") << failed << " failing criteria\n";
  return failed ? 1 : 0;
}
