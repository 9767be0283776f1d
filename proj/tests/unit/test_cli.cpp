#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "poth/io.hpp"
#include "poth_cli/cli.hpp"

namespace poth::cli {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("poth_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& body) {
    const auto p = (dir_ / name).string();
    std::ofstream(p, std::ios::binary) << body;
    return p;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int invoke(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int rc = run(args, o, e);
    out = o.str();
    err = e.str();
    return rc;
  }

  fs::path dir_;
  std::string out, err;
};

const char* kPairwise3 = "treatment_i,treatment_j,theta,se\nt2,t1,1,1\nt3,t1,2,1\nt3,t2,1,1\n";
const char* kClusterDraws = "A,B,C\n2,1,0\n1,2,0\n";
const char* kSet2 = "treatment,score\nA,0.005\nB,0.334\nC,0.667\nD,0.994\n";
const char* kIdentity = "treatment,rank1,rank2,rank3\nA,1,0,0\nB,0,1,0\nC,0,0,1\n";

TEST_F(Cli, ComputeIdentityRankProbs) {
  ASSERT_EQ(invoke({"compute", "--input", file("p.csv", kIdentity), "--format", "rank-probs"}), 0) << err;
  const auto r = parse_report(out);
  EXPECT_EQ(r.poth, 1.0);
  EXPECT_EQ(r.residuals, std::nullopt);
  EXPECT_EQ(r.metadata.method, Method::rank_matrix);
}

TEST_F(Cli, ComputeScoresShortcut) {
  ASSERT_EQ(invoke({"compute", "--input", file("s.csv", kSet2), "--format", "scores"}), 0) << err;
  EXPECT_NEAR(parse_report(out).poth, 0.980111, 1e-6);
}

TEST_F(Cli, ComputePairwise) {
  ASSERT_EQ(invoke({"compute", "--input", file("p.csv", kPairwise3), "--format", "pairwise"}), 0) << err;
  const auto r = parse_report(out);
  EXPECT_NEAR(r.poth, 0.67010, 1e-4);
  ASSERT_TRUE(r.residuals && r.cumulative);
  EXPECT_EQ(r.cumulative->back(), r.poth);
}

TEST_F(Cli, SubsetOnDraws) {
  ASSERT_EQ(invoke({"subset", "--input", file("d.csv", kClusterDraws), "--format", "draws", "--subset", "A,C",
                    "--subset", "A,B,C"}),
            0)
      << err;
  const auto r = parse_report(out);
  ASSERT_EQ(r.subsets.size(), 2u);
  EXPECT_EQ(r.subsets[0].poth, 1.0);
  EXPECT_EQ(r.subsets[1].poth, r.poth);
}

TEST_F(Cli, SubsetOnRankProbsRefused) {
  EXPECT_EQ(invoke({"subset", "--input", file("p.csv", kIdentity), "--format", "rank-probs", "--subset", "A,C"}),
            kExitValidation);
  EXPECT_EQ(err.rfind("error:unsupported: ", 0), 0u) << err;
  EXPECT_NE(err.find("joint"), std::string::npos);
}

TEST_F(Cli, ResidualsAndCumulativeCsv) {
  const auto in = file("d.csv", kClusterDraws);
  ASSERT_EQ(invoke({"residuals", "--input", in, "--format", "draws"}), 0) << err;
  EXPECT_EQ(out, "treatment,score,residual\nA,0.75,-0.25\nB,0.75,-0.25\nC,0,0.75\n");
  ASSERT_EQ(invoke({"cumulative", "--input", in, "--format", "draws"}), 0) << err;
  EXPECT_EQ(out, "k,treatment,cpoth\n2,B,0\n3,C,0.75\n");
  EXPECT_EQ(invoke({"residuals", "--input", file("s.csv", kSet2), "--format", "scores"}), kExitValidation);
  EXPECT_EQ(err.rfind("error:unsupported:", 0), 0u) << err;
}

TEST_F(Cli, PlotSeries) {
  const auto report = path("r.json");
  ASSERT_EQ(invoke({"compute", "--input", file("p.csv", kPairwise3), "--format", "pairwise", "--output", report}), 0);
  ASSERT_EQ(invoke({"plot", "--input", report, "--plot-kind", "cumulative"}), 0) << err;
  const std::regex circle("<circle ");
  EXPECT_EQ(std::distance(std::sregex_iterator(out.begin(), out.end(), circle), std::sregex_iterator()), 2);
  EXPECT_NE(out.find("width=\"800\" height=\"500\""), std::string::npos);
  const std::string first = out;
  ASSERT_EQ(invoke({"plot", "--input", report, "--plot-kind", "cumulative"}), 0);
  EXPECT_EQ(out, first);

  ASSERT_EQ(invoke({"plot", "--input", report, "--plot-kind", "residuals"}), 0);
  EXPECT_NE(out.find("class=\"zero\""), std::string::npos);
  ASSERT_EQ(invoke({"plot", "--input", report, "--plot-kind", "scores"}), 0);
  EXPECT_NE(out.find("</svg>"), std::string::npos);
}

TEST_F(Cli, PlotZeroResidualsKeepsAxis) {
  const auto report = path("r.json");
  ASSERT_EQ(invoke({"compute", "--input", file("d.csv", "A,B,C\n3,2,1\n"), "--format", "draws", "--output", report}), 0);
  ASSERT_EQ(invoke({"plot", "--input", report, "--plot-kind", "residuals"}), 0) << err;
  EXPECT_NE(out.find("class=\"y-axis\""), std::string::npos);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n') > 10, true);
  EXPECT_NE(out.find("height=\"0.00\""), std::string::npos);
}

TEST_F(Cli, PlotMissingSeries) {
  const auto report = path("r.json");
  ASSERT_EQ(invoke({"compute", "--input", file("s.csv", kSet2), "--format", "scores", "--output", report}), 0);
  EXPECT_EQ(invoke({"plot", "--input", report, "--plot-kind", "cumulative"}), kExitValidation);
  EXPECT_EQ(err.rfind("error:validation:", 0), 0u) << err;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"compute", "--input", path("missing.csv"), "--format", "draws"}), kExitIo);
  EXPECT_EQ(err.rfind("error:io: ", 0), 0u) << err;

  EXPECT_EQ(invoke({"compute", "--input", file("bad.csv", "A,B\n1,x\n"), "--format", "draws"}), kExitValidation);
  EXPECT_EQ(err.rfind("error:validation: ", 0), 0u) << err;

  const auto degenerate = file("cov.csv", ",A,B\nA,1,1\nB,1,1\n");
  EXPECT_EQ(invoke({"compute", "--input", file("r.csv", "treatment,effect,se\nP,,\nA,1,1\nB,2,1\n"), "--format",
                    "reference", "--covariance", degenerate}),
            kExitNumerical);
  EXPECT_EQ(err.rfind("error:numerical: ", 0), 0u) << err;

  EXPECT_EQ(invoke({"compute", "--input", file("s.csv", kSet2), "--format", "scores", "--bogus"}), kExitValidation);
  EXPECT_EQ(err.rfind("error:usage: ", 0), 0u) << err;
  EXPECT_EQ(invoke({"compute", "--input", file("s.csv", kSet2), "--format", "csv"}), kExitValidation);
  EXPECT_EQ(invoke({}), kExitValidation);
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
}

TEST_F(Cli, HelpExitsZero) {
  EXPECT_EQ(invoke({"--help"}), 0);
  EXPECT_NE(out.find("compute"), std::string::npos);
}

TEST_F(Cli, ResampledReferenceIsDeterministicAcrossThreads) {
  const auto in = file("r.csv", "treatment,effect,se\nP,,\nA,0.5,0.2\nB,0.8,0.25\nC,0.1,0.3\n");
  ASSERT_EQ(invoke({"compute", "--input", in, "--format", "reference", "--method", "resample", "--n-draws", "20000",
                    "--seed", "7", "--threads", "1"}),
            0);
  const std::string one = out;
  ASSERT_EQ(invoke({"compute", "--input", in, "--format", "reference", "--method", "resample", "--n-draws", "20000",
                    "--seed", "7", "--threads", "8"}),
            0);
  EXPECT_EQ(out, one);
  const auto r = parse_report(one);
  EXPECT_EQ(r.metadata.n_draws, std::optional<std::size_t>(20000));
  EXPECT_EQ(r.metadata.seed, std::optional<std::uint64_t>(7));
}

TEST_F(Cli, DirectionConflictRejected) {
  const auto doc = file("d.json", R"({"format":"draws","treatments":["A","B"],"direction":"smaller","draws":[[1,2]]})");
  EXPECT_EQ(invoke({"compute", "--input", doc, "--direction", "larger"}), kExitValidation);
  EXPECT_EQ(invoke({"compute", "--input", doc, "--direction", "smaller"}), 0) << err;
}

TEST_F(Cli, Batch) {
  fs::create_directories(dir_ / "corpus");
  file("corpus/s1.json",
       R"({"format":"scores","treatments":["A","B","C","D"],"scores":{"values":[0.411,0.472,0.530,0.586]}})");
  file("corpus/s2.json",
       R"({"format":"scores","treatments":["A","B","C","D"],"scores":{"values":[0.005,0.334,0.667,0.994]}})");
  file("corpus/broken.json", "{");
  ASSERT_EQ(invoke({"batch", "--dir", (dir_ / "corpus").string(), "--summary", path("summary.json")}), 0) << err;
  EXPECT_EQ(out.substr(0, out.find('\n')), "network_id,n_treatments,poth,effect_measure,tau,prop_significant");
  EXPECT_NE(out.find("\ns1,4,"), std::string::npos) << out;
  EXPECT_NE(err.find("skipped broken.json"), std::string::npos) << err;
  std::ifstream s(path("summary.json"));
  std::stringstream buf;
  buf << s.rdbuf();
  EXPECT_NE(buf.str().find("\"median_poth\": 0.50535"), std::string::npos) << buf.str();
}

}  // namespace
}  // namespace poth::cli
