#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "vdec/cli.hpp"

namespace vdec {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vdec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  RunResult r;
  r.code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vdec_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = (dir_ / name).string();
    std::ofstream(path, std::ios::binary) << text;
    return path;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string exam_csv() {
    const auto p = path("exam.csv");
    EXPECT_EQ(run_cli({"generate", "--questions", "30", "--population", "400", "--seed", "5", "-o", p}).code, 0);
    return p;
  }

  std::string seven_character_csv() {
    std::mt19937_64 rng(9);
    std::ostringstream os;
    const std::vector<std::string> names{"UN", "PE", "HS", "GD", "MA", "WO", "GN"};
    os << "delay";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (int i = 0; i < 300; ++i) {
      double delay = 0.0;
      std::ostringstream row;
      for (std::size_t c = 0; c < names.size(); ++c) {
        const auto code = rng() % (2 + c % 3);
        delay += static_cast<double>(code) * (1.0 + static_cast<double>(c));
        row << ',' << names[c] << code;
      }
      delay += static_cast<double>(rng() % 100) / 25.0;
      os << delay << row.str() << '\n';
    }
    return write("delay.csv", os.str());
  }

  fs::path dir_;
};

TEST_F(CliTest, RankTableHasRequestedStepsAndFractions) {
  const auto csv = exam_csv();
  const auto r = run_cli({"rank", "--input", csv, "--target", "score", "--max-steps", "10", "--format", "table"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("c_k"), std::string::npos);
  std::istringstream lines(r.out);
  std::string line;
  int steps = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) ++steps;
  }
  EXPECT_EQ(steps, 10);
}

TEST_F(CliTest, SimulateJsonCarriesCounts) {
  const auto r = run_cli({"simulate", "--trials", "20", "--seed", "7", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["kind"], "simulation");
  EXPECT_TRUE(j["payload"].contains("exact_matches"));
  EXPECT_EQ(j["payload"]["per_trial_orders"].size(), 20u);
  EXPECT_EQ(j["metadata"]["config"]["seed"], 7);
  EXPECT_FALSE(j["metadata"]["generator"].get<std::string>().empty());
}

TEST_F(CliTest, DecomposeFollowsGivenOrder) {
  const auto csv = seven_character_csv();
  const auto r = run_cli({"decompose", "-i", csv, "-t", "delay", "--order", "GD,UN,MA,HS,PE,WO,GN",
                          "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = parse_report(r.out);
  const auto& res = std::get<DecompositionResult>(doc.payload);
  ASSERT_EQ(res.steps.size(), 7u);
  const std::vector<std::string> expected{"GD", "UN", "MA", "HS", "PE", "WO", "GN"};
  for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(res.steps[k].character_name, expected[k]);
  EXPECT_NEAR(res.total_variance, res.explained() + res.final_residual, 1e-9 * res.total_variance);
}

TEST_F(CliTest, ByteDeterministicOutput) {
  const auto csv = exam_csv();
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"baseline", "-i", csv, "-t", "score", "--k", "5", "--trials", "40", "--format", "json"},
           {"rank", "-i", csv, "-t", "score", "--format", "json"},
           {"simulate", "--trials", "5", "--format", "csv"}}) {
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST_F(CliTest, TableAndJsonCarrySameNumbers) {
  const auto csv = exam_csv();
  const auto js = run_cli({"rank", "-i", csv, "-t", "score", "--max-steps", "5", "--format", "json"});
  const auto tb = run_cli({"rank", "-i", csv, "-t", "score", "--max-steps", "5", "--format", "table"});
  ASSERT_EQ(js.code, 0);
  ASSERT_EQ(tb.code, 0);
  const auto ranking = std::get<SooRanking>(parse_report(js.out).payload);
  for (const auto& s : ranking.result.steps) {
    std::ostringstream v;
    v << std::fixed << std::setprecision(6) << s.component;
    EXPECT_NE(tb.out.find(s.character_name), std::string::npos);
    EXPECT_NE(tb.out.find(v.str()), std::string::npos) << v.str();
  }
}

TEST_F(CliTest, OutputFileAndCsvFormat) {
  const auto csv = write("d1.csv", "y,A,B\n1,a,u\n2,a,v\n3,b,u\n4,b,v\n");
  const auto out = path("out.csv");
  const auto r = run_cli({"decompose", "-i", csv, "-t", "y", "--order", "A,B", "--format", "csv", "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(),
            "step,character,component,residual_after,residual_fraction,classes_after\n"
            "1,A,1,0.25,0.2,2\n"
            "2,B,0.25,0,0,4\n");
}

TEST_F(CliTest, RobustnessAndHistogram) {
  const auto csv = write("d1.csv", "y,A,B\n1,a,u\n2,a,v\n3,b,u\n4,b,v\n");
  const auto rob = run_cli({"robustness", "-i", csv, "-t", "y", "--format", "json"});
  ASSERT_EQ(rob.code, 0) << rob.err;
  EXPECT_TRUE(std::get<RobustnessReport>(parse_report(rob.out).payload).stable);

  const auto hist = run_cli({"histogram", "-i", csv, "--column", "y", "--bin-width", "2", "--format", "json"});
  ASSERT_EQ(hist.code, 0) << hist.err;
  const auto h = std::get<Histogram>(parse_report(hist.out).payload);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 2, 1}));
}

TEST_F(CliTest, FiltersAndDelimiters) {
  const auto csv = write("semi.csv", "y;A\n1;a\n5;b\n12;a\n");
  const auto r = run_cli({"decompose", "-i", csv, "-t", "y", "--delimiter", "semicolon", "--max-target", "10",
                          "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = std::get<DecompositionResult>(parse_report(r.out).payload);
  EXPECT_DOUBLE_EQ(res.total_variance, 4.0);  // targets 1 and 5
}

TEST_F(CliTest, MissingPolicyFlag) {
  const auto csv = write("m.csv", "y,A\n1,a\n2,\n3,b\n");
  EXPECT_EQ(run_cli({"rank", "-i", csv, "-t", "y"}).code, cli::kData);
  const auto r = run_cli({"rank", "-i", csv, "-t", "y", "--missing", "as_category", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::get<SooRanking>(parse_report(r.out).payload).result.steps[0].classes_after, 3u);
}

TEST_F(CliTest, ExitCodes) {
  const auto csv = write("d1.csv", "y,A,B\n1,a,u\n2,a,v\n3,b,u\n4,b,v\n");
  const auto flat = write("flat.csv", "y,A\n2,a\n2,b\n");

  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"rank", "--bogus"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"rank", "-i", csv}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"rank", "-i", csv, "-t", "y", "--format", "xml"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"rank", "-i", csv, "-t", "y", "--delimiter", "pipe"}).code, cli::kUsage);

  const auto unknown = run_cli({"decompose", "-i", csv, "-t", "y", "--order", "A,Z"});
  EXPECT_EQ(unknown.code, cli::kUsage);
  EXPECT_NE(unknown.err.find("'Z'"), std::string::npos);
  EXPECT_EQ(run_cli({"baseline", "-i", csv, "-t", "y", "--k", "3"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"simulate", "--p", "1.5"}).code, cli::kUsage);

  EXPECT_EQ(run_cli({"rank", "-i", path("absent.csv"), "-t", "y"}).code, cli::kData);
  const auto bad_target = run_cli({"rank", "-i", csv, "-t", "A"});
  EXPECT_EQ(bad_target.code, cli::kData);
  EXPECT_NE(bad_target.err.find("line 2"), std::string::npos);
  EXPECT_EQ(run_cli({"rank", "-i", csv, "-t", "y", "--max-target", "0"}).code, cli::kData);
  EXPECT_EQ(run_cli({"rank", "-i", csv, "-t", "y", "-o", "/nonexistent-dir/x"}).code, cli::kData);

  EXPECT_EQ(run_cli({"rank", "-i", flat, "-t", "y"}).code, cli::kDegenerate);
  EXPECT_EQ(run_cli({"decompose", "-i", flat, "-t", "y"}).code, cli::kDegenerate);
  EXPECT_EQ(run_cli({"robustness", "-i", csv, "-t", "y", "-c", "A"}).code, cli::kUsage);
}

TEST_F(CliTest, GenerateWritesLoadableExam) {
  const auto p = exam_csv();
  LoadOptions opt;
  opt.target = "score";
  const Dataset d = load_csv(p, opt);
  EXPECT_EQ(d.size(), 400u);
  EXPECT_EQ(d.num_characters(), 30u);
  EXPECT_EQ(d, generate_exam_like(30, 400, 2.0, 5));
}

}  // namespace
}  // namespace vdec
