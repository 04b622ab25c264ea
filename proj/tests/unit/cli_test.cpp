/*
 * Copyright 2026 The treeshap-hd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "json.hpp"
#include "model_builders.hpp"
#include "treeshap_hd/synth.hpp"
#include "treeshap_hd/tree_model.hpp"

namespace treeshap_hd {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(TREESHAP_HD_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  RunResult r;
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe)) r.output += buf;
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

void write_dataset(const fs::path& p, const Dataset& d) {
  std::ofstream out(p);
  for (std::size_t c = 0; c < d.cols(); ++c) out << (c ? "," : "") << "x" << c;
  out << '\n';
  out.precision(17);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) out << (c ? "," : "") << d.at(r, c);
    out << '\n';
  }
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("treeshap_hd_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    save_canonical(testing::stump(1.0, 0.0, 2), (dir_ / "stump.json").string());
    write_file(dir_ / "x.csv", "x0,x1\n0.2,0.0\n");
    write_file(dir_ / "bg.csv", "x0,x1\n0.9,0.0\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, ExplainStump) {
  const RunResult r = run_cli("explain --model " + path("stump.json") + " --data " + path("x.csv") +
                              " --background " + path("bg.csv") + " --output " + path("out.csv"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(read_file(dir_ / "out.csv"), "row_id,base_value,x0,x1\n0,0,1,0\n");
}

TEST_F(CliTest, ExplainInteractionColumns) {
  const RunResult r = run_cli("explain --model " + path("stump.json") + " --data " + path("x.csv") +
                              " --background " + path("bg.csv") + " --values interaction");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(r.output, "row_id,base_value,phi_0_0,phi_0_1,phi_1_0,phi_1_1\n0,0,1,0,0,0\n");
}

TEST_F(CliTest, ExplainPathDependentNeedsNoBackground) {
  const RunResult r = run_cli("explain --model " + path("stump.json") + " --data " +
                              path("x.csv") + " --mode path-dependent");
  ASSERT_EQ(r.status, 0) << r.output;
  const Dataset out = parse_csv(r.output);
  EXPECT_NEAR(out.at(0, 1), 0.6, 1e-15);
  EXPECT_NEAR(out.at(0, 2), 0.4, 1e-15);
  EXPECT_EQ(out.at(0, 3), 0.0);
}

TEST_F(CliTest, InputErrorsExitTwo) {
  write_file(dir_ / "nan.csv", "x0,x1\n0.2,0.0\n0.3,nan\n");
  RunResult r = run_cli("explain --model " + path("stump.json") + " --data " + path("nan.csv") +
                        " --background " + path("bg.csv"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("row 1"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("column x1"), std::string::npos) << r.output;

  r = run_cli("explain --model " + path("stump.json") + " --data " + path("x.csv"));
  EXPECT_EQ(r.status, 2) << r.output;
  EXPECT_NE(r.output.find("--background"), std::string::npos);

  r = run_cli("explain --model " + path("missing.json") + " --data " + path("x.csv") +
              " --background " + path("bg.csv"));
  EXPECT_EQ(r.status, 2) << r.output;

  r = run_cli("explain --model " + path("stump.json") + " --data " + path("x.csv") +
              " --background " + path("bg.csv") + " --values nonsense");
  EXPECT_EQ(r.status, 2) << r.output;
}

TEST_F(CliTest, HeaderMustMatchFeatureNames) {
  const EnsembleModel named({testing::stump(1.0, 0.0, 2).trees()[0]}, 2, 0.0, {"age", "sugar"});
  save_canonical(named, path("named.json"));
  RunResult r = run_cli("explain --model " + path("named.json") + " --data " + path("x.csv") +
                        " --background " + path("bg.csv"));
  EXPECT_EQ(r.status, 2) << r.output;
  write_file(dir_ / "named.csv", "age,sugar\n0.2,0.0\n");
  r = run_cli("explain --model " + path("named.json") + " --data " + path("named.csv") +
              " --background " + path("named.csv"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(r.output.substr(0, r.output.find('\n')), "row_id,base_value,age,sugar");
}

TEST_F(CliTest, BudgetErrorsExitThree) {
  const RunResult r = run_cli("explain --model " + path("stump.json") + " --data " +
                              path("x.csv") + " --background " + path("bg.csv") +
                              " --memory-budget 16");
  EXPECT_EQ(r.status, 3) << r.output;
  save_canonical(complete_tree_model(6, 1), path("deep.json"));
  std::mt19937_64 rng(1);
  write_dataset(dir_ / "deep.csv", random_dataset(rng, 2, 10));
  const RunResult capped = run_cli("explain --model " + path("deep.json") + " --data " +
                                   path("deep.csv") + " --background " + path("deep.csv") +
                                   " --depth-cap 4");
  EXPECT_EQ(capped.status, 3) << capped.output;
}

// Local accuracy survives the text round trip, and reruns are bit-identical.
TEST_F(CliTest, OutputRoundTrip) {
  std::mt19937_64 rng(4);
  const EnsembleModel m = random_model(rng, 4, RandomTreeSpec{7, 6, 0.2, true, true}, 0.3);
  save_canonical(m, path("m.json"));
  const Dataset x = random_dataset(rng, 25, 6);
  const Dataset bg = random_dataset(rng, 10, 6);
  write_dataset(dir_ / "rx.csv", x);
  write_dataset(dir_ / "rbg.csv", bg);
  const std::string args = "explain --threads 1 --model " + path("m.json") + " --data " +
                           path("rx.csv") + " --background " + path("rbg.csv") + " --output ";
  ASSERT_EQ(run_cli(args + path("a.csv")).status, 0);
  ASSERT_EQ(run_cli(args + path("b.csv")).status, 0);
  EXPECT_EQ(read_file(dir_ / "a.csv"), read_file(dir_ / "b.csv"));

  const Dataset out = read_csv(path("a.csv"));
  const Dataset x_back = read_csv(path("rx.csv"));
  const auto pred = predict(m, x_back);
  ASSERT_EQ(out.rows(), x.rows());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 1; c < out.cols(); ++c) sum += out.at(r, c);
    EXPECT_NEAR(sum, pred[r], 1e-6);
  }
}

TEST_F(CliTest, LightGbmModel) {
  const std::string data = TREESHAP_HD_TEST_DATA_DIR;
  write_file(dir_ / "lx.csv", "Column_0,Column_1\n0,1\n1,0\n");
  const RunResult r = run_cli("explain --model-format lightgbm --model " + data +
                              "/lgbm_stump.txt --mode path-dependent --data " + path("lx.csv"));
  ASSERT_EQ(r.status, 0) << r.output;
  const RunResult alias = run_cli("explain --model-format lightgbm_text --seed 9 --model " + data +
                                  "/lgbm_stump.txt --mode path-dependent --data " + path("lx.csv"));
  ASSERT_EQ(alias.status, 0) << alias.output;
  EXPECT_EQ(alias.output, r.output);
}

TEST_F(CliTest, ValidatePasses) {
  const RunResult r = run_cli("validate --max-depth 5 --trials 4 --seed 11");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("PASS"), std::string::npos) << r.output;
}

TEST_F(CliTest, ValidateDetectsCorruptCache) {
  const RunResult r = run_cli("validate --max-depth 4 --trials 3 --seed 7 --corrupt-cache");
  EXPECT_EQ(r.status, 1) << r.output;
  EXPECT_NE(r.output.find("FAIL seed=7"), std::string::npos) << r.output;
}

TEST_F(CliTest, ValidateWithoutTrialsExitsTwo) {
  EXPECT_EQ(run_cli("validate --trials 0").status, 2);
}

TEST_F(CliTest, BenchWritesReport) {
  const RunResult r = run_cli("bench --depths 4,13 --method both --leaves 1 --trials 1 "
                              "--min-seconds 0 --output " + path("bench.json"));
  ASSERT_EQ(r.status, 0) << r.output;
  const auto doc = nlohmann::json::parse(read_file(dir_ / "bench.json"));
  ASSERT_EQ(doc["records"].size(), 4u);
  bool saw_skip = false;
  for (const auto& rec : doc["records"]) {
    if (rec["depth"] == 13 && rec["method"] == "dense_baseline") {
      EXPECT_EQ(rec["status"], "skipped");
      EXPECT_EQ(rec["reason"], "budget");
      saw_skip = true;
    }
  }
  EXPECT_TRUE(saw_skip);
}

}  // namespace
}  // namespace treeshap_hd
