// Copyright 2026 The QMTL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("qmtl_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& log = "out.txt") {
  const std::string cmd = std::string(QMTL_CLI) + " " + args + " > " + (scratch() / log).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// History lines without their wall-clock field.
std::string history_without_time(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, out;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    j.erase("wall_time");
    out += j.dump() + "\n";
  }
  return out;
}

TEST(Cli, ParamsPrintsBudgets) {
  EXPECT_EQ(run("params --preset glue-like"), 0);
  const auto out = slurp(scratch() / "out.txt");
  EXPECT_NE(out.find("341"), std::string::npos);
  EXPECT_NE(out.find("60"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("gradcheck --seeds 3 --depth 10"), 0);
  EXPECT_EQ(run("gradcheck --seeds 3 --depth 10 --corrupt-shift"), 2);
  EXPECT_EQ(run("train --preset no-such-preset"), 1);
  EXPECT_EQ(run("eval --checkpoint " + (scratch() / "missing.json").string()), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  std::ofstream(scratch() / "bad.json") << "{\n  \"encoder\": {\"Q\": 2},\n  \"colour\": 1\n}\n";
  EXPECT_EQ(run("train --config " + (scratch() / "bad.json").string(), "bad.txt"), 1);
  EXPECT_NE(slurp(scratch() / "bad.txt").find("colour"), std::string::npos);
}

TEST(Cli, TrainAndEvalAreDeterministic) {
  const auto a = scratch() / "run_a", b = scratch() / "run_b";
  ASSERT_EQ(run("train --preset toy --epochs 2 --seed 5 --out-dir " + a.string()), 0);
  ASSERT_EQ(run("train --preset toy --epochs 2 --seed 5 --out-dir " + b.string()), 0);
  EXPECT_EQ(slurp(a / "checkpoint.json"), slurp(b / "checkpoint.json"));
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(history_without_time(a / "history.jsonl"), history_without_time(b / "history.jsonl"));

  const auto ck = (a / "checkpoint.json").string();
  ASSERT_EQ(run("eval --checkpoint " + ck + " --shots 64 --out-dir " + a.string()), 0);
  ASSERT_EQ(run("eval --checkpoint " + ck + " --shots 64 --out-dir " + b.string()), 0);
  EXPECT_EQ(slurp(a / "eval_report.json"), slurp(b / "eval_report.json"));

  ASSERT_EQ(run("train --preset toy --epochs 2 --seed 6 --out-dir " + (scratch() / "run_c").string()), 0);
  EXPECT_NE(slurp(a / "checkpoint.json"), slurp(scratch() / "run_c" / "checkpoint.json"));
}

TEST(Cli, EvalOfStoredCheckpointReproducesReportMetrics) {
  const auto a = scratch() / "run_re";
  ASSERT_EQ(run("train --preset toy --epochs 2 --out-dir " + a.string()), 0);
  ASSERT_EQ(run("eval --checkpoint " + (a / "checkpoint.json").string() + " --out-dir " + a.string()), 0);
  const auto report = nlohmann::json::parse(slurp(a / "report.json"));
  const auto again = nlohmann::json::parse(slurp(a / "eval_report.json"));
  EXPECT_EQ(report["metrics"], again["metrics"]);
}

TEST(Cli, EvalRejectsCheckpointFromOtherConfig) {
  const auto a = scratch() / "run_fp";
  ASSERT_EQ(run("train --preset toy --epochs 1 --out-dir " + a.string()), 0);
  auto j = nlohmann::json::parse(slurp(a / "checkpoint.json"));
  j["config"]["heads"][0]["layers"] = 2;
  std::ofstream(a / "edited.json") << j.dump();
  EXPECT_EQ(run("eval --checkpoint " + (a / "edited.json").string()), 1);
}

TEST(Cli, SweepIsDeterministic) {
  const auto a = scratch() / "sw_a", b = scratch() / "sw_b";
  const std::string args = "sweep --preset toy --kind entanglement --epochs 1 --seeds 0 --out-dir ";
  ASSERT_EQ(run(args + a.string()), 0);
  ASSERT_EQ(run(args + b.string()), 0);
  const auto csv = slurp(a / "sweep_entanglement.csv");
  EXPECT_EQ(csv, slurp(b / "sweep_entanglement.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

}  // namespace
