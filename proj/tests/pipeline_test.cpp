// Copyright 2026 The quantsyn Authors.
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

#include "quantsyn/pipeline.hpp"

#include "quantsyn/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace quantsyn {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(AlgorithmTest, Names) {
  EXPECT_EQ(parse_algorithm("mgo"), Algorithm::mgo);
  EXPECT_EQ(parse_algorithm("small"), Algorithm::small);
  EXPECT_EQ(algorithm_name(Algorithm::small), "small");
  EXPECT_THROW(parse_algorithm("fast"), UsageError);
}

TEST(PipelineTest, CoarseScalarFails) {
  const auto m = scalar_model(Rational(1, 100), Rational(1, 4), 0);
  PipelineOptions opt;
  opt.algo = Algorithm::small;
  const PipelineResult r = run_pipeline(m, opt);
  EXPECT_FALSE(r.row.synthesized);
  EXPECT_FALSE(r.row.path);
  EXPECT_FALSE(r.emission);
  EXPECT_EQ(r.row.init_states, 5u);
}

TEST(PipelineTest, FineScalarSucceedsAndWritesArtifacts) {
  const auto m = scalar_model(Rational(1, 100), Rational(1, 4), 3);
  const auto dir = std::filesystem::temp_directory_path() / "quantsyn_pipeline_test";
  std::filesystem::remove_all(dir);
  PipelineOptions opt;
  opt.bits = 3;
  opt.out_dir = dir.string();
  opt.x0 = std::vector<double>{2.4};
  opt.horizon = 3000;
  std::vector<ReportRow> rows;
  for (Algorithm a : {Algorithm::mgo, Algorithm::small}) {
    opt.algo = a;
    const PipelineResult r = run_pipeline(m, opt);
    EXPECT_TRUE(r.row.synthesized);
    EXPECT_EQ(r.row.init_states, 36u);
    EXPECT_EQ(r.row.domain_states, 36u);
    ASSERT_TRUE(r.row.path);
    ASSERT_TRUE(r.row.setup_time);
    const auto src = dir / source_file_name("scalar", algorithm_name(a), 3);
    ASSERT_TRUE(std::filesystem::exists(src));
    EXPECT_EQ(slurp(src), r.emission->source.text);
    EXPECT_EQ(r.row.src_bytes, r.emission->source.text.size());
    EXPECT_TRUE(std::filesystem::exists(dir / ("scalar_" + algorithm_name(a) + "_3_traj.csv")));
    rows.push_back(r.row);
  }
  EXPECT_LE(rows[1].blocks, rows[0].blocks);
  EXPECT_LE(*rows[0].path, *rows[1].path);

  // Re-running gives byte-identical code.
  opt.algo = Algorithm::small;
  const std::string again = run_pipeline(m, opt).emission->source.text;
  EXPECT_EQ(again, slurp(dir / "scalar_small_3.c"));
  std::filesystem::remove_all(dir);
}

TEST(ReportTest, EmptyInputIsHeaderOnly) {
  std::ostringstream csv, text;
  write_report_csv(csv, {});
  write_report_text(text, {});
  EXPECT_EQ(csv.str(), "model,b,algo,status,nodes,src_bytes,blocks,height,path,secs,setup_time\n");
  const std::string t = text.str();
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 1);
  EXPECT_TRUE(ratio_lines({}).empty());
}

ReportRow row(const std::string& model, unsigned bits, const std::string& algo, std::size_t blocks,
              std::size_t bytes, Rational path) {
  ReportRow r;
  r.model = model;
  r.bits = bits;
  r.algo = algo;
  r.synthesized = true;
  r.blocks = blocks;
  r.src_bytes = bytes;
  r.path = path;
  return r;
}

TEST(ReportTest, RatioLines) {
  const std::vector<ReportRow> rows{row("pendulum", 8, "mgo", 40, 2000, Rational(2)),
                                    row("pendulum", 8, "small", 10, 500, Rational(5)),
                                    row("pendulum", 7, "small", 9, 400, Rational(4))};
  const auto lines = ratio_lines(rows);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].bits, 8u);
  EXPECT_DOUBLE_EQ(lines[0].blocks, 0.25);
  EXPECT_DOUBLE_EQ(lines[0].src_bytes, 0.25);
  EXPECT_DOUBLE_EQ(*lines[0].path, 2.5);
  std::ostringstream text;
  write_report_text(text, rows);
  EXPECT_NE(text.str().find("pendulum b=8: blocks small/mgo = 25.0%"), std::string::npos);
  EXPECT_EQ(text.str().find("b=7:"), std::string::npos);
  std::ostringstream csv;
  write_report_csv(csv, rows);
  EXPECT_NE(csv.str().find("pendulum,8,small,ok,0,500,10,0,5.00,"), std::string::npos);
}

}  // namespace
}  // namespace quantsyn
