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

#include "quantsyn/model_file.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace quantsyn {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParseError parse_error(const std::string& text) {
  try {
    parse_model(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError(0, 0, "");
}

TEST(ModelFileTest, ScalarFileMatchesBuiltin) {
  const ModelFile mf = parse_model(read_file(QUANTSYN_MODELS_DIR "/scalar.qs"));
  const ModelInstance ref = scalar_model(Rational(1, 100), Rational(1, 4), 3);
  EXPECT_EQ(mf.model.name, "scalar");
  EXPECT_TRUE(mf.model.plant.n() == ref.plant.n());
  EXPECT_EQ(mf.model.plant.x(), ref.plant.x());
  EXPECT_EQ(mf.model.plant.u(), ref.plant.u());
  EXPECT_EQ(mf.model.sampling, Rational(1, 100));
  EXPECT_EQ(mf.params.at("eps"), Rational(1, 4));
  const Quantizer& a = mf.model.quantization.state()[0];
  const Quantizer& b = ref.quantization.state()[0];
  EXPECT_EQ(a.count, b.count);
  EXPECT_EQ(a.first_index, b.first_index);
  // Regions agree on a grid finer than the cells.
  const VarId x = ref.plant.x()[0];
  for (int k = -50; k <= 60; ++k) {
    const Valuation v{{x, Rational(k, 20)}};
    EXPECT_EQ(contains(mf.model.init, v), contains(ref.init, v)) << k;
    EXPECT_EQ(contains(mf.model.goal, v), contains(ref.goal, v)) << k;
  }
}

TEST(ModelFileTest, BitsOverrideUniformQuantizers) {
  const std::string text =
      "var a real [0, 1] bits 3;\n"
      "input u bool;\n"
      "trans a' = a;\n";
  EXPECT_EQ(parse_model(text).model.quantization.state()[0].count, 8u);
  EXPECT_EQ(parse_model(text, 5).model.quantization.state()[0].count, 32u);
}

TEST(ModelFileTest, DecimalsAreExact) {
  const ModelFile mf = parse_model(
      "param k = 0.637;\n"
      "param small = 1e-6;\n"
      "var a real [0, 1] bits 2;\n"
      "input u int [-1, 1];\n"
      "trans a' = k * a + 0.001 * u;\n");
  EXPECT_EQ(mf.params.at("k"), Rational(637, 1000));
  EXPECT_EQ(mf.params.at("small"), Rational(1, 1000000));
}

TEST(ModelFileTest, MissingBoundsReportLine) {
  const ParseError e = parse_error(
      "var a real [0, 1] bits 2;\n"
      "input u bool;\n"
      "aux y real;\n"
      "trans a' = a + y;\n");
  EXPECT_EQ(e.line(), 3u);
  EXPECT_NE(std::string(e.what()).find("bounds"), std::string::npos);
}

TEST(ModelFileTest, Errors) {
  EXPECT_EQ(parse_error("var a real [0, 1] bits 2;\ntrans a' = a * a;\n").line(), 2u);
  EXPECT_EQ(parse_error("var a real [0, 1] bits 2;\ntrans a' = b;\n").line(), 2u);
  EXPECT_EQ(parse_error("var a real [0, 1] bits 2;\ntrans a' = a\n").line(), 3u);
  EXPECT_EQ(parse_error("var a real [2, 1] bits 2;\n").line(), 1u);
  EXPECT_EQ(parse_error("var a int [0, 1] bits 2;\n").line(), 1u);
  EXPECT_EQ(parse_error("var a real [0, 1] bits 2;\nvar a real [0, 1] bits 2;\n").line(), 2u);
  EXPECT_EQ(parse_error("\n\n  frobnicate;\n").column(), 3u);
  EXPECT_EQ(parse_error("input u bool;\n").line(), 2u);
  EXPECT_EQ(parse_error("var a real [0, 1] bits 2;\ninput u bool;\ntrans a' = a;\ngoal u <= 0;\n").line(), 4u);
  // A state variable whose successor is never defined.
  EXPECT_THROW(parse_model("var a real [0, 1] bits 2;\ninput u bool;\n"), UsageError);
}

TEST(ModelFileTest, GuardedTransitions) {
  const ModelFile mf = parse_model(
      "var a real [0, 1] bits 2;\n"
      "input u bool;\n"
      "trans u -> a' = a / 2;\n"
      "trans !u -> a' = a;\n");
  const auto& n = mf.model.plant.n();
  ASSERT_EQ(n.guarded().size(), 4u);
  EXPECT_TRUE(n.guarded()[0].positive);
  EXPECT_FALSE(n.guarded()[2].positive);
  const VarId a = mf.model.plant.x()[0], u = mf.model.plant.u()[0], an = mf.model.plant.x_next()[0];
  EXPECT_TRUE(transition_check(mf.model.plant, {{a, Rational(1)}}, {{u, Rational(1)}}, {{an, Rational(1, 2)}}));
  EXPECT_FALSE(transition_check(mf.model.plant, {{a, Rational(1)}}, {{u, Rational(0)}}, {{an, Rational(1, 2)}}));
}

}  // namespace
}  // namespace quantsyn
