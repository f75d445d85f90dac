/*
 * Copyright 2026 The kge-ensemble Authors.
 *
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

#include "kge/embedding.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "kge/errors.h"

namespace kge {
namespace {

TEST(XavierInitTest, UniformBoundForWidth200) {
  std::mt19937_64 rng(3);
  const auto table = XavierInit(500, 200, InitMode::kUniform, rng);
  const double bound = std::sqrt(6.0 / 200.0);
  EXPECT_NEAR(bound, 0.173205, 1e-6);
  const auto [lo, hi] =
      std::minmax_element(table.values().begin(), table.values().end());
  EXPECT_GE(*lo, -bound);
  EXPECT_LE(*hi, bound);
}

TEST(XavierInitTest, NormalSigmaIsOneForWidthTwo) {
  std::mt19937_64 rng(4);
  const auto table = XavierInit(200000, 2, InitMode::kNormal, rng);
  double sq = 0.0;
  for (double v : table.values()) sq += v * v;
  const double var = sq / table.values().size();
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(XavierInitTest, UniformMoments) {
  std::mt19937_64 rng(5);
  const auto table = XavierInit(10000, 100, InitMode::kUniform, rng);
  const auto values = table.values();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double var = sq / (n - 1);
  const double a = std::sqrt(6.0 / 100.0);
  EXPECT_NEAR(var, a * a / 3.0, 0.05 * a * a / 3.0);
  EXPECT_LE(std::abs(mean), 3.0 * std::sqrt(a * a / 3.0) / std::sqrt(n));
}

TEST(XavierInitTest, RejectsEmptyShapes) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(XavierInit(0, 4, InitMode::kUniform, rng), ConfigError);
  EXPECT_THROW(XavierInit(4, 0, InitMode::kNormal, rng), ConfigError);
}

TEST(InitModelTest, DeterministicForSeed) {
  const auto a = InitModel(ModelKind::kDistMult, 5, 2, 4, 1);
  const auto b = InitModel(ModelKind::kDistMult, 5, 2, 4, 1);
  EXPECT_EQ(a, b);
}

TEST(InitModelTest, DistinctSeedsDiffer) {
  const auto a = InitModel(ModelKind::kTransE, 20, 3, 200, 1);
  const auto b = InitModel(ModelKind::kTransE, 20, 3, 200, 2);
  EXPECT_NE(a.entities, b.entities);
}

TEST(InitModelTest, OddSizeForComplexGeometry) {
  for (ModelKind kind :
       {ModelKind::kRotatE, ModelKind::kComplEx, ModelKind::kComplExN3}) {
    try {
      InitModel(kind, 3, 1, 7, 1);
      FAIL() << ModelKindName(kind);
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find("odd size for complex geometry"),
                std::string::npos);
    }
  }
  EXPECT_NO_THROW(InitModel(ModelKind::kDistMult, 3, 1, 7, 1));
}

TEST(InitModelTest, GeometryPerKind) {
  const auto rotate = InitModel(ModelKind::kRotatE, 4, 3, 10, 1);
  EXPECT_EQ(rotate.entities.width(), 10u);
  EXPECT_EQ(rotate.relations.width(), 5u);
  const auto complex = InitModel(ModelKind::kComplEx, 4, 3, 10, 1);
  EXPECT_EQ(complex.relations.width(), 10u);
}

TEST(InitModelTest, FillModesPerKind) {
  // Uniform kinds never exceed the Xavier bound; the normal fill of TransE
  // does with overwhelming probability at this sample size.
  const std::size_t d = 50;
  const double bound = std::sqrt(6.0 / d);
  auto max_abs = [](const ModelParams& p) {
    double m = 0.0;
    for (double v : p.entities.values()) m = std::max(m, std::abs(v));
    return m;
  };
  EXPECT_LE(max_abs(InitModel(ModelKind::kDistMult, 1000, 2, d, 9)), bound);
  EXPECT_GT(max_abs(InitModel(ModelKind::kTransE, 1000, 2, d, 9)), bound);
  EXPECT_LE(max_abs(InitModel(ModelKind::kComplExN3, 1000, 2, d, 9)),
            kDefaultN3InitScale * bound);
}

TEST(ModelKindTest, NamesRoundTrip) {
  for (ModelKind kind : kAllModelKinds) {
    EXPECT_EQ(ParseModelKind(ModelKindName(kind)), kind);
  }
  EXPECT_EQ(ParseModelKind("TransE"), ModelKind::kTransE);
  EXPECT_THROW(ParseModelKind("quate"), ConfigError);
}

}  // namespace
}  // namespace kge
