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

#include "kge/training.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "kge/errors.h"
#include "kge/evaluation.h"
#include "kge/scoring.h"
#include "support/oracles.h"

namespace kge {
namespace {

constexpr double kLn2 = std::numbers::ln2;

ModelParams ZeroModel(ModelKind kind, std::size_t entities, std::size_t dim) {
  ModelParams p = InitModel(kind, entities, 1, dim, 1);
  for (double& v : p.entities.values()) v = 0.0;
  for (double& v : p.relations.values()) v = 0.0;
  return p;
}

// ---------------------------------------------------------------------------

TEST(SampleNegativesTest, OnlyAlternativeIsUsed) {
  std::mt19937_64 rng(1);
  const auto batch = SampleNegatives({0, 0, 1}, 10, CorruptSide::kTail, 2, rng);
  ASSERT_EQ(batch.triples.size(), 10u);
  for (const Triple& t : batch.triples) EXPECT_EQ(t, (Triple{0, 0, 0}));
}

TEST(SampleNegativesTest, ExactCountAndCorruptedSlotDiffers) {
  std::mt19937_64 rng(2);
  const Triple pos{3, 1, 7};
  for (CorruptSide side : {CorruptSide::kHead, CorruptSide::kTail}) {
    const auto batch = SampleNegatives(pos, 5, side, 10, rng);
    ASSERT_EQ(batch.triples.size(), 5u);
    for (const Triple& t : batch.triples) {
      EXPECT_EQ(t.relation, pos.relation);
      if (side == CorruptSide::kHead) {
        EXPECT_NE(t.head, pos.head);
        EXPECT_EQ(t.tail, pos.tail);
      } else {
        EXPECT_EQ(t.head, pos.head);
        EXPECT_NE(t.tail, pos.tail);
      }
    }
  }
}

TEST(SampleNegativesTest, UniformOverAlternatives) {
  std::mt19937_64 rng(3);
  const Triple pos{0, 0, 42};
  std::vector<int> counts(100, 0);
  const auto batch = SampleNegatives(pos, 10000, CorruptSide::kTail, 100, rng);
  for (const Triple& t : batch.triples) ++counts[t.tail];
  EXPECT_EQ(counts[42], 0);
  const double expected = 10000.0 / 99.0;
  double chi2 = 0.0;
  for (int e = 0; e < 100; ++e) {
    if (e == 42) continue;
    chi2 += (counts[e] - expected) * (counts[e] - expected) / expected;
  }
  // 99th percentile of chi-squared with 98 degrees of freedom.
  EXPECT_LT(chi2, 133.48);
}

TEST(SampleNegativesTest, NeedsTwoEntities) {
  std::mt19937_64 rng(4);
  EXPECT_THROW(SampleNegatives({0, 0, 0}, 1, CorruptSide::kTail, 1, rng),
               ConfigError);
}

// ---------------------------------------------------------------------------

TEST(AdversarialWeightsTest, ClosedForms) {
  auto w = AdversarialWeights(std::vector<double>{0, 0, 0, 0});
  for (double x : w) EXPECT_DOUBLE_EQ(x, 0.25);
  w = AdversarialWeights(std::vector<double>{0, std::log(3.0)});
  EXPECT_NEAR(w[0], 0.25, 1e-15);
  EXPECT_NEAR(w[1], 0.75, 1e-15);
  w = AdversarialWeights(std::vector<double>{1000, 1001});
  const double e = std::numbers::e;
  EXPECT_NEAR(w[0], 1 / (1 + e), 1e-15);
  EXPECT_NEAR(w[1], e / (1 + e), 1e-15);
}

TEST(AdversarialWeightsTest, SumShiftAndSign) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist(0.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(1 + trial % 12);
    for (double& x : s) x = dist(rng);
    const auto w = AdversarialWeights(s);
    double sum = 0.0;
    for (double x : w) {
      EXPECT_GE(x, 0.0);
      sum += x;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    const double shift = dist(rng) * 10;
    auto shifted = s;
    for (double& x : shifted) x += shift;
    const auto w2 = AdversarialWeights(shifted);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(w[i], w2[i], 1e-9);
  }
}

// ---------------------------------------------------------------------------

TEST(BinaryLogisticLossTest, TwoLnTwoAtZero) {
  TrainConfig config;
  config.gamma = 0;
  config.lambda = 0;
  const auto p = ZeroModel(ModelKind::kDistMult, 3, 4);
  NegativeBatch negs{{{0, 0, 2}}, CorruptSide::kTail};
  EXPECT_NEAR(BinaryLogisticLoss(p, {0, 0, 1}, negs, config).loss, 2 * kLn2,
              1e-12);
  config.lambda = 1.0;  // norms vanish
  EXPECT_NEAR(BinaryLogisticLoss(p, {0, 0, 1}, negs, config).loss, 2 * kLn2,
              1e-12);
}

TEST(BinaryLogisticLossTest, ReducesToPlainLogisticLoss) {
  std::mt19937_64 rng(6);
  TrainConfig config;
  config.gamma = 0;
  config.lambda = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ModelParams p = InitModel(ModelKind::kComplEx, 8, 2, 6, trial);
    testing::Randomize(p, rng, 0.7);
    const Triple pos{1, 1, 2};
    const auto negs = SampleNegatives(pos, 4, CorruptSide::kTail, 8, rng);
    const std::vector<double> uniform(4, 0.25);
    Gradients g = MakeGradients(p);
    const double loss =
        AccumulateBinaryLogisticLoss(p, pos, negs, uniform, config, 1.0, g);
    double expected = std::log1p(std::exp(-Score(p, pos)));
    for (const Triple& n : negs.triples) {
      expected += 0.25 * std::log1p(std::exp(Score(p, n)));
    }
    EXPECT_NEAR(loss, expected, 1e-12);
  }
}

TEST(BinaryLogisticLossTest, RegularizationOnPositiveOnly) {
  TrainConfig config;
  config.gamma = 0;
  config.lambda = 0.5;
  ModelParams p = ZeroModel(ModelKind::kDistMult, 3, 2);
  p.entities.Row(0)[0] = 1.0;  // head
  p.entities.Row(1)[1] = 2.0;  // tail
  p.relations.Row(0)[0] = 3.0;
  p.entities.Row(2)[0] = 100.0;  // only ever a negative
  NegativeBatch negs{{{0, 0, 2}}, CorruptSide::kTail};
  const std::vector<double> w{1.0};
  Gradients g = MakeGradients(p);
  const double loss =
      AccumulateBinaryLogisticLoss(p, {0, 0, 1}, negs, w, config, 1.0, g);
  const double f_pos = 0.0;                // 1*3*0 + 0*0*2
  const double f_neg = 1.0 * 3.0 * 100.0;  // 300
  const double expected = std::log1p(std::exp(-f_pos)) +
                          (f_neg + std::log1p(std::exp(-f_neg))) +
                          0.5 * (1.0 + 9.0 + 4.0);
  EXPECT_NEAR(loss, expected, 1e-9);
}

// Finite differences with the negative weights frozen at the base point.
void CheckBinaryGradient(ModelKind kind, int norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TrainConfig config = DefaultTrainConfig(kind);
  config.loss = LossKind::kBinaryLogistic;
  config.gamma = 1.5;
  config.lambda = 0.1;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ModelParams p = InitModel(kind, 6, 2, 6, seed + trial, norm);
    testing::Randomize(p, rng, 0.8);
    const Triple pos{0, 1, 3};
    const auto negs = SampleNegatives(
        pos, 3, trial % 2 ? CorruptSide::kHead : CorruptSide::kTail, 6, rng);
    bool singular = testing::NearSingularity(p, pos);
    for (const Triple& t : negs.triples)
      singular |= testing::NearSingularity(p, t);
    if (singular) continue;
    std::vector<double> scores;
    for (const Triple& t : negs.triples) scores.push_back(Score(p, t));
    const auto weights = AdversarialWeights(scores);

    Gradients g = MakeGradients(p);
    AccumulateBinaryLogisticLoss(p, pos, negs, weights, config, 1.0, g);
    const auto analytic = testing::DenseGradient(p, g);
    const auto numeric = testing::NumericGradient(p, [&](const ModelParams& q) {
      Gradients scratch = MakeGradients(q);
      return AccumulateBinaryLogisticLoss(q, pos, negs, weights, config, 1.0,
                                          scratch);
    });
    ASSERT_LT(testing::RelativeError(analytic, numeric), 1e-4)
        << ModelKindName(kind) << " trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 90);
}

TEST(BinaryLogisticLossTest, GradientMatchesFiniteDifferences) {
  std::uint64_t seed = 10;
  for (ModelKind kind : kAllModelKinds)
    CheckBinaryGradient(kind, 2, seed += 500);
  CheckBinaryGradient(ModelKind::kTransE, 1, 9);
}

TEST(BinaryLogisticLossTest, NonFiniteScoreIsReported) {
  TrainConfig config;
  ModelParams p = ZeroModel(ModelKind::kDistMult, 3, 2);
  p.entities.Row(0)[0] = std::numeric_limits<double>::quiet_NaN();
  NegativeBatch negs{{{0, 0, 2}}, CorruptSide::kTail};
  EXPECT_THROW(BinaryLogisticLoss(p, {0, 0, 1}, negs, config), NumericalError);
}

// ---------------------------------------------------------------------------

TEST(MulticlassN3LossTest, UniformScoresGiveTwoLnN) {
  TrainConfig config = DefaultTrainConfig(ModelKind::kComplExN3);
  config.lambda = 0;
  for (std::size_t n : {2u, 5u, 17u}) {
    for (ModelKind kind : {ModelKind::kComplExN3, ModelKind::kDistMultN3}) {
      const auto p = ZeroModel(kind, n, 4);
      EXPECT_NEAR(MulticlassN3Loss(p, {0, 0, 1}, config).loss,
                  2 * std::log(static_cast<double>(n)), 1e-12);
    }
  }
}

TEST(MulticlassN3LossTest, RejectsNonN3Kinds) {
  const auto p = ZeroModel(ModelKind::kComplEx, 3, 4);
  EXPECT_THROW(MulticlassN3Loss(p, {0, 0, 1}, TrainConfig{}), ConfigError);
}

TEST(MulticlassN3LossTest, NonNegativeAndGradientMatches) {
  std::mt19937_64 rng(21);
  for (ModelKind kind : {ModelKind::kDistMultN3, ModelKind::kComplExN3}) {
    TrainConfig config = DefaultTrainConfig(kind);
    config.lambda = 0.05;
    for (int trial = 0; trial < 100; ++trial) {
      ModelParams p = InitModel(kind, 5, 2, 6, trial);
      testing::Randomize(p, rng, 0.9);
      const Triple pos{static_cast<EntityId>(trial % 5), 1,
                       static_cast<EntityId>((trial + 2) % 5)};
      const auto result = MulticlassN3Loss(p, pos, config);
      ASSERT_GE(result.loss, 0.0);
      const auto analytic = testing::DenseGradient(p, result.gradients);
      const auto numeric =
          testing::NumericGradient(p, [&](const ModelParams& q) {
            return MulticlassN3Loss(q, pos, config).loss;
          });
      ASSERT_LT(testing::RelativeError(analytic, numeric), 1e-4)
          << ModelKindName(kind) << " trial " << trial;
    }
  }
}

// ---------------------------------------------------------------------------

TEST(OptimizerTest, AdagradFirstStep) {
  ModelParams p = ZeroModel(ModelKind::kDistMult, 1, 1);
  p.relations = EmbeddingTable(1, 1);
  auto state = MakeOptimizerState(p, OptimizerKind::kAdagrad);
  Gradients g = MakeGradients(p);
  g.entities.Slot(g.entities.Touch(0))[0] = 3.0;
  OptimizerStep(state, p, g, 0.1);
  EXPECT_NEAR(p.entities.Row(0)[0], -0.1 * 3.0 / std::sqrt(9.0 + 1e-10), 1e-15);
}

TEST(OptimizerTest, ZeroGradientOnFreshRowLeavesItUnchanged) {
  for (OptimizerKind kind : {OptimizerKind::kAdam, OptimizerKind::kAdagrad}) {
    ModelParams p = InitModel(ModelKind::kTransE, 4, 1, 3, 5);
    const ModelParams before = p;
    auto state = MakeOptimizerState(p, kind);
    Gradients g = MakeGradients(p);
    g.entities.Touch(2);
    OptimizerStep(state, p, g, 0.5);
    EXPECT_EQ(p, before);
  }
}

TEST(OptimizerTest, AdamMatchesScalarRecurrence) {
  // Reference: the Adam recurrence for one scalar with a constant gradient.
  const double lr = 0.01, g = -0.3;
  double m = 0, v = 0, x = 0;
  std::vector<double> steps;
  for (int t = 1; t <= 200; ++t) {
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mhat = m / (1 - std::pow(0.9, t));
    const double vhat = v / (1 - std::pow(0.999, t));
    const double dx = -lr * mhat / (std::sqrt(vhat) + 1e-8);
    x += dx;
    steps.push_back(dx);
  }
  EXPECT_NEAR(steps.back(), lr, 1e-6);  // magnitude -> lr, sign opposes g

  ModelParams p = ZeroModel(ModelKind::kDistMult, 1, 1);
  auto state = MakeOptimizerState(p, OptimizerKind::kAdam);
  for (int t = 1; t <= 200; ++t) {
    Gradients grads = MakeGradients(p);
    grads.entities.Slot(grads.entities.Touch(0))[0] = g;
    OptimizerStep(state, p, grads, lr);
  }
  EXPECT_NEAR(p.entities.Row(0)[0], x, 1e-12);
  EXPECT_EQ(state.step, 200u);
}

TEST(OptimizerTest, WidthMismatch) {
  ModelParams p = ZeroModel(ModelKind::kDistMult, 2, 3);
  auto state = MakeOptimizerState(p, OptimizerKind::kAdam);
  Gradients g{SparseRows(4), SparseRows(3)};
  g.entities.Touch(0);
  EXPECT_THROW(OptimizerStep(state, p, g, 0.1), ConfigError);
}

// ---------------------------------------------------------------------------

TEST(PartitionBatchesTest, EqualAndRemainder) {
  EXPECT_EQ(PartitionBatches(100, 100), std::vector<std::size_t>(100, 1));
  const auto sizes = PartitionBatches(101, 100);
  ASSERT_EQ(sizes.size(), 100u);
  EXPECT_EQ(std::count(sizes.begin(), sizes.end(), 2), 1);
  EXPECT_EQ(std::count(sizes.begin(), sizes.end(), 1), 99);
  EXPECT_EQ(PartitionBatches(3, 5).size(), 3u);
}

Dataset SmallSynthetic(std::uint64_t seed = 7) {
  SyntheticSpec spec;
  spec.pattern = SyntheticPattern::kMixed;
  spec.entities = 60;
  spec.fan = 3;
  spec.triples = 0;
  return GenerateSynthetic(spec, seed);
}

TEST(TrainEpochTest, DeterministicForFixedSeed) {
  const Dataset d = SmallSynthetic();
  TrainConfig config;
  config.lr = 0.01;
  config.batches_per_epoch = 10;
  auto run = [&] {
    ModelParams p = InitModel(ModelKind::kRotatE, d.num_entities(),
                              d.num_relations(), 8, 3);
    auto state = MakeOptimizerState(p, config.optimizer);
    std::mt19937_64 rng(TrainingStreamSeed(3));
    EpochStats stats;
    for (int e = 0; e < 3; ++e) stats = TrainEpoch(p, state, d, config, rng, e);
    EXPECT_EQ(stats.triples_seen, d.train.size());
    return p;
  };
  EXPECT_EQ(run(), run());
}

TEST(TrainEpochTest, MulticlassUsesFixedBatchSize) {
  const Dataset d = SmallSynthetic();
  TrainConfig config = DefaultTrainConfig(ModelKind::kDistMultN3);
  config.batch_size = 50;
  ModelParams p = InitModel(ModelKind::kDistMultN3, d.num_entities(),
                            d.num_relations(), 8, 3);
  auto state = MakeOptimizerState(p, config.optimizer);
  std::mt19937_64 rng(1);
  TrainEpoch(p, state, d, config, rng);
  EXPECT_EQ(state.step, (d.train.size() + 49) / 50);
}

TEST(TrainEpochTest, LossDecreases) {
  const Dataset d = SmallSynthetic();
  TrainConfig config;
  config.lr = 0.01;
  config.gamma = 4;
  config.batches_per_epoch = 10;
  ModelParams p =
      InitModel(ModelKind::kTransE, d.num_entities(), d.num_relations(), 16, 3);
  auto state = MakeOptimizerState(p, config.optimizer);
  std::mt19937_64 rng(9);
  const double first = TrainEpoch(p, state, d, config, rng).mean_loss;
  double last = first;
  for (int e = 0; e < 30; ++e)
    last = TrainEpoch(p, state, d, config, rng).mean_loss;
  EXPECT_LT(last, first);
}

// ---------------------------------------------------------------------------

TEST(EarlyStopTest, PatienceOneStopsAfterFirstMiss) {
  const Dataset d = SmallSynthetic();
  const FilterIndex filter(d);
  TrainConfig config;
  config.max_epochs = 100;
  config.valid_every = 1;
  config.patience = 1;
  config.batches_per_epoch = 5;
  const std::vector<double> sequence{0.30, 0.31, 0.29, 0.5, 0.6};
  std::size_t calls = 0;
  std::vector<ModelParams> snapshots;
  auto validator = [&](const ModelParams& p) {
    snapshots.push_back(p);
    return sequence.at(calls++);
  };
  ModelParams init =
      InitModel(ModelKind::kTransE, d.num_entities(), d.num_relations(), 8, 1);
  const auto result = TrainWithEarlyStop(init, d, filter, config, validator);
  EXPECT_EQ(calls, 3u);
  EXPECT_TRUE(result.stopped_early);
  EXPECT_EQ(result.best_epoch, 2u);
  ASSERT_TRUE(result.best_valid_mrr.has_value());
  EXPECT_DOUBLE_EQ(*result.best_valid_mrr, 0.31);
  EXPECT_EQ(result.params, snapshots[1]);
  ASSERT_EQ(result.curve.size(), 3u);
  EXPECT_TRUE(result.curve[2].valid_mrr.has_value());
}

TEST(EarlyStopTest, ZeroEpochsReturnsInitialization) {
  const Dataset d = SmallSynthetic();
  const FilterIndex filter(d);
  TrainConfig config;
  config.max_epochs = 0;
  ModelParams init = InitModel(ModelKind::kDistMult, d.num_entities(),
                               d.num_relations(), 8, 1);
  const auto result = TrainWithEarlyStop(init, d, filter, config);
  EXPECT_EQ(result.params, init);
  EXPECT_TRUE(result.curve.empty());
}

TEST(EarlyStopTest, EmptyValidationTrainsToMaxEpochs) {
  Dataset d = SmallSynthetic();
  d.valid.clear();
  const FilterIndex filter(d);
  TrainConfig config;
  config.max_epochs = 4;
  config.valid_every = 1;
  config.batches_per_epoch = 4;
  ModelParams init =
      InitModel(ModelKind::kTransE, d.num_entities(), d.num_relations(), 8, 1);
  const auto result = TrainWithEarlyStop(init, d, filter, config);
  EXPECT_EQ(result.curve.size(), 4u);
  EXPECT_FALSE(result.warnings.empty());
  EXPECT_FALSE(result.stopped_early);
}

TEST(EarlyStopTest, TrainingImprovesValidationMrr) {
  SyntheticSpec spec;
  spec.pattern = SyntheticPattern::kOneToN;
  spec.entities = 200;
  spec.fan = 4;
  spec.triples = 160;
  spec.valid_fraction = 0.1;
  spec.test_fraction = 0.1;
  const Dataset d = GenerateSynthetic(spec, 5);
  const FilterIndex filter(d);
  TrainConfig config;
  config.lr = 0.01;
  config.gamma = 6;
  config.batches_per_epoch = 4;
  config.max_epochs = 200;
  config.valid_every = 50;
  config.patience = 10;
  ModelParams init =
      InitModel(ModelKind::kTransE, d.num_entities(), d.num_relations(), 32, 1);
  const double before =
      EvaluateTriples(MakeScorer(init), d.valid, filter, d.num_entities()).mrr;
  const auto result = TrainWithEarlyStop(init, d, filter, config);
  ASSERT_TRUE(result.best_valid_mrr.has_value());
  EXPECT_GT(*result.best_valid_mrr, before);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig config;
  EXPECT_NO_THROW(ValidateTrainConfig(config, ModelKind::kTransE));
  config.lr = 0;
  EXPECT_THROW(ValidateTrainConfig(config, ModelKind::kTransE), ConfigError);
  config = TrainConfig{};
  config.patience = 0;
  EXPECT_THROW(ValidateTrainConfig(config, ModelKind::kTransE), ConfigError);
  EXPECT_THROW(ValidateTrainConfig(TrainConfig{}, ModelKind::kComplExN3),
               ConfigError);
  EXPECT_NO_THROW(ValidateTrainConfig(DefaultTrainConfig(ModelKind::kComplExN3),
                                      ModelKind::kComplExN3));
  EXPECT_NE(ConfigDigest(TrainConfig{}), ConfigDigest(config));
}

TEST(CurveCsvTest, HeaderAndBlankMrr) {
  std::vector<CurvePoint> curve{{1, 0.5, std::nullopt, 0.1},
                                {2, 0.4, 0.25, 0.2}};
  std::ostringstream out;
  WriteCurveCsv(curve, out);
  EXPECT_EQ(
      out.str(),
      "epoch,mean_loss,valid_mrr,wall_seconds\n1,0.5,,0.1\n2,0.4,0.25,0.2\n");
}

}  // namespace
}  // namespace kge
