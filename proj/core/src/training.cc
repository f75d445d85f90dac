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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "kge/errors.h"
#include "kge/evaluation.h"
#include "kge/hash.h"
#include "kge/scoring.h"

namespace kge {

std::string_view LossKindName(LossKind kind) {
  return kind == LossKind::kBinaryLogistic ? "binary-logistic"
                                           : "multiclass-n3";
}

LossKind ParseLossKind(std::string_view name) {
  if (name == "binary-logistic" || name == "binary") {
    return LossKind::kBinaryLogistic;
  }
  if (name == "multiclass-n3" || name == "multiclass") {
    return LossKind::kMulticlassN3;
  }
  throw ConfigError("unknown loss: " + std::string(name));
}

std::string_view OptimizerKindName(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "adagrad";
}

OptimizerKind ParseOptimizerKind(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "adagrad") return OptimizerKind::kAdagrad;
  throw ConfigError("unknown optimizer: " + std::string(name));
}

TrainConfig DefaultTrainConfig(ModelKind kind) {
  TrainConfig config;
  if (IsN3Kind(kind)) {
    config.loss = LossKind::kMulticlassN3;
    config.optimizer = OptimizerKind::kAdagrad;
    config.lr = 0.1;
    config.lambda = 0.01;
    config.gamma = 0.0;
  } else if (kind == ModelKind::kDistMult || kind == ModelKind::kComplEx) {
    config.gamma = 0.0;
    config.lambda = 0.001;
  }
  return config;
}

void ValidateTrainConfig(const TrainConfig& config, ModelKind kind) {
  auto fail = [](const std::string& why) { throw ConfigError(why); };
  if (!(config.lr > 0) || !std::isfinite(config.lr)) fail("lr must be > 0");
  if (config.gamma < 0) fail("gamma must be >= 0");
  if (config.lambda < 0) fail("lambda must be >= 0");
  if (config.eta < 1) fail("eta must be >= 1");
  if (config.batches_per_epoch < 1) fail("batches per epoch must be >= 1");
  if (config.batch_size < 1) fail("batch size must be >= 1");
  if (config.valid_every < 1) fail("valid-every must be >= 1");
  if (config.patience < 1) fail("patience must be >= 1");
  if (config.norm_order != 1 && config.norm_order != 2) {
    fail("norm order must be 1 or 2");
  }
  if (config.loss == LossKind::kMulticlassN3 && !IsN3Kind(kind)) {
    fail("multiclass-n3 loss requires distmultn3 or complexn3");
  }
  if (config.loss == LossKind::kBinaryLogistic && IsN3Kind(kind)) {
    fail(std::string(ModelKindName(kind)) + " trains with multiclass-n3");
  }
}

std::string ConfigDigest(const TrainConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "loss=" << LossKindName(c.loss) << ";gamma=" << c.gamma
      << ";eta=" << c.eta << ";lambda=" << c.lambda
      << ";optimizer=" << OptimizerKindName(c.optimizer) << ";lr=" << c.lr
      << ";batches=" << c.batches_per_epoch << ";batch_size=" << c.batch_size
      << ";max_epochs=" << c.max_epochs << ";valid_every=" << c.valid_every
      << ";patience=" << c.patience << ";norm=" << c.norm_order
      << ";seed=" << c.seed << ";n3_init_scale=" << c.n3_init_scale;
  Fnv1a hasher;
  hasher.Update(out.str());
  return hasher.HexDigest();
}

// ---------------------------------------------------------------------------

OptimizerState MakeOptimizerState(const ModelParams& params,
                                  OptimizerKind kind) {
  OptimizerState state;
  state.kind = kind;
  const auto& ent = params.entities;
  const auto& rel = params.relations;
  if (kind == OptimizerKind::kAdam) {
    state.entity_first = EmbeddingTable(ent.rows(), ent.width());
    state.relation_first = EmbeddingTable(rel.rows(), rel.width());
    state.epsilon = 1e-8;
  } else {
    state.epsilon = 1e-10;
  }
  state.entity_second = EmbeddingTable(ent.rows(), ent.width());
  state.relation_second = EmbeddingTable(rel.rows(), rel.width());
  return state;
}

namespace {

void AdamRows(const SparseRows& grads, EmbeddingTable& params,
              EmbeddingTable& first, EmbeddingTable& second,
              const OptimizerState& state, double lr) {
  const double c1 =
      1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 =
      1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t slot = 0; slot < grads.size(); ++slot) {
    const auto id = grads.id(slot);
    const auto g = grads.Slot(slot);
    auto p = params.Row(id);
    auto m = first.Row(id);
    auto v = second.Row(id);
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + state.epsilon);
    }
  }
}

void AdagradRows(const SparseRows& grads, EmbeddingTable& params,
                 EmbeddingTable& accum, double epsilon, double lr) {
  for (std::size_t slot = 0; slot < grads.size(); ++slot) {
    const auto id = grads.id(slot);
    const auto g = grads.Slot(slot);
    auto p = params.Row(id);
    auto a = accum.Row(id);
    for (std::size_t i = 0; i < g.size(); ++i) {
      a[i] += g[i] * g[i];
      p[i] -= lr * g[i] / std::sqrt(a[i] + epsilon);
    }
  }
}

void CheckWidths(const SparseRows& grads, const EmbeddingTable& table,
                 const char* what) {
  if (!grads.empty() && grads.width() != table.width()) {
    throw ConfigError(std::string("gradient width mismatch for ") + what);
  }
  for (std::size_t slot = 0; slot < grads.size(); ++slot) {
    if (grads.id(slot) >= table.rows()) {
      throw ConfigError(std::string("gradient row out of range for ") + what);
    }
  }
}

}  // namespace

void OptimizerStep(OptimizerState& state, ModelParams& params,
                   const Gradients& grads, double lr) {
  CheckWidths(grads.entities, params.entities, "entities");
  CheckWidths(grads.relations, params.relations, "relations");
  if (state.entity_second.rows() != params.entities.rows() ||
      state.relation_second.rows() != params.relations.rows()) {
    throw ConfigError("optimizer state does not match the model tables");
  }
  ++state.step;
  if (state.kind == OptimizerKind::kAdam) {
    AdamRows(grads.entities, params.entities, state.entity_first,
             state.entity_second, state, lr);
    AdamRows(grads.relations, params.relations, state.relation_first,
             state.relation_second, state, lr);
  } else {
    AdagradRows(grads.entities, params.entities, state.entity_second,
                state.epsilon, lr);
    AdagradRows(grads.relations, params.relations, state.relation_second,
                state.epsilon, lr);
  }
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> PartitionBatches(std::size_t n, std::size_t batches) {
  std::vector<std::size_t> sizes;
  if (batches == 0) return sizes;
  const std::size_t base = n / batches;
  const std::size_t extra = n % batches;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    if (size > 0) sizes.push_back(size);
  }
  return sizes;
}

EpochStats TrainEpoch(ModelParams& params, OptimizerState& state,
                      const Dataset& dataset, const TrainConfig& config,
                      std::mt19937_64& rng, std::size_t epoch) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> order(dataset.train.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> sizes;
  if (config.loss == LossKind::kBinaryLogistic) {
    sizes = PartitionBatches(order.size(), config.batches_per_epoch);
  } else {
    for (std::size_t done = 0; done < order.size(); done += config.batch_size) {
      sizes.push_back(std::min(config.batch_size, order.size() - done));
    }
  }

  const std::size_t entities = params.entities.rows();
  Gradients grads = MakeGradients(params);
  std::vector<double> scores;
  double loss_sum = 0.0;
  std::size_t cursor = 0;
  try {
    for (std::size_t size : sizes) {
      grads.Clear();
      const double scale = 1.0 / static_cast<double>(size);
      for (std::size_t i = 0; i < size; ++i) {
        const Triple& pos = dataset.train[order[cursor++]];
        if (config.loss == LossKind::kBinaryLogistic) {
          for (CorruptSide side : {CorruptSide::kTail, CorruptSide::kHead}) {
            const auto negs =
                SampleNegatives(pos, config.eta, side, entities, rng);
            scores.clear();
            for (const Triple& t : negs.triples) {
              scores.push_back(Score(params, t));
            }
            const auto weights = AdversarialWeights(scores);
            loss_sum +=
                0.5 * AccumulateBinaryLogisticLoss(params, pos, negs, weights,
                                                   config, 0.5 * scale, grads);
          }
        } else {
          loss_sum +=
              AccumulateMulticlassN3Loss(params, pos, config, scale, grads);
        }
      }
      OptimizerStep(state, params, grads, config.lr);
    }
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " at epoch " +
                         std::to_string(epoch));
  }

  EpochStats stats;
  stats.triples_seen = order.size();
  stats.mean_loss =
      order.empty() ? 0.0 : loss_sum / static_cast<double>(order.size());
  if (!std::isfinite(stats.mean_loss)) {
    throw NumericalError("non-finite loss at epoch " + std::to_string(epoch));
  }
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return stats;
}

void WriteCurveCsv(std::span<const CurvePoint> curve, std::ostream& out) {
  out << "epoch,mean_loss,valid_mrr,wall_seconds\n";
  const auto precision = out.precision(10);
  for (const auto& p : curve) {
    out << p.epoch << ',' << p.mean_loss << ',';
    if (p.valid_mrr) out << *p.valid_mrr;
    out << ',' << p.wall_seconds << '\n';
  }
  out.precision(precision);
}

bool EarlyStopper::Observe(double metric) {
  if (!best_ || metric > *best_) {
    best_ = metric;
    misses_ = 0;
    return true;
  }
  ++misses_;
  return false;
}

std::uint64_t TrainingStreamSeed(std::uint64_t seed) {
  // splitmix64 finalizer keeps the stream apart from the init stream.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

TrainResult TrainWithEarlyStop(ModelParams params, const Dataset& dataset,
                               const FilterIndex& filter,
                               const TrainConfig& config,
                               const Validator& validator) {
  ValidateTrainConfig(config, params.kind);
  TrainResult result;
  Validator validate = validator;
  if (!validate && !dataset.valid.empty()) {
    validate = [&](const ModelParams& snapshot) {
      return EvaluateTriples(MakeScorer(snapshot), dataset.valid, filter,
                             dataset.num_entities())
          .mrr;
    };
  }
  if (!validate) {
    result.warnings.push_back(
        "empty validation split: early stopping disabled");
  }

  std::mt19937_64 rng(TrainingStreamSeed(params.seed));
  OptimizerState state = MakeOptimizerState(params, config.optimizer);
  EarlyStopper stopper(config.patience);
  std::optional<ModelParams> best;
  double elapsed = 0.0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const EpochStats stats =
        TrainEpoch(params, state, dataset, config, rng, epoch);
    elapsed += stats.wall_seconds;
    CurvePoint point{epoch, stats.mean_loss, std::nullopt, elapsed};
    const bool due =
        epoch % config.valid_every == 0 || epoch == config.max_epochs;
    if (validate && due) {
      const double mrr = validate(params);
      point.valid_mrr = mrr;
      if (stopper.Observe(mrr)) {
        best = params;
        result.best_epoch = epoch;
      }
    }
    result.curve.push_back(point);
    if (validate && due && stopper.ShouldStop()) {
      result.stopped_early = true;
      break;
    }
  }

  result.best_valid_mrr = stopper.best();
  if (best) {
    result.params = std::move(*best);
  } else {
    result.params = std::move(params);
    result.best_epoch = result.curve.empty() ? 0 : result.curve.back().epoch;
  }
  return result;
}

}  // namespace kge
