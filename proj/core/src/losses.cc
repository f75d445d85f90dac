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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kge/errors.h"
#include "kge/scoring.h"
#include "kge/training.h"

namespace kge {

std::size_t SparseRows::Touch(std::uint32_t id) {
  auto [it, inserted] = slots_.try_emplace(id, ids_.size());
  if (inserted) {
    ids_.push_back(id);
    values_.resize(values_.size() + width_, 0.0);
  }
  return it->second;
}

std::span<const double> SparseRows::Find(std::uint32_t id) const {
  auto it = slots_.find(id);
  if (it == slots_.end()) return {};
  return Slot(it->second);
}

void SparseRows::Clear() {
  ids_.clear();
  values_.clear();
  slots_.clear();
}

Gradients MakeGradients(const ModelParams& params) {
  return Gradients{SparseRows(params.entities.width()),
                   SparseRows(params.relations.width())};
}

NegativeBatch SampleNegatives(const Triple& positive, std::size_t eta,
                              CorruptSide side, std::size_t entities,
                              std::mt19937_64& rng) {
  if (entities < 2) {
    throw ConfigError("negative sampling needs at least 2 entities");
  }
  NegativeBatch batch;
  batch.side = side;
  batch.triples.reserve(eta);
  std::uniform_int_distribution<EntityId> pick(
      0, static_cast<EntityId>(entities - 2));
  const EntityId original =
      side == CorruptSide::kHead ? positive.head : positive.tail;
  for (std::size_t i = 0; i < eta; ++i) {
    EntityId e = pick(rng);
    if (e >= original) ++e;
    Triple t = positive;
    (side == CorruptSide::kHead ? t.head : t.tail) = e;
    batch.triples.push_back(t);
  }
  return batch;
}

std::vector<double> AdversarialWeights(std::span<const double> neg_scores) {
  std::vector<double> weights(neg_scores.size());
  if (neg_scores.empty()) return weights;
  const double top = *std::max_element(neg_scores.begin(), neg_scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < neg_scores.size(); ++i) {
    weights[i] = std::exp(neg_scores[i] - top);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

namespace {

// -log(sigmoid(x)) without overflow.
double SoftplusNeg(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double CheckedScore(const ModelParams& params, const Triple& t) {
  const double s = Score(params, t);
  if (!std::isfinite(s)) {
    std::ostringstream msg;
    msg << "non-finite score for triple (" << t.head << ", " << t.relation
        << ", " << t.tail << ")";
    throw NumericalError(msg.str());
  }
  return s;
}

// Adds weight * df/d(embeddings of t) into grads.
void AddScoreGradient(const ModelParams& params, const Triple& t, double weight,
                      Gradients& grads) {
  if (weight == 0.0) return;
  const std::size_t hs = grads.entities.Touch(t.head);
  const std::size_t ts = grads.entities.Touch(t.tail);
  const std::size_t rs = grads.relations.Touch(t.relation);
  AccumulateScoreGradient(
      params.kind, params.norm_order, params.entities.Row(t.head),
      params.relations.Row(t.relation), params.entities.Row(t.tail), weight,
      grads.entities.Slot(hs), grads.relations.Slot(rs),
      grads.entities.Slot(ts));
}

double SquaredNorm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

void AddL2Gradient(std::span<const double> v, double coef,
                   std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += 2.0 * coef * v[i];
}

// Sum of |x|^3 with complex moduli for complex geometry.
double CubedNorm(std::span<const double> v, bool complex) {
  double acc = 0.0;
  if (!complex) {
    for (double x : v) acc += std::abs(x) * x * x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double m = std::hypot(v[i], v[half + i]);
    acc += m * m * m;
  }
  return acc;
}

void AddCubedNormGradient(std::span<const double> v, bool complex, double coef,
                          std::span<double> out) {
  if (!complex) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[i] += 3.0 * coef * std::abs(v[i]) * v[i];
    }
    return;
  }
  const std::size_t half = v.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double m = std::hypot(v[i], v[half + i]);
    out[i] += 3.0 * coef * m * v[i];
    out[half + i] += 3.0 * coef * m * v[half + i];
  }
}

}  // namespace

double AccumulateBinaryLogisticLoss(const ModelParams& params,
                                    const Triple& positive,
                                    const NegativeBatch& negatives,
                                    std::span<const double> weights,
                                    const TrainConfig& config, double scale,
                                    Gradients& grads) {
  const double gamma = config.gamma;
  const double pos_score = CheckedScore(params, positive);
  double loss = SoftplusNeg(gamma + pos_score);
  // d/df of -log s(gamma + f) is -s(-(gamma + f)).
  AddScoreGradient(params, positive, -scale * Sigmoid(-(gamma + pos_score)),
                   grads);

  for (std::size_t i = 0; i < negatives.triples.size(); ++i) {
    const Triple& neg = negatives.triples[i];
    const double s = CheckedScore(params, neg);
    loss += weights[i] * SoftplusNeg(-gamma - s);
    AddScoreGradient(params, neg, scale * weights[i] * Sigmoid(gamma + s),
                     grads);
  }

  if (config.lambda != 0.0) {
    const auto h = params.entities.Row(positive.head);
    const auto r = params.relations.Row(positive.relation);
    const auto t = params.entities.Row(positive.tail);
    loss += config.lambda * (SquaredNorm(h) + SquaredNorm(r) + SquaredNorm(t));
    const double coef = scale * config.lambda;
    const std::size_t hs = grads.entities.Touch(positive.head);
    const std::size_t ts = grads.entities.Touch(positive.tail);
    const std::size_t rs = grads.relations.Touch(positive.relation);
    AddL2Gradient(h, coef, grads.entities.Slot(hs));
    AddL2Gradient(r, coef, grads.relations.Slot(rs));
    AddL2Gradient(t, coef, grads.entities.Slot(ts));
  }
  return loss;
}

LossResult BinaryLogisticLoss(const ModelParams& params, const Triple& positive,
                              const NegativeBatch& negatives,
                              const TrainConfig& config) {
  std::vector<double> scores;
  scores.reserve(negatives.triples.size());
  for (const Triple& t : negatives.triples) {
    scores.push_back(CheckedScore(params, t));
  }
  const auto weights = AdversarialWeights(scores);
  LossResult result{0.0, MakeGradients(params)};
  result.loss = AccumulateBinaryLogisticLoss(
      params, positive, negatives, weights, config, 1.0, result.gradients);
  return result;
}

namespace {

// -log softmax over every replacement of one slot; adds the gradient.
double SoftmaxSide(const ModelParams& params, const Triple& positive,
                   CorruptSide side, double scale, Gradients& grads) {
  const std::size_t n = params.entities.rows();
  std::vector<double> scores(n);
  const EntityId truth =
      side == CorruptSide::kHead ? positive.head : positive.tail;
  auto candidate = [&](EntityId e) {
    Triple t = positive;
    (side == CorruptSide::kHead ? t.head : t.tail) = e;
    return t;
  };
  for (EntityId e = 0; e < n; ++e) {
    scores[e] = CheckedScore(params, candidate(e));
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double s : scores) total += std::exp(s - top);
  const double log_partition = top + std::log(total);
  for (EntityId e = 0; e < n; ++e) {
    const double prob = std::exp(scores[e] - log_partition);
    AddScoreGradient(params, candidate(e),
                     scale * (prob - (e == truth ? 1.0 : 0.0)), grads);
  }
  return log_partition - scores[truth];
}

}  // namespace

double AccumulateMulticlassN3Loss(const ModelParams& params,
                                  const Triple& positive,
                                  const TrainConfig& config, double scale,
                                  Gradients& grads) {
  if (!IsN3Kind(params.kind)) {
    throw ConfigError("multiclass N3 loss needs distmultn3 or complexn3, got " +
                      std::string(ModelKindName(params.kind)));
  }
  CheckTripleBounds(params, positive);
  double loss = SoftmaxSide(params, positive, CorruptSide::kHead, scale, grads);
  loss += SoftmaxSide(params, positive, CorruptSide::kTail, scale, grads);

  if (config.lambda != 0.0) {
    const bool complex = IsComplexGeometry(params.kind);
    const auto h = params.entities.Row(positive.head);
    const auto r = params.relations.Row(positive.relation);
    const auto t = params.entities.Row(positive.tail);
    loss += config.lambda * (CubedNorm(h, complex) + CubedNorm(r, complex) +
                             CubedNorm(t, complex));
    const double coef = scale * config.lambda;
    const std::size_t hs = grads.entities.Touch(positive.head);
    const std::size_t ts = grads.entities.Touch(positive.tail);
    const std::size_t rs = grads.relations.Touch(positive.relation);
    AddCubedNormGradient(h, complex, coef, grads.entities.Slot(hs));
    AddCubedNormGradient(r, complex, coef, grads.relations.Slot(rs));
    AddCubedNormGradient(t, complex, coef, grads.entities.Slot(ts));
  }
  return loss;
}

LossResult MulticlassN3Loss(const ModelParams& params, const Triple& positive,
                            const TrainConfig& config) {
  LossResult result{0.0, MakeGradients(params)};
  result.loss = AccumulateMulticlassN3Loss(params, positive, config, 1.0,
                                           result.gradients);
  return result;
}

}  // namespace kge
