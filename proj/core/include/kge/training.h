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

#ifndef KGE_TRAINING_H_
#define KGE_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kge/dataset.h"
#include "kge/embedding.h"

namespace kge {

enum class LossKind { kBinaryLogistic, kMulticlassN3 };
enum class OptimizerKind { kAdam, kAdagrad };
enum class CorruptSide { kHead, kTail };

std::string_view LossKindName(LossKind kind);
LossKind ParseLossKind(std::string_view name);
std::string_view OptimizerKindName(OptimizerKind kind);
OptimizerKind ParseOptimizerKind(std::string_view name);

struct TrainConfig {
  LossKind loss = LossKind::kBinaryLogistic;
  double gamma = 10.0;  // margin
  std::size_t eta = 8;  // negatives per positive and side
  double lambda = 0.0;  // regularization coefficient
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double lr = 0.0003;
  std::size_t batches_per_epoch = 100;  // binary loss
  std::size_t batch_size = 100;         // multiclass loss
  std::size_t max_epochs = 5000;
  std::size_t valid_every = 50;
  std::size_t patience = 3;
  int norm_order = 2;
  std::uint64_t seed = 1;
  double n3_init_scale = kDefaultN3InitScale;
};

// Defaults per model kind: N3 kinds get the multiclass loss with Adagrad at
// lr 0.1 and lambda 0.01; the others the binary loss with Adam at lr 0.0003.
TrainConfig DefaultTrainConfig(ModelKind kind);

// Throws ConfigError on out-of-range values or a loss that does not fit
// `kind`.
void ValidateTrainConfig(const TrainConfig& config, ModelKind kind);

// Stable digest of every field, as 16 hex digits.
std::string ConfigDigest(const TrainConfig& config);

// ---------------------------------------------------------------------------
// Negative sampling.

struct NegativeBatch {
  std::vector<Triple> triples;
  CorruptSide side = CorruptSide::kTail;
};

// Replaces the `side` slot with an entity drawn uniformly from the other
// entities-1 ids. Known positives are not filtered out. Throws ConfigError
// when entities < 2.
NegativeBatch SampleNegatives(const Triple& positive, std::size_t eta,
                              CorruptSide side, std::size_t entities,
                              std::mt19937_64& rng);

// Softmax of the negative scores, shifted by their max.
std::vector<double> AdversarialWeights(std::span<const double> neg_scores);

// ---------------------------------------------------------------------------
// Sparse gradients.

// Rows of one gradient table keyed by row id, in first-touch order.
class SparseRows {
 public:
  explicit SparseRows(std::size_t width = 0) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::uint32_t id(std::size_t slot) const { return ids_[slot]; }

  // Ensures a zero row exists for `id`; returns its slot. Creating rows may
  // invalidate spans returned earlier.
  std::size_t Touch(std::uint32_t id);
  std::span<double> Slot(std::size_t slot) {
    return {values_.data() + slot * width_, width_};
  }
  std::span<const double> Slot(std::size_t slot) const {
    return {values_.data() + slot * width_, width_};
  }
  // Empty span for rows never touched.
  std::span<const double> Find(std::uint32_t id) const;

  void Clear();

 private:
  std::size_t width_;
  std::vector<std::uint32_t> ids_;
  std::vector<double> values_;
  std::unordered_map<std::uint32_t, std::size_t> slots_;
};

struct Gradients {
  SparseRows entities;
  SparseRows relations;

  void Clear() {
    entities.Clear();
    relations.Clear();
  }
};

Gradients MakeGradients(const ModelParams& params);

struct LossResult {
  double loss = 0.0;
  Gradients gradients;
};

// Margin-shifted binary logistic loss with self-adversarial negative weights
// and an L2 penalty on the positive's three embeddings:
//
//   -log s(gamma + f(pos)) - sum_i w_i log s(-gamma - f(neg_i))
//     + lambda (|h|^2 + |r|^2 + |t|^2)
//
// The weights are held constant when differentiating. Throws NumericalError
// on a non-finite score.
LossResult BinaryLogisticLoss(const ModelParams& params, const Triple& positive,
                              const NegativeBatch& negatives,
                              const TrainConfig& config);

// Same loss with caller-supplied negative weights. Adds `scale` times the
// gradient into `grads` and returns the unscaled loss.
double AccumulateBinaryLogisticLoss(const ModelParams& params,
                                    const Triple& positive,
                                    const NegativeBatch& negatives,
                                    std::span<const double> weights,
                                    const TrainConfig& config, double scale,
                                    Gradients& grads);

// Full-softmax log-loss over every head replacement plus every tail
// replacement, with lambda * N3 penalty (sum of cubed coordinate moduli) on
// the positive's embeddings. Throws ConfigError for non-N3 kinds.
LossResult MulticlassN3Loss(const ModelParams& params, const Triple& positive,
                            const TrainConfig& config);

double AccumulateMulticlassN3Loss(const ModelParams& params,
                                  const Triple& positive,
                                  const TrainConfig& config, double scale,
                                  Gradients& grads);

// ---------------------------------------------------------------------------
// Optimizers.

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  // Adam: first moments. Unused by Adagrad.
  EmbeddingTable entity_first;
  EmbeddingTable relation_first;
  // Adam: second moments. Adagrad: accumulated squared gradients.
  EmbeddingTable entity_second;
  EmbeddingTable relation_second;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const OptimizerState&,
                         const OptimizerState&) = default;
};

OptimizerState MakeOptimizerState(const ModelParams& params,
                                  OptimizerKind kind);

// Updates only the rows present in `grads`. Adam moments of untouched rows
// are not decayed. Throws ConfigError on a width mismatch.
void OptimizerStep(OptimizerState& state, ModelParams& params,
                   const Gradients& grads, double lr);

// ---------------------------------------------------------------------------
// Epoch and early-stop drivers.

// Sizes of `batches` near-equal batches over `n` items; the first n % batches
// batches get one extra item. Zero-sized batches are omitted.
std::vector<std::size_t> PartitionBatches(std::size_t n, std::size_t batches);

struct EpochStats {
  double mean_loss = 0.0;
  std::size_t triples_seen = 0;
  double wall_seconds = 0.0;
};

// One pass over dataset.train. `epoch` only labels error messages.
EpochStats TrainEpoch(ModelParams& params, OptimizerState& state,
                      const Dataset& dataset, const TrainConfig& config,
                      std::mt19937_64& rng, std::size_t epoch = 0);

struct CurvePoint {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> valid_mrr;
  double wall_seconds = 0.0;
};

// Writes "epoch,mean_loss,valid_mrr,wall_seconds" rows.
void WriteCurveCsv(std::span<const CurvePoint> curve, std::ostream& out);

// Tracks the best validation score and the count of non-improving checks.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Returns true when `metric` beats every earlier observation.
  bool Observe(double metric);
  bool ShouldStop() const { return misses_ >= patience_; }
  std::optional<double> best() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t misses_ = 0;
  std::optional<double> best_;
};

// Maps a model snapshot to a validation score (higher is better).
using Validator = std::function<double(const ModelParams&)>;

struct TrainResult {
  ModelParams params;
  std::vector<CurvePoint> curve;
  std::size_t best_epoch = 0;
  std::optional<double> best_valid_mrr;
  bool stopped_early = false;
  std::vector<std::string> warnings;
};

// Trains for up to config.max_epochs, validating every config.valid_every
// epochs (and after the last one), and returns the best validated snapshot.
// With an empty validation split (and no `validator`) early stopping is off
// and the final parameters are returned. The training stream is seeded from
// params.seed.
TrainResult TrainWithEarlyStop(ModelParams params, const Dataset& dataset,
                               const FilterIndex& filter,
                               const TrainConfig& config,
                               const Validator& validator = {});

// Seed of the sampling/shuffling stream for a replica with init seed `seed`.
std::uint64_t TrainingStreamSeed(std::uint64_t seed);

}  // namespace kge

#endif  // KGE_TRAINING_H_
