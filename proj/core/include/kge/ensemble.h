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

#ifndef KGE_ENSEMBLE_H_
#define KGE_ENSEMBLE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kge/dataset.h"
#include "kge/embedding.h"
#include "kge/evaluation.h"
#include "kge/training.h"

namespace kge {

// k independently trained replicas of one model kind and size, scored by the
// mean of the replica scores.
struct EnsembleModel {
  std::vector<ModelParams> replicas;
  std::uint64_t base_seed = 0;
  std::string config_digest;
  std::string vocabulary_hash;

  std::size_t k() const { return replicas.size(); }
  ModelKind kind() const { return replicas.front().kind; }
  // Per-replica embedding size d_l.
  std::size_t replica_dim() const { return replicas.front().dim; }
  // k * d_l.
  std::size_t overall_dim() const { return k() * replica_dim(); }

  friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;
};

// Throws std::invalid_argument if the model is empty or the replicas differ
// in kind, size, norm order or table shapes.
void ValidateEnsemble(const EnsembleModel& model);

// (1/k) * sum_j f_j(h, r, t). Throws std::out_of_range for bad ids.
double EnsembleScore(const EnsembleModel& model, const Triple& triple);

// The returned scorer references `model`.
TripleScorer MakeScorer(const EnsembleModel& model);

struct EnsembleTraining {
  EnsembleModel model;
  // Training curves and stop info, replica order.
  std::vector<TrainResult> replicas;
};

// Trains k replicas seeded config.seed + j on up to `workers` threads.
// Replica j depends only on its seed, so the output is independent of
// `workers`. A failing replica aborts with a runtime_error naming its index.
EnsembleTraining TrainEnsemble(ModelKind kind, std::size_t k,
                               std::size_t replica_dim, const Dataset& dataset,
                               const FilterIndex& filter,
                               const TrainConfig& config, std::size_t workers);

// Binary layout:
//   "KGEE" | u16 version | u64 metadata length | metadata JSON |
//   per replica: u64 byte length, entity table f64[],
//                u64 byte length, relation table f64[]
// All integers and floats little-endian. The metadata carries an FNV-1a
// digest of the payload.
inline constexpr std::uint16_t kCheckpointVersion = 1;

void SaveCheckpoint(const EnsembleModel& model, const TrainConfig& config,
                    const std::filesystem::path& path);

struct LoadedCheckpoint {
  EnsembleModel model;
  // Metadata block as stored.
  std::string metadata_json;
};

// Throws DataError for truncated files, bad magic, size or digest mismatch.
LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& path);

// Throws DataError when the checkpoint was trained on a different vocabulary.
void CheckVocabulary(const EnsembleModel& model, const Dataset& dataset);

}  // namespace kge

#endif  // KGE_ENSEMBLE_H_
