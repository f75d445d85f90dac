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

#include "kge/ensemble.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <exception>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "kge/errors.h"
#include "kge/hash.h"
#include "kge/scoring.h"

namespace kge {

void ValidateEnsemble(const EnsembleModel& model) {
  if (model.replicas.empty()) {
    throw std::invalid_argument("ensemble has no replicas");
  }
  const ModelParams& first = model.replicas.front();
  for (const ModelParams& r : model.replicas) {
    if (r.kind != first.kind || r.dim != first.dim ||
        r.norm_order != first.norm_order ||
        r.entities.rows() != first.entities.rows() ||
        r.entities.width() != first.entities.width() ||
        r.relations.rows() != first.relations.rows() ||
        r.relations.width() != first.relations.width()) {
      throw std::invalid_argument("ensemble replicas differ in geometry");
    }
  }
}

double EnsembleScore(const EnsembleModel& model, const Triple& triple) {
  double total = 0.0;
  for (const ModelParams& replica : model.replicas) {
    total += Score(replica, triple);
  }
  return total / static_cast<double>(model.replicas.size());
}

TripleScorer MakeScorer(const EnsembleModel& model) {
  return [&model](const Triple& t) { return EnsembleScore(model, t); };
}

EnsembleTraining TrainEnsemble(ModelKind kind, std::size_t k,
                               std::size_t replica_dim, const Dataset& dataset,
                               const FilterIndex& filter,
                               const TrainConfig& config, std::size_t workers) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  ValidateTrainConfig(config, kind);
  // Surface geometry errors before any thread starts.
  if (IsComplexGeometry(kind) && replica_dim % 2 != 0) {
    InitModel(kind, 1, 1, replica_dim, config.seed, config.norm_order);
  }

  std::vector<TrainResult> results(k);
  std::vector<std::exception_ptr> errors(k);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < k; j = next++) {
      try {
        ModelParams init = InitModel(
            kind, dataset.num_entities(), dataset.num_relations(), replica_dim,
            config.seed + j, config.norm_order, config.n3_init_scale);
        results[j] =
            TrainWithEarlyStop(std::move(init), dataset, filter, config);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t threads = std::min(workers, k);
    for (std::size_t w = 1; w < threads; ++w) pool.emplace_back(work);
    work();
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (!errors[j]) continue;
    try {
      std::rethrow_exception(errors[j]);
    } catch (const std::exception& e) {
      throw std::runtime_error("replica " + std::to_string(j) +
                               " failed: " + e.what());
    }
  }

  EnsembleTraining out;
  out.model.base_seed = config.seed;
  out.model.config_digest = ConfigDigest(config);
  out.model.vocabulary_hash = dataset.vocabulary.Hash();
  for (auto& r : results) out.model.replicas.push_back(r.params);
  out.replicas = std::move(results);
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint I/O.

namespace {

constexpr char kMagic[4] = {'K', 'G', 'E', 'E'};

void PutLittleEndian(std::string& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

std::uint64_t GetLittleEndian(const unsigned char* p, int bytes) {
  std::uint64_t value = 0;
  for (int i = 0; i < bytes; ++i) {
    value |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  }
  return value;
}

void AppendTable(std::string& out, const EmbeddingTable& table) {
  const auto values = table.values();
  PutLittleEndian(out, values.size() * sizeof(double), 8);
  out.reserve(out.size() + values.size() * sizeof(double));
  for (double v : values)
    PutLittleEndian(out, std::bit_cast<std::uint64_t>(v), 8);
}

nlohmann::json ConfigJson(const TrainConfig& c) {
  return {
      {"loss", LossKindName(c.loss)},
      {"gamma", c.gamma},
      {"eta", c.eta},
      {"lambda", c.lambda},
      {"optimizer", OptimizerKindName(c.optimizer)},
      {"lr", c.lr},
      {"batches", c.batches_per_epoch},
      {"batch_size", c.batch_size},
      {"max_epochs", c.max_epochs},
      {"valid_every", c.valid_every},
      {"patience", c.patience},
      {"norm", c.norm_order},
      {"seed", c.seed},
      {"n3_init_scale", c.n3_init_scale},
  };
}

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}

  const unsigned char* Take(std::size_t n, const char* what) {
    if (data_.size() - pos_ < n) {
      throw DataError(std::string("corrupt checkpoint: truncated ") + what);
    }
    const auto* p = reinterpret_cast<const unsigned char*>(data_.data()) + pos_;
    pos_ += n;
    return p;
  }
  std::uint64_t Uint(int bytes, const char* what) {
    return GetLittleEndian(Take(bytes, what), bytes);
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  const std::string& data_;
  std::size_t pos_ = 0;
};

void ReadTable(Reader& reader, EmbeddingTable& table, const char* what) {
  const std::uint64_t bytes = reader.Uint(8, what);
  if (bytes != table.values().size() * sizeof(double)) {
    throw DataError(std::string("corrupt checkpoint: size mismatch in ") +
                    what);
  }
  const unsigned char* p = reader.Take(bytes, what);
  for (double& v : table.values()) {
    v = std::bit_cast<double>(GetLittleEndian(p, 8));
    p += 8;
  }
}

}  // namespace

void SaveCheckpoint(const EnsembleModel& model, const TrainConfig& config,
                    const std::filesystem::path& path) {
  ValidateEnsemble(model);
  std::string payload;
  for (const ModelParams& r : model.replicas) {
    AppendTable(payload, r.entities);
    AppendTable(payload, r.relations);
  }
  Fnv1a digest;
  digest.Update(std::as_bytes(std::span(payload.data(), payload.size())));

  const ModelParams& first = model.replicas.front();
  nlohmann::json seeds = nlohmann::json::array();
  for (const ModelParams& r : model.replicas) seeds.push_back(r.seed);
  const nlohmann::json meta = {
      {"kind", ModelKindName(first.kind)},
      {"d_l", first.dim},
      {"d", model.overall_dim()},
      {"k", model.k()},
      {"relation_dim", first.relations.width()},
      {"entities", first.entities.rows()},
      {"relations", first.relations.rows()},
      {"norm", first.norm_order},
      {"base_seed", model.base_seed},
      {"seeds", seeds},
      {"config_digest", model.config_digest},
      {"config", ConfigJson(config)},
      {"vocabulary_hash", model.vocabulary_hash},
      {"payload_fnv1a", digest.HexDigest()},
  };
  const std::string meta_text = meta.dump();

  std::string header(kMagic, sizeof(kMagic));
  PutLittleEndian(header, kCheckpointVersion, 2);
  PutLittleEndian(header, meta_text.size(), 8);
  header += meta_text;

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw DataError("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing checkpoint: " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  Reader reader(data);
  if (std::memcmp(reader.Take(4, "magic"), kMagic, 4) != 0) {
    throw DataError("not a checkpoint (bad magic): " + path.string());
  }
  const auto version = reader.Uint(2, "version");
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " +
                    std::to_string(version));
  }
  const auto meta_len = reader.Uint(8, "metadata length");
  const auto* meta_ptr = reader.Take(meta_len, "metadata");
  LoadedCheckpoint loaded;
  loaded.metadata_json.assign(reinterpret_cast<const char*>(meta_ptr),
                              meta_len);

  nlohmann::json meta;
  std::size_t k = 0, dim = 0, rel_dim = 0, entities = 0, relations = 0;
  int norm = 2;
  ModelKind kind;
  std::vector<std::uint64_t> seeds;
  std::string payload_digest;
  try {
    meta = nlohmann::json::parse(loaded.metadata_json);
    kind = ParseModelKind(meta.at("kind").get<std::string>());
    k = meta.at("k").get<std::size_t>();
    dim = meta.at("d_l").get<std::size_t>();
    rel_dim = meta.at("relation_dim").get<std::size_t>();
    entities = meta.at("entities").get<std::size_t>();
    relations = meta.at("relations").get<std::size_t>();
    norm = meta.at("norm").get<int>();
    seeds = meta.at("seeds").get<std::vector<std::uint64_t>>();
    payload_digest = meta.at("payload_fnv1a").get<std::string>();
    loaded.model.base_seed = meta.at("base_seed").get<std::uint64_t>();
    loaded.model.config_digest = meta.at("config_digest").get<std::string>();
    loaded.model.vocabulary_hash =
        meta.at("vocabulary_hash").get<std::string>();
  } catch (const std::exception& e) {
    throw DataError(std::string("corrupt checkpoint metadata: ") + e.what());
  }
  if (k == 0 || seeds.size() != k || rel_dim != RelationWidth(kind, dim)) {
    throw DataError("corrupt checkpoint: inconsistent metadata");
  }
  const std::uint64_t expected_payload =
      k * 2 * 8 + k * (entities * dim + relations * rel_dim) * sizeof(double);
  if (reader.remaining() != expected_payload) {
    throw DataError("corrupt checkpoint: payload is " +
                    std::to_string(reader.remaining()) + " bytes, expected " +
                    std::to_string(expected_payload));
  }
  Fnv1a digest;
  digest.Update(std::as_bytes(
      std::span(data.data() + reader.position(), reader.remaining())));
  if (digest.HexDigest() != payload_digest) {
    throw DataError("corrupt checkpoint: payload digest mismatch");
  }

  for (std::size_t j = 0; j < k; ++j) {
    ModelParams p;
    p.kind = kind;
    p.norm_order = norm;
    p.dim = dim;
    p.seed = seeds[j];
    p.entities = EmbeddingTable(entities, dim);
    p.relations = EmbeddingTable(relations, rel_dim);
    ReadTable(reader, p.entities, "entity table");
    ReadTable(reader, p.relations, "relation table");
    loaded.model.replicas.push_back(std::move(p));
  }
  return loaded;
}

void CheckVocabulary(const EnsembleModel& model, const Dataset& dataset) {
  const std::string hash = dataset.vocabulary.Hash();
  if (hash != model.vocabulary_hash) {
    throw DataError("checkpoint vocabulary hash " + model.vocabulary_hash +
                    " does not match dataset vocabulary hash " + hash);
  }
}

}  // namespace kge
