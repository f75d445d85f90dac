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

#ifndef KGE_EMBEDDING_H_
#define KGE_EMBEDDING_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace kge {

enum class ModelKind {
  kTransE,
  kRotatE,
  kDistMult,
  kComplEx,
  kDistMultN3,
  kComplExN3,
};

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::kTransE,  ModelKind::kRotatE,     ModelKind::kDistMult,
    ModelKind::kComplEx, ModelKind::kDistMultN3, ModelKind::kComplExN3,
};

// Lower-case names: transe, rotate, distmult, complex, distmultn3, complexn3.
std::string_view ModelKindName(ModelKind kind);
// Case-insensitive inverse of ModelKindName. Throws ConfigError.
ModelKind ParseModelKind(std::string_view name);

// Two real scalars per coordinate; rows store all real parts, then all
// imaginary parts.
bool IsComplexGeometry(ModelKind kind);
// Kinds trained with the full-softmax loss and N3 penalty.
bool IsN3Kind(ModelKind kind);
// Scalars per relation row for an embedding size `dim`. RotatE stores one
// phase angle per complex coordinate.
std::size_t RelationWidth(ModelKind kind, std::size_t dim);

// Dense row-major matrix of doubles.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t rows, std::size_t width)
      : rows_(rows), width_(width), values_(rows * width, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t width() const { return width_; }

  std::span<double> Row(std::size_t row) {
    return {values_.data() + row * width_, width_};
  }
  std::span<const double> Row(std::size_t row) const {
    return {values_.data() + row * width_, width_};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const EmbeddingTable&,
                         const EmbeddingTable&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

enum class InitMode { kUniform, kNormal };

// Xavier fill with fan_in = width and fan_out = 0: U(-a, a) with
// a = sqrt(6 / width), or N(0, s^2) with s = sqrt(2 / width). Every value is
// multiplied by `scale`. Throws ConfigError when rows or width is zero.
EmbeddingTable XavierInit(std::size_t rows, std::size_t width, InitMode mode,
                          std::mt19937_64& rng, double scale = 1.0);

struct ModelParams {
  ModelKind kind = ModelKind::kTransE;
  // Norm order of the TransE distance (1 or 2). Unused by other kinds.
  int norm_order = 2;
  // Adjustable scalars per entity embedding.
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  EmbeddingTable entities;
  EmbeddingTable relations;

  std::size_t relation_dim() const { return relations.width(); }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Scale applied to the uniform Xavier fill of the N3 kinds.
inline constexpr double kDefaultN3InitScale = 0.1;

// TransE and RotatE use the normal fill, the semantic matching kinds the
// uniform one; N3 kinds are further scaled by `n3_init_scale`. The entity
// table is drawn before the relation table from one generator seeded with
// `seed`. Throws ConfigError for odd `dim` on complex kinds or zero sizes.
ModelParams InitModel(ModelKind kind, std::size_t entities,
                      std::size_t relations, std::size_t dim,
                      std::uint64_t seed, int norm_order = 2,
                      double n3_init_scale = kDefaultN3InitScale);

}  // namespace kge

#endif  // KGE_EMBEDDING_H_
