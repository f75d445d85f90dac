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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "kge/errors.h"

namespace kge {

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTransE:
      return "transe";
    case ModelKind::kRotatE:
      return "rotate";
    case ModelKind::kDistMult:
      return "distmult";
    case ModelKind::kComplEx:
      return "complex";
    case ModelKind::kDistMultN3:
      return "distmultn3";
    case ModelKind::kComplExN3:
      return "complexn3";
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (ModelKind kind : kAllModelKinds) {
    if (ModelKindName(kind) == lower) return kind;
  }
  throw ConfigError("unknown model kind: " + std::string(name));
}

bool IsComplexGeometry(ModelKind kind) {
  return kind == ModelKind::kRotatE || kind == ModelKind::kComplEx ||
         kind == ModelKind::kComplExN3;
}

bool IsN3Kind(ModelKind kind) {
  return kind == ModelKind::kDistMultN3 || kind == ModelKind::kComplExN3;
}

std::size_t RelationWidth(ModelKind kind, std::size_t dim) {
  return kind == ModelKind::kRotatE ? dim / 2 : dim;
}

EmbeddingTable XavierInit(std::size_t rows, std::size_t width, InitMode mode,
                          std::mt19937_64& rng, double scale) {
  if (rows == 0 || width == 0) {
    throw ConfigError("embedding table needs at least one row and column");
  }
  EmbeddingTable table(rows, width);
  const double fan = static_cast<double>(width);
  if (mode == InitMode::kUniform) {
    const double bound = std::sqrt(6.0 / fan);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : table.values()) v = scale * dist(rng);
  } else {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan));
    for (double& v : table.values()) v = scale * dist(rng);
  }
  return table;
}

ModelParams InitModel(ModelKind kind, std::size_t entities,
                      std::size_t relations, std::size_t dim,
                      std::uint64_t seed, int norm_order,
                      double n3_init_scale) {
  if (dim == 0) throw ConfigError("embedding size must be positive");
  if (IsComplexGeometry(kind) && dim % 2 != 0) {
    throw ConfigError("odd size for complex geometry: " + std::to_string(dim) +
                      " (" + std::string(ModelKindName(kind)) +
                      " needs an even embedding size)");
  }
  if (norm_order != 1 && norm_order != 2) {
    throw ConfigError("norm order must be 1 or 2");
  }

  InitMode mode = InitMode::kUniform;
  double scale = 1.0;
  switch (kind) {
    case ModelKind::kTransE:
    case ModelKind::kRotatE:
      mode = InitMode::kNormal;
      break;
    case ModelKind::kDistMult:
    case ModelKind::kComplEx:
      break;
    case ModelKind::kDistMultN3:
    case ModelKind::kComplExN3:
      scale = n3_init_scale;
      break;
  }

  std::mt19937_64 rng(seed);
  ModelParams params;
  params.kind = kind;
  params.norm_order = norm_order;
  params.dim = dim;
  params.seed = seed;
  params.entities = XavierInit(entities, dim, mode, rng, scale);
  params.relations =
      XavierInit(relations, RelationWidth(kind, dim), mode, rng, scale);
  return params;
}

}  // namespace kge
