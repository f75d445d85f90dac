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

#ifndef KGE_PATTERNS_H_
#define KGE_PATTERNS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kge/dataset.h"
#include "kge/evaluation.h"

namespace kge {

enum class RelationCategoryKind { kOneToOne, kOneToN, kNToOne, kNToN };

inline constexpr std::array<RelationCategoryKind, 4> kAllCategories = {
    RelationCategoryKind::kOneToOne, RelationCategoryKind::kOneToN,
    RelationCategoryKind::kNToOne, RelationCategoryKind::kNToN};

std::string_view CategoryName(RelationCategoryKind kind);  // "1-1", ...

inline constexpr double kDefaultCategoryThreshold = 1.5;

struct RelationCategory {
  RelationId relation = 0;
  RelationCategoryKind category = RelationCategoryKind::kOneToOne;
  double tails_per_head = 1.0;
  double heads_per_tail = 1.0;
  // Distinct (head, tail) pairs seen in the input.
  std::size_t pairs = 0;
};

// One entry per relation id in [0, num_relations). Averages count distinct
// (head, tail) pairs; relations absent from `train` report 1.0 / 1.0 and
// land in 1-1 with pairs == 0.
std::vector<RelationCategory> CategorizeRelations(
    std::span<const Triple> train, std::size_t num_relations,
    double threshold = kDefaultCategoryThreshold);

struct SymmetricRule {
  RelationId relation = 0;
  std::size_t support = 0;  // distinct (x, y) pairs
  double confidence = 0.0;  // share of pairs whose reverse also holds
};

inline constexpr double kDefaultSymmetricConfidence = 0.8;
inline constexpr std::size_t kDefaultMinSupport = 10;

// Confidence of r(x, y) => r(y, x) for every relation; keeps relations with
// confidence >= threshold and support >= min_support, sorted by confidence
// (descending), then relation id.
std::vector<SymmetricRule> MineSymmetric(
    std::span<const Triple> train,
    double confidence_threshold = kDefaultSymmetricConfidence,
    std::size_t min_support = kDefaultMinSupport);

struct CategoryRow {
  std::string name;  // "1-1", "1-n", "n-1", "n-n" or "symmetric"
  std::size_t triples = 0;
  // Empty when no test triple falls in the row.
  std::optional<MetricsReport> metrics;
};

// Four category rows followed by the symmetric row. A relation may count
// towards both its category row and the symmetric row.
std::vector<CategoryRow> PerCategoryReport(
    std::span<const RankResult> ranks,
    std::span<const RelationCategory> categories,
    std::span<const SymmetricRule> symmetric_rules);

}  // namespace kge

#endif  // KGE_PATTERNS_H_
