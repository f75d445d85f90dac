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

#include "kge/patterns.h"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace kge {

std::string_view CategoryName(RelationCategoryKind kind) {
  switch (kind) {
    case RelationCategoryKind::kOneToOne:
      return "1-1";
    case RelationCategoryKind::kOneToN:
      return "1-n";
    case RelationCategoryKind::kNToOne:
      return "n-1";
    case RelationCategoryKind::kNToN:
      return "n-n";
  }
  return "?";
}

namespace {

std::uint64_t PairKey(EntityId a, EntityId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Distinct (head, tail) pairs per relation.
std::vector<std::unordered_set<std::uint64_t>> PairsByRelation(
    std::span<const Triple> triples, std::size_t num_relations) {
  std::vector<std::unordered_set<std::uint64_t>> pairs(num_relations);
  for (const Triple& t : triples) {
    if (t.relation >= pairs.size()) pairs.resize(t.relation + 1);
    pairs[t.relation].insert(PairKey(t.head, t.tail));
  }
  return pairs;
}

}  // namespace

std::vector<RelationCategory> CategorizeRelations(std::span<const Triple> train,
                                                  std::size_t num_relations,
                                                  double threshold) {
  const auto pairs = PairsByRelation(train, num_relations);
  std::vector<RelationCategory> out;
  out.reserve(pairs.size());
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    RelationCategory cat;
    cat.relation = static_cast<RelationId>(r);
    cat.pairs = pairs[r].size();
    if (cat.pairs > 0) {
      std::unordered_set<EntityId> heads, tails;
      for (std::uint64_t key : pairs[r]) {
        heads.insert(static_cast<EntityId>(key >> 32));
        tails.insert(static_cast<EntityId>(key & 0xffffffffu));
      }
      cat.tails_per_head = static_cast<double>(cat.pairs) / heads.size();
      cat.heads_per_tail = static_cast<double>(cat.pairs) / tails.size();
    }
    const bool many_tails = cat.tails_per_head >= threshold;
    const bool many_heads = cat.heads_per_tail >= threshold;
    if (many_tails && many_heads) {
      cat.category = RelationCategoryKind::kNToN;
    } else if (many_tails) {
      cat.category = RelationCategoryKind::kOneToN;
    } else if (many_heads) {
      cat.category = RelationCategoryKind::kNToOne;
    } else {
      cat.category = RelationCategoryKind::kOneToOne;
    }
    out.push_back(cat);
  }
  return out;
}

std::vector<SymmetricRule> MineSymmetric(std::span<const Triple> train,
                                         double confidence_threshold,
                                         std::size_t min_support) {
  const auto pairs = PairsByRelation(train, 0);
  std::vector<SymmetricRule> rules;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    if (pairs[r].empty()) continue;
    std::size_t reversed = 0;
    for (std::uint64_t key : pairs[r]) {
      const auto head = static_cast<EntityId>(key >> 32);
      const auto tail = static_cast<EntityId>(key & 0xffffffffu);
      if (pairs[r].contains(PairKey(tail, head))) ++reversed;
    }
    SymmetricRule rule;
    rule.relation = static_cast<RelationId>(r);
    rule.support = pairs[r].size();
    rule.confidence =
        static_cast<double>(reversed) / static_cast<double>(rule.support);
    if (rule.confidence >= confidence_threshold &&
        rule.support >= min_support) {
      rules.push_back(rule);
    }
  }
  std::sort(rules.begin(), rules.end(),
            [](const SymmetricRule& a, const SymmetricRule& b) {
              if (a.confidence != b.confidence) {
                return a.confidence > b.confidence;
              }
              return a.relation < b.relation;
            });
  return rules;
}

std::vector<CategoryRow> PerCategoryReport(
    std::span<const RankResult> ranks,
    std::span<const RelationCategory> categories,
    std::span<const SymmetricRule> symmetric_rules) {
  std::unordered_map<RelationId, RelationCategoryKind> category_of;
  for (const auto& c : categories) category_of[c.relation] = c.category;
  std::unordered_set<RelationId> symmetric;
  for (const auto& rule : symmetric_rules) symmetric.insert(rule.relation);

  std::array<std::vector<RankResult>, 4> by_category;
  std::vector<RankResult> symmetric_ranks;
  for (const RankResult& r : ranks) {
    auto it = category_of.find(r.triple.relation);
    if (it != category_of.end()) {
      by_category[static_cast<std::size_t>(it->second)].push_back(r);
    }
    if (symmetric.contains(r.triple.relation)) symmetric_ranks.push_back(r);
  }

  auto row = [](std::string name, std::vector<RankResult> rows) {
    CategoryRow out;
    out.name = std::move(name);
    out.triples = rows.size();
    if (!rows.empty()) out.metrics = MetricsFromRanks(std::move(rows));
    return out;
  };
  std::vector<CategoryRow> table;
  for (RelationCategoryKind kind : kAllCategories) {
    table.push_back(
        row(std::string(CategoryName(kind)),
            std::move(by_category[static_cast<std::size_t>(kind)])));
  }
  table.push_back(row("symmetric", std::move(symmetric_ranks)));
  return table;
}

}  // namespace kge
