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

#ifndef KGE_DATASET_H_
#define KGE_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kge {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t x = (static_cast<std::uint64_t>(t.head) << 32) ^
                      (static_cast<std::uint64_t>(t.relation) << 16) ^ t.tail;
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

// Dense, bidirectional name <-> id mapping for one symbol class.
class NameTable {
 public:
  // Returns the id of `name`, assigning the next dense id on first sight.
  std::uint32_t Intern(std::string_view name);
  // Throws std::out_of_range for unknown names.
  std::uint32_t Lookup(std::string_view name) const;
  bool Contains(std::string_view name) const;
  const std::string& Name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Vocabulary {
  NameTable entities;
  NameTable relations;

  std::size_t num_entities() const { return entities.size(); }
  std::size_t num_relations() const { return relations.size(); }

  // FNV-1a digest over all names in id order, as 16 hex digits. Two datasets
  // share a hash exactly when their id assignments agree.
  std::string Hash() const;
};

// Counters collected while loading; nothing here aborts a load.
struct LoadReport {
  std::size_t duplicates_dropped = 0;      // within-split repeats
  std::size_t cross_split_duplicates = 0;  // same triple in two splits
  std::size_t cold_start_entities = 0;     // first seen in valid/test
  std::size_t cold_start_relations = 0;
  std::vector<std::string> warnings;
};

struct Dataset {
  Vocabulary vocabulary;
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  LoadReport report;

  std::size_t num_entities() const { return vocabulary.num_entities(); }
  std::size_t num_relations() const { return vocabulary.num_relations(); }
};

// Reads `<directory>/{train,valid,test}.txt` (head<TAB>relation<TAB>tail).
// Ids are assigned in order of first appearance over train, valid, test.
// Throws DataError on a missing file or a line without exactly three fields.
Dataset LoadDataset(const std::filesystem::path& directory);

// Writes the three split files in the same format LoadDataset reads.
void WriteDataset(const Dataset& dataset,
                  const std::filesystem::path& directory);

// Throws DataError if any triple references an id outside the vocabulary.
void ValidateDataset(const Dataset& dataset);

// Filtered-setting lookup over train + valid + test.
class FilterIndex {
 public:
  FilterIndex() = default;
  explicit FilterIndex(const Dataset& dataset);

  // Known tails for (head, relation); empty set when none.
  const std::unordered_set<EntityId>& TailsOf(EntityId head,
                                              RelationId relation) const;
  const std::unordered_set<EntityId>& HeadsOf(RelationId relation,
                                              EntityId tail) const;
  bool Contains(const Triple& triple) const;

 private:
  static std::uint64_t Key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  std::unordered_map<std::uint64_t, std::unordered_set<EntityId>> tails_by_hr_;
  std::unordered_map<std::uint64_t, std::unordered_set<EntityId>> heads_by_rt_;
};

inline FilterIndex BuildFilterIndex(const Dataset& dataset) {
  return FilterIndex(dataset);
}

enum class SyntheticPattern { kSymmetric, kOneToN, kNToOne, kNToN, kMixed };

SyntheticPattern ParseSyntheticPattern(std::string_view name);
std::string_view SyntheticPatternName(SyntheticPattern pattern);

struct SyntheticSpec {
  SyntheticPattern pattern = SyntheticPattern::kMixed;
  std::size_t entities = 200;
  // Symmetric: number of unordered pairs (2 triples each).
  std::size_t pairs = 0;
  // Other patterns: target triple count. For 1-n / n-1 this must be a
  // multiple of `fan`, for n-n a multiple of fan * fan.
  std::size_t triples = 0;
  std::size_t fan = 3;
  double valid_fraction = 0.1;
  double test_fraction = 0.1;
};

// Deterministic in (spec, seed). Every entity id 0..entities-1 is present in
// the vocabulary as "e<i>". Throws ConfigError for infeasible specs.
Dataset GenerateSynthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace kge

#endif  // KGE_DATASET_H_
