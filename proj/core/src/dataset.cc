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

#include "kge/dataset.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kge/errors.h"
#include "kge/hash.h"

namespace kge {

std::uint32_t NameTable::Intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::uint32_t NameTable::Lookup(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) {
    throw std::out_of_range("unknown name: " + std::string(name));
  }
  return it->second;
}

bool NameTable::Contains(std::string_view name) const {
  return ids_.contains(std::string(name));
}

std::string Vocabulary::Hash() const {
  Fnv1a hasher;
  hasher.Update(std::to_string(entities.size()));
  hasher.Update("\x1e");
  for (const auto& name : entities.names()) {
    hasher.Update(name);
    hasher.Update("\x1f");
  }
  hasher.Update("\x1e");
  for (const auto& name : relations.names()) {
    hasher.Update(name);
    hasher.Update("\x1f");
  }
  return hasher.HexDigest();
}

namespace {

constexpr std::array<const char*, 3> kSplitFiles = {"train.txt", "valid.txt",
                                                    "test.txt"};

std::string_view TrimLineEnd(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
    line.remove_suffix(1);
  }
  return line;
}

std::vector<Triple> ReadSplit(const std::filesystem::path& file, bool is_train,
                              Vocabulary& vocab, LoadReport& report) {
  std::ifstream in(file);
  if (!in) throw DataError("missing dataset file: " + file.string());

  std::vector<Triple> triples;
  std::unordered_set<Triple, TripleHash> seen;
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const std::string_view line = TrimLineEnd(raw);
    if (line.empty()) continue;

    std::array<std::string_view, 3> fields;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      const std::string_view field =
          line.substr(start, tab == std::string_view::npos ? tab : tab - start);
      if (count < 3) fields[count] = field;
      ++count;
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (count != 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      std::ostringstream msg;
      msg << "malformed line " << file.string() << ":" << line_number
          << ": expected 3 tab-separated fields, got " << count;
      throw DataError(msg.str());
    }

    const std::size_t entities_before = vocab.entities.size();
    const std::size_t relations_before = vocab.relations.size();
    Triple t{vocab.entities.Intern(fields[0]),
             vocab.relations.Intern(fields[1]),
             vocab.entities.Intern(fields[2])};
    if (!is_train) {
      report.cold_start_entities += vocab.entities.size() - entities_before;
      report.cold_start_relations += vocab.relations.size() - relations_before;
    }
    if (!seen.insert(t).second) {
      ++report.duplicates_dropped;
      continue;
    }
    triples.push_back(t);
  }
  return triples;
}

std::size_t CountOverlap(const std::vector<Triple>& a,
                         const std::vector<Triple>& b) {
  std::unordered_set<Triple, TripleHash> set(a.begin(), a.end());
  return static_cast<std::size_t>(std::count_if(
      b.begin(), b.end(), [&](const Triple& t) { return set.contains(t); }));
}

}  // namespace

Dataset LoadDataset(const std::filesystem::path& directory) {
  for (const char* name : kSplitFiles) {
    if (!std::filesystem::is_regular_file(directory / name)) {
      throw DataError("missing dataset file: " + (directory / name).string());
    }
  }
  Dataset dataset;
  auto& report = dataset.report;
  dataset.train =
      ReadSplit(directory / kSplitFiles[0], true, dataset.vocabulary, report);
  dataset.valid =
      ReadSplit(directory / kSplitFiles[1], false, dataset.vocabulary, report);
  dataset.test =
      ReadSplit(directory / kSplitFiles[2], false, dataset.vocabulary, report);

  report.cross_split_duplicates = CountOverlap(dataset.train, dataset.valid) +
                                  CountOverlap(dataset.train, dataset.test) +
                                  CountOverlap(dataset.valid, dataset.test);
  if (report.duplicates_dropped > 0) {
    report.warnings.push_back("dropped " +
                              std::to_string(report.duplicates_dropped) +
                              " duplicate triples within splits");
  }
  if (report.cross_split_duplicates > 0) {
    report.warnings.push_back(std::to_string(report.cross_split_duplicates) +
                              " triples appear in more than one split");
  }
  if (report.cold_start_entities > 0 || report.cold_start_relations > 0) {
    report.warnings.push_back(std::to_string(report.cold_start_entities) +
                              " entities and " +
                              std::to_string(report.cold_start_relations) +
                              " relations appear only in valid/test");
  }
  return dataset;
}

void WriteDataset(const Dataset& dataset,
                  const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const std::array<const std::vector<Triple>*, 3> splits = {
      &dataset.train, &dataset.valid, &dataset.test};
  const auto& vocab = dataset.vocabulary;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    std::ofstream out(directory / kSplitFiles[i], std::ios::binary);
    if (!out) {
      throw DataError("cannot write " + (directory / kSplitFiles[i]).string());
    }
    for (const Triple& t : *splits[i]) {
      out << vocab.entities.Name(t.head) << '\t'
          << vocab.relations.Name(t.relation) << '\t'
          << vocab.entities.Name(t.tail) << '\n';
    }
  }
}

void ValidateDataset(const Dataset& dataset) {
  const auto entities = dataset.num_entities();
  const auto relations = dataset.num_relations();
  for (const auto* split : {&dataset.train, &dataset.valid, &dataset.test}) {
    for (const Triple& t : *split) {
      if (t.head >= entities || t.tail >= entities || t.relation >= relations) {
        throw DataError("triple references an id outside the vocabulary");
      }
    }
  }
}

FilterIndex::FilterIndex(const Dataset& dataset) {
  for (const auto* split : {&dataset.train, &dataset.valid, &dataset.test}) {
    for (const Triple& t : *split) {
      tails_by_hr_[Key(t.head, t.relation)].insert(t.tail);
      heads_by_rt_[Key(t.relation, t.tail)].insert(t.head);
    }
  }
}

namespace {
const std::unordered_set<EntityId>& EmptySet() {
  static const std::unordered_set<EntityId> empty;
  return empty;
}
}  // namespace

const std::unordered_set<EntityId>& FilterIndex::TailsOf(
    EntityId head, RelationId relation) const {
  auto it = tails_by_hr_.find(Key(head, relation));
  return it == tails_by_hr_.end() ? EmptySet() : it->second;
}

const std::unordered_set<EntityId>& FilterIndex::HeadsOf(RelationId relation,
                                                         EntityId tail) const {
  auto it = heads_by_rt_.find(Key(relation, tail));
  return it == heads_by_rt_.end() ? EmptySet() : it->second;
}

bool FilterIndex::Contains(const Triple& triple) const {
  return TailsOf(triple.head, triple.relation).contains(triple.tail);
}

// ---------------------------------------------------------------------------
// Synthetic generation.

SyntheticPattern ParseSyntheticPattern(std::string_view name) {
  if (name == "symmetric") return SyntheticPattern::kSymmetric;
  if (name == "1-n") return SyntheticPattern::kOneToN;
  if (name == "n-1") return SyntheticPattern::kNToOne;
  if (name == "n-n") return SyntheticPattern::kNToN;
  if (name == "mixed") return SyntheticPattern::kMixed;
  throw ConfigError("unknown synthetic pattern: " + std::string(name));
}

std::string_view SyntheticPatternName(SyntheticPattern pattern) {
  switch (pattern) {
    case SyntheticPattern::kSymmetric:
      return "symmetric";
    case SyntheticPattern::kOneToN:
      return "1-n";
    case SyntheticPattern::kNToOne:
      return "n-1";
    case SyntheticPattern::kNToN:
      return "n-n";
    case SyntheticPattern::kMixed:
      return "mixed";
  }
  return "unknown";
}

namespace {

using Rng = std::mt19937_64;

std::vector<EntityId> ShuffledEntities(std::size_t count, Rng& rng) {
  std::vector<EntityId> ids(count);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  return ids;
}

[[noreturn]] void Infeasible(const std::string& why) {
  throw ConfigError("infeasible synthetic spec: " + why);
}

std::vector<Triple> SymmetricTriples(const SyntheticSpec& spec, RelationId rel,
                                     Rng& rng) {
  const std::size_t n = spec.entities;
  const std::size_t capacity = n * (n - 1) / 2;
  if (spec.pairs == 0) Infeasible("symmetric pattern needs pairs >= 1");
  if (spec.pairs > capacity) {
    Infeasible(std::to_string(spec.pairs) + " pairs exceed the " +
               std::to_string(capacity) + " available among " +
               std::to_string(n) + " entities");
  }
  std::vector<std::pair<EntityId, EntityId>> chosen;
  if (capacity <= (1u << 22)) {
    std::vector<std::pair<EntityId, EntityId>> all;
    all.reserve(capacity);
    for (EntityId a = 0; a < n; ++a) {
      for (EntityId b = a + 1; b < n; ++b) all.emplace_back(a, b);
    }
    std::shuffle(all.begin(), all.end(), rng);
    chosen.assign(all.begin(), all.begin() + spec.pairs);
  } else {
    std::unordered_set<std::uint64_t> seen;
    std::uniform_int_distribution<EntityId> pick(0,
                                                 static_cast<EntityId>(n - 1));
    while (chosen.size() < spec.pairs) {
      EntityId a = pick(rng), b = pick(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (seen.insert((static_cast<std::uint64_t>(a) << 32) | b).second) {
        chosen.emplace_back(a, b);
      }
    }
  }
  std::vector<Triple> triples;
  triples.reserve(2 * chosen.size());
  for (auto [a, b] : chosen) {
    triples.push_back({a, rel, b});
    triples.push_back({b, rel, a});
  }
  return triples;
}

// One anchor entity linked to `fan` distinct partners per group; no entity is
// reused across groups.
std::vector<Triple> FanTriples(const SyntheticSpec& spec, bool anchor_is_tail,
                               RelationId rel, Rng& rng) {
  const std::size_t fan = spec.fan;
  if (spec.triples == 0 || spec.triples % fan != 0) {
    Infeasible("triple count must be a positive multiple of fan");
  }
  const std::size_t groups = spec.triples / fan;
  if (groups * (fan + 1) > spec.entities) {
    Infeasible(std::to_string(groups) + " groups of " +
               std::to_string(fan + 1) + " entities exceed " +
               std::to_string(spec.entities) + " entities");
  }
  const auto ids = ShuffledEntities(spec.entities, rng);
  std::vector<Triple> triples;
  triples.reserve(spec.triples);
  for (std::size_t g = 0; g < groups; ++g) {
    const EntityId anchor = ids[g];
    for (std::size_t i = 0; i < fan; ++i) {
      const EntityId other = ids[groups + g * fan + i];
      triples.push_back(anchor_is_tail ? Triple{other, rel, anchor}
                                       : Triple{anchor, rel, other});
    }
  }
  return triples;
}

std::vector<Triple> BipartiteTriples(const SyntheticSpec& spec, RelationId rel,
                                     Rng& rng) {
  const std::size_t fan = spec.fan;
  const std::size_t block = fan * fan;
  if (spec.triples == 0 || spec.triples % block != 0) {
    Infeasible("triple count must be a positive multiple of fan*fan");
  }
  const std::size_t groups = spec.triples / block;
  if (groups * 2 * fan > spec.entities) {
    Infeasible(std::to_string(groups) + " blocks of " +
               std::to_string(2 * fan) + " entities exceed " +
               std::to_string(spec.entities) + " entities");
  }
  const auto ids = ShuffledEntities(spec.entities, rng);
  std::vector<Triple> triples;
  triples.reserve(spec.triples);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t base = g * 2 * fan;
    for (std::size_t i = 0; i < fan; ++i) {
      for (std::size_t j = 0; j < fan; ++j) {
        triples.push_back({ids[base + i], rel, ids[base + fan + j]});
      }
    }
  }
  return triples;
}

// Clusters of one hub plus `fan` members, tied together by relations of every
// category so that held-out triples remain inferable from training triples.
std::vector<Triple> MixedTriples(const SyntheticSpec& spec, Rng& rng) {
  const std::size_t fan = spec.fan;
  const std::size_t clusters = spec.entities / (fan + 1);
  if (fan < 2 || clusters < 3) {
    Infeasible("mixed pattern needs fan >= 2 and at least 3 clusters of fan+1");
  }
  enum : RelationId {
    kMemberOf,   // n-1
    kHubOf,      // 1-n
    kPartner,    // 1-1
    kPartnerOf,  // 1-1
    kSibling,    // symmetric
    kLinked,     // n-n
  };
  const auto ids = ShuffledEntities(spec.entities, rng);
  auto hub = [&](std::size_t c) { return ids[c * (fan + 1)]; };
  auto member = [&](std::size_t c, std::size_t i) {
    return ids[c * (fan + 1) + 1 + i];
  };

  std::vector<Triple> all;
  for (std::size_t c = 0; c < clusters; ++c) {
    for (std::size_t i = 0; i < fan; ++i) {
      all.push_back({member(c, i), kMemberOf, hub(c)});
      all.push_back({hub(c), kHubOf, member(c, i)});
      for (std::size_t j = 0; j < fan; ++j) {
        if (i != j) all.push_back({member(c, i), kSibling, member(c, j)});
        all.push_back({member(c, i), kLinked, member((c + 1) % clusters, j)});
      }
    }
  }
  // Cyclic successor over a second random order: a bijection with no
  // two-cycles, hence 1-1 and never symmetric.
  const auto order = ShuffledEntities(spec.entities, rng);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const EntityId next = order[(i + 1) % order.size()];
    all.push_back({order[i], kPartner, next});
    all.push_back({next, kPartnerOf, order[i]});
  }

  if (spec.triples > all.size()) {
    Infeasible(std::to_string(spec.triples) + " triples exceed the " +
               std::to_string(all.size()) + " the mixed pattern yields for " +
               std::to_string(spec.entities) + " entities and fan " +
               std::to_string(fan));
  }
  if (spec.triples > 0 && spec.triples < all.size()) {
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(spec.triples);
  }
  return all;
}

}  // namespace

Dataset GenerateSynthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.entities < 2) Infeasible("need at least 2 entities");
  if (spec.fan < 1) Infeasible("fan must be >= 1");
  if (spec.valid_fraction < 0 || spec.test_fraction < 0 ||
      spec.valid_fraction + spec.test_fraction >= 1.0) {
    Infeasible("split fractions must be >= 0 and sum below 1");
  }
  Rng rng(seed);
  Dataset dataset;
  auto& vocab = dataset.vocabulary;
  for (std::size_t i = 0; i < spec.entities; ++i) {
    vocab.entities.Intern("e" + std::to_string(i));
  }

  std::vector<Triple> triples;
  switch (spec.pattern) {
    case SyntheticPattern::kSymmetric:
      vocab.relations.Intern("symmetric");
      triples = SymmetricTriples(spec, 0, rng);
      break;
    case SyntheticPattern::kOneToN:
      vocab.relations.Intern("one_to_n");
      triples = FanTriples(spec, /*anchor_is_tail=*/false, 0, rng);
      break;
    case SyntheticPattern::kNToOne:
      vocab.relations.Intern("n_to_one");
      triples = FanTriples(spec, /*anchor_is_tail=*/true, 0, rng);
      break;
    case SyntheticPattern::kNToN:
      vocab.relations.Intern("n_to_n");
      triples = BipartiteTriples(spec, 0, rng);
      break;
    case SyntheticPattern::kMixed:
      for (const char* name : {"member_of", "hub_of", "partner", "partner_of",
                               "sibling", "linked"}) {
        vocab.relations.Intern(name);
      }
      triples = MixedTriples(spec, rng);
      break;
  }

  std::shuffle(triples.begin(), triples.end(), rng);
  const auto total = triples.size();
  const auto n_test =
      static_cast<std::size_t>(static_cast<double>(total) * spec.test_fraction);
  const auto n_valid = static_cast<std::size_t>(static_cast<double>(total) *
                                                spec.valid_fraction);
  dataset.test.assign(triples.begin(), triples.begin() + n_test);
  dataset.valid.assign(triples.begin() + n_test,
                       triples.begin() + n_test + n_valid);
  dataset.train.assign(triples.begin() + n_test + n_valid, triples.end());
  return dataset;
}

}  // namespace kge
