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

#include "kge/report.h"

#include "json.hpp"

namespace kge {

std::string DisplayName(ModelKind kind, std::size_t k) {
  std::string base;
  switch (kind) {
    case ModelKind::kTransE:
      base = "TransE";
      break;
    case ModelKind::kRotatE:
      base = "RotatE";
      break;
    case ModelKind::kDistMult:
      base = "DistMult";
      break;
    case ModelKind::kComplEx:
      base = "ComplEx";
      break;
    case ModelKind::kDistMultN3:
      base = "DistMultN3";
      break;
    case ModelKind::kComplExN3:
      base = "ComplExN3";
      break;
  }
  return k > 1 ? "M" + base : base;
}

namespace {

nlohmann::json MetricsObject(const MetricsReport& report, bool include_ranks,
                             const Vocabulary* vocab) {
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [n, value] : report.hits) hits[std::to_string(n)] = value;
  nlohmann::json out = {
      {"mrr", report.mrr}, {"hits", hits}, {"count", report.ranks.size()}};
  if (include_ranks) {
    nlohmann::json ranks = nlohmann::json::array();
    for (const RankResult& r : report.ranks) {
      nlohmann::json row = {{"left_rank", r.left_rank},
                            {"right_rank", r.right_rank}};
      if (vocab != nullptr) {
        row["head"] = vocab->entities.Name(r.triple.head);
        row["relation"] = vocab->relations.Name(r.triple.relation);
        row["tail"] = vocab->entities.Name(r.triple.tail);
      } else {
        row["head"] = r.triple.head;
        row["relation"] = r.triple.relation;
        row["tail"] = r.triple.tail;
      }
      ranks.push_back(std::move(row));
    }
    out["ranks"] = std::move(ranks);
  }
  return out;
}

nlohmann::json SummaryObject(const MetricSummary& s) {
  return {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

std::string MetricsJson(const MetricsReport& report, bool include_ranks,
                        const Vocabulary* vocab, int indent) {
  return MetricsObject(report, include_ranks, vocab).dump(indent);
}

std::string RepeatedRunJson(const RepeatedRunReport& report, int indent) {
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [n, s] : report.hits)
    hits[std::to_string(n)] = SummaryObject(s);
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs)
    runs.push_back(MetricsObject(r, false, nullptr));
  nlohmann::json out = {{"mrr", SummaryObject(report.mrr)},
                        {"hits", hits},
                        {"runs", runs},
                        {"single_run", report.single_run}};
  return out.dump(indent);
}

void WriteSummaryCsv(std::span<const SummaryRow> rows, std::ostream& out) {
  out << "model,kind,d_l,k,d,seed_count,mrr_mean,mrr_std";
  for (int n : kDefaultHitsAt)
    out << ",hits" << n << "_mean,hits" << n << "_std";
  out << '\n';
  const auto precision = out.precision(8);
  for (const SummaryRow& row : rows) {
    out << DisplayName(row.kind, row.k) << ',' << ModelKindName(row.kind) << ','
        << row.replica_dim << ',' << row.k << ',' << row.k * row.replica_dim
        << ',' << row.runs.runs.size() << ',' << row.runs.mrr.mean << ','
        << row.runs.mrr.stddev;
    for (int n : kDefaultHitsAt) {
      auto it = row.runs.hits.find(n);
      if (it == row.runs.hits.end()) {
        out << ",,";
      } else {
        out << ',' << it->second.mean << ',' << it->second.stddev;
      }
    }
    out << '\n';
  }
  out.precision(precision);
}

void WriteCategoriesCsv(std::span<const RelationCategory> categories,
                        const Vocabulary& vocab, std::ostream& out) {
  out << "relation,category,avg_tails_per_head,avg_heads_per_tail\n";
  const auto precision = out.precision(8);
  for (const auto& c : categories) {
    out << vocab.relations.Name(c.relation) << ',' << CategoryName(c.category)
        << ',' << c.tails_per_head << ',' << c.heads_per_tail << '\n';
  }
  out.precision(precision);
}

void WriteRulesCsv(std::span<const SymmetricRule> rules,
                   const Vocabulary& vocab, std::ostream& out) {
  out << "relation,support,confidence\n";
  const auto precision = out.precision(8);
  for (const auto& r : rules) {
    out << vocab.relations.Name(r.relation) << ',' << r.support << ','
        << r.confidence << '\n';
  }
  out.precision(precision);
}

void WritePerCategoryCsv(std::span<const CategoryRow> rows, std::ostream& out) {
  out << "category,triples,mrr";
  for (int n : kDefaultHitsAt) out << ",hits" << n;
  out << '\n';
  const auto precision = out.precision(8);
  for (const auto& row : rows) {
    out << row.name << ',' << row.triples << ',';
    if (row.metrics) {
      out << row.metrics->mrr;
      for (int n : kDefaultHitsAt) out << ',' << row.metrics->hits.at(n);
    } else {
      for (std::size_t i = 0; i < std::size(kDefaultHitsAt); ++i) out << ',';
    }
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace kge
