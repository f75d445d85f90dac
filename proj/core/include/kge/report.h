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

#ifndef KGE_REPORT_H_
#define KGE_REPORT_H_

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kge/dataset.h"
#include "kge/embedding.h"
#include "kge/evaluation.h"
#include "kge/patterns.h"

namespace kge {

// "TransE" for k == 1, "MTransE" for an ensemble.
std::string DisplayName(ModelKind kind, std::size_t k);

// {"mrr": .., "hits": {"1": .., ...}, "count": n[, "ranks": [...]]}
std::string MetricsJson(const MetricsReport& report, bool include_ranks,
                        const Vocabulary* vocab = nullptr, int indent = 2);

// Mean/std per metric plus every run.
std::string RepeatedRunJson(const RepeatedRunReport& report, int indent = 2);

struct SummaryRow {
  ModelKind kind = ModelKind::kTransE;
  std::size_t replica_dim = 0;
  std::size_t k = 1;
  RepeatedRunReport runs;
};

// model,kind,d_l,k,d,seed_count,mrr_mean,mrr_std,hits1_mean,hits1_std,...
void WriteSummaryCsv(std::span<const SummaryRow> rows, std::ostream& out);

// relation,category,avg_tails_per_head,avg_heads_per_tail
void WriteCategoriesCsv(std::span<const RelationCategory> categories,
                        const Vocabulary& vocab, std::ostream& out);

// relation,support,confidence
void WriteRulesCsv(std::span<const SymmetricRule> rules,
                   const Vocabulary& vocab, std::ostream& out);

// category,triples,mrr,hits1,hits3,hits10 (metric cells blank for empty rows)
void WritePerCategoryCsv(std::span<const CategoryRow> rows, std::ostream& out);

}  // namespace kge

#endif  // KGE_REPORT_H_
