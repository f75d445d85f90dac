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

#ifndef KGE_EVALUATION_H_
#define KGE_EVALUATION_H_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kge/dataset.h"
#include "kge/embedding.h"

namespace kge {

// Any triple -> score mapping; higher means more plausible. Must be safe to
// call concurrently.
using TripleScorer = std::function<double(const Triple&)>;

TripleScorer MakeScorer(const ModelParams& params);

// Ranks use the mean-tie convention, 1 + #better + #tied / 2, so they are
// half-integers.
struct RankResult {
  Triple triple;
  double left_rank = 1.0;   // head corruption (?, r, t)
  double right_rank = 1.0;  // tail corruption (h, r, ?)

  friend bool operator==(const RankResult&, const RankResult&) = default;
};

inline constexpr int kDefaultHitsAt[] = {1, 3, 10};

struct MetricsReport {
  double mrr = 0.0;
  std::map<int, double> hits;
  std::vector<RankResult> ranks;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Ranks `triple` against every corruption not present in `filter` (the
// triple itself always stays a candidate).
RankResult FilteredRanks(const TripleScorer& scorer, const Triple& triple,
                         const FilterIndex& filter, std::size_t entities);

// MRR = mean over 2n ranks of 1/rank; Hits@N = share of ranks <= N.
// Throws std::invalid_argument on empty input.
MetricsReport MetricsFromRanks(std::vector<RankResult> ranks,
                               std::span<const int> hits_at = kDefaultHitsAt);

// Ranks every triple of `split` on both sides using up to `workers` threads.
// The result does not depend on `workers`.
MetricsReport EvaluateTriples(const TripleScorer& scorer,
                              std::span<const Triple> split,
                              const FilterIndex& filter, std::size_t entities,
                              std::size_t workers = 1,
                              std::span<const int> hits_at = kDefaultHitsAt);

inline MetricsReport EvaluateModel(const TripleScorer& scorer,
                                   const Dataset& dataset,
                                   const FilterIndex& filter,
                                   std::size_t workers = 1) {
  return EvaluateTriples(scorer, dataset.test, filter, dataset.num_entities(),
                         workers);
}

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation
  double min = 0.0;
  double max = 0.0;
};

struct RepeatedRunReport {
  std::vector<MetricsReport> runs;
  MetricSummary mrr;
  std::map<int, MetricSummary> hits;
  // Set when only one run was aggregated; stddev is then 0 by convention.
  bool single_run = false;
};

// Throws std::invalid_argument on an empty list.
RepeatedRunReport AggregateRuns(std::vector<MetricsReport> reports);
MetricSummary Summarize(std::span<const double> values);

}  // namespace kge

#endif  // KGE_EVALUATION_H_
