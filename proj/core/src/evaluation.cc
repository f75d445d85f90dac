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

#include "kge/evaluation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "kge/scoring.h"

namespace kge {

TripleScorer MakeScorer(const ModelParams& params) {
  return [&params](const Triple& t) { return Score(params, t); };
}

namespace {

// Counts candidates scoring strictly above / equal to `target`, skipping any
// candidate id in `known` other than `self`.
template <typename MakeTriple>
double RankAmong(const TripleScorer& scorer, double target, EntityId self,
                 const std::unordered_set<EntityId>& known,
                 std::size_t entities, MakeTriple make) {
  std::size_t better = 0;
  std::size_t tied = 0;
  for (EntityId e = 0; e < entities; ++e) {
    if (e == self || known.contains(e)) continue;
    const double s = scorer(make(e));
    if (s > target) {
      ++better;
    } else if (s == target) {
      ++tied;
    }
  }
  return 1.0 + static_cast<double>(better) + static_cast<double>(tied) / 2.0;
}

}  // namespace

RankResult FilteredRanks(const TripleScorer& scorer, const Triple& triple,
                         const FilterIndex& filter, std::size_t entities) {
  const double target = scorer(triple);
  RankResult result;
  result.triple = triple;
  result.right_rank = RankAmong(
      scorer, target, triple.tail, filter.TailsOf(triple.head, triple.relation),
      entities,
      [&](EntityId e) { return Triple{triple.head, triple.relation, e}; });
  result.left_rank = RankAmong(
      scorer, target, triple.head, filter.HeadsOf(triple.relation, triple.tail),
      entities,
      [&](EntityId e) { return Triple{e, triple.relation, triple.tail}; });
  return result;
}

MetricsReport MetricsFromRanks(std::vector<RankResult> ranks,
                               std::span<const int> hits_at) {
  if (ranks.empty()) throw std::invalid_argument("no ranks to summarize");
  MetricsReport report;
  double reciprocal = 0.0;
  for (int n : hits_at) report.hits[n] = 0.0;
  for (const RankResult& r : ranks) {
    reciprocal += 1.0 / r.left_rank + 1.0 / r.right_rank;
    for (int n : hits_at) {
      report.hits[n] +=
          (r.left_rank <= n ? 1.0 : 0.0) + (r.right_rank <= n ? 1.0 : 0.0);
    }
  }
  const double total = 2.0 * static_cast<double>(ranks.size());
  report.mrr = reciprocal / total;
  for (auto& [n, value] : report.hits) value /= total;
  report.ranks = std::move(ranks);
  return report;
}

MetricsReport EvaluateTriples(const TripleScorer& scorer,
                              std::span<const Triple> split,
                              const FilterIndex& filter, std::size_t entities,
                              std::size_t workers,
                              std::span<const int> hits_at) {
  std::vector<RankResult> ranks(split.size());
  workers = std::clamp<std::size_t>(workers, 1,
                                    std::max<std::size_t>(1, split.size()));
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ranks[i] = FilteredRanks(scorer, split[i], filter, entities);
    }
  };
  if (workers == 1) {
    run(0, split.size());
  } else {
    std::vector<std::jthread> threads;
    const std::size_t chunk = (split.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(split.size(), begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(run, begin, end);
    }
  }
  return MetricsFromRanks(std::move(ranks), hits_at);
}

MetricSummary Summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("no values to summarize");
  MetricSummary s;
  // Shifted by the first value so identical inputs give exactly zero spread.
  const double origin = values.front();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v - origin;
  const double offset = sum / n;
  s.mean = origin + offset;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - origin - offset) * (v - origin - offset);
    s.stddev = std::sqrt(sq / (n - 1.0));
  }
  // Rounding can put the mean a few ulps outside the sample range.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

RepeatedRunReport AggregateRuns(std::vector<MetricsReport> reports) {
  if (reports.empty()) throw std::invalid_argument("no runs to aggregate");
  RepeatedRunReport out;
  std::vector<double> mrrs;
  for (const auto& r : reports) mrrs.push_back(r.mrr);
  out.mrr = Summarize(mrrs);
  for (const auto& [n, unused] : reports.front().hits) {
    std::vector<double> values;
    for (const auto& r : reports) values.push_back(r.hits.at(n));
    out.hits[n] = Summarize(values);
  }
  out.single_run = reports.size() == 1;
  out.runs = std::move(reports);
  return out;
}

}  // namespace kge
