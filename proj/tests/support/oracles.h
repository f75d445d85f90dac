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

#ifndef KGE_TESTS_SUPPORT_ORACLES_H_
#define KGE_TESTS_SUPPORT_ORACLES_H_

// Independent reference computations used by unit and acceptance tests.
// Nothing here calls into the optimized code paths it is used to check,
// other than the plain per-triple score function.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "kge/dataset.h"
#include "kge/embedding.h"
#include "kge/scoring.h"
#include "kge/training.h"

namespace kge::testing {

inline constexpr double kFiniteDifferenceStep = 1e-6;

// Central differences of `f` over every scalar of both tables of `params`.
// Returns entity gradients followed by relation gradients.
inline std::vector<double> NumericGradient(
    ModelParams params, const std::function<double(const ModelParams&)>& f,
    double step = kFiniteDifferenceStep) {
  std::vector<double> grad;
  for (EmbeddingTable* table : {&params.entities, &params.relations}) {
    for (double& v : table->values()) {
      const double saved = v;
      v = saved + step;
      const double up = f(params);
      v = saved - step;
      const double down = f(params);
      v = saved;
      grad.push_back((up - down) / (2.0 * step));
    }
  }
  return grad;
}

// Densifies sparse gradients in the same order as NumericGradient.
inline std::vector<double> DenseGradient(const ModelParams& params,
                                         const Gradients& grads) {
  std::vector<double> dense(
      params.entities.values().size() + params.relations.values().size(), 0.0);
  const std::size_t ew = params.entities.width();
  for (std::size_t s = 0; s < grads.entities.size(); ++s) {
    const auto row = grads.entities.Slot(s);
    for (std::size_t i = 0; i < ew; ++i) {
      dense[grads.entities.id(s) * ew + i] += row[i];
    }
  }
  const std::size_t offset = params.entities.values().size();
  const std::size_t rw = params.relations.width();
  for (std::size_t s = 0; s < grads.relations.size(); ++s) {
    const auto row = grads.relations.Slot(s);
    for (std::size_t i = 0; i < rw; ++i) {
      dense[offset + grads.relations.id(s) * rw + i] += row[i];
    }
  }
  return dense;
}

// ||a - b|| / max(||a||, ||b||, floor).
inline double RelativeError(std::span<const double> a,
                            std::span<const double> b, double floor = 1e-8) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

// True when the score of `t` sits within `margin` of a point where the norm
// (or a complex modulus) is not differentiable.
inline bool NearSingularity(const ModelParams& params, const Triple& t,
                            double margin = 1e-4) {
  const auto h = params.entities.Row(t.head);
  const auto r = params.relations.Row(t.relation);
  const auto tl = params.entities.Row(t.tail);
  if (params.kind == ModelKind::kTransE) {
    double sq = 0.0, smallest = INFINITY;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double v = h[i] + r[i] - tl[i];
      sq += v * v;
      smallest = std::min(smallest, std::abs(v));
    }
    return params.norm_order == 1 ? smallest < margin : std::sqrt(sq) < margin;
  }
  if (params.kind == ModelKind::kRotatE) {
    const std::size_t half = r.size();
    for (std::size_t i = 0; i < half; ++i) {
      const double re =
          h[i] * std::cos(r[i]) - h[half + i] * std::sin(r[i]) - tl[i];
      const double im =
          h[i] * std::sin(r[i]) + h[half + i] * std::cos(r[i]) - tl[half + i];
      if (std::hypot(re, im) < margin) return true;
    }
  }
  return false;
}

// Fills both tables with N(0, scale^2) draws.
inline void Randomize(ModelParams& params, std::mt19937_64& rng,
                      double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  for (double& v : params.entities.values()) v = dist(rng);
  for (double& v : params.relations.values()) v = dist(rng);
}

// Exhaustive filtered rank: scores every entity, drops known triples other
// than the target, applies the mean-tie convention.
struct BruteForceRanks {
  double left;
  double right;
};

inline BruteForceRanks BruteForceRank(
    const std::function<double(const Triple&)>& scorer, const Triple& target,
    std::span<const Triple> known, std::size_t entities) {
  auto is_known = [&](const Triple& t) {
    return std::find(known.begin(), known.end(), t) != known.end();
  };
  auto rank_side = [&](bool head_side) {
    const double s0 = scorer(target);
    double better = 0, tied = 0;
    for (std::size_t e = 0; e < entities; ++e) {
      Triple c = target;
      (head_side ? c.head : c.tail) = static_cast<EntityId>(e);
      if (c == target || is_known(c)) continue;
      const double s = scorer(c);
      if (s > s0) better += 1;
      if (s == s0) tied += 1;
    }
    return 1.0 + better + tied / 2.0;
  };
  return {rank_side(true), rank_side(false)};
}

}  // namespace kge::testing

#endif  // KGE_TESTS_SUPPORT_ORACLES_H_
