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

#ifndef KGE_SCORING_H_
#define KGE_SCORING_H_

#include <span>
#include <vector>

#include "kge/dataset.h"
#include "kge/embedding.h"

namespace kge {

// Plausibility score f(h, r, t) for raw embedding rows. Higher is more
// plausible.
//
//   TransE    -||h + r - t||_p
//   RotatE    -sum_i |h_i * exp(i theta_i) - t_i|   (r holds the phases)
//   DistMult  sum_i h_i r_i t_i               (also DistMultN3)
//   ComplEx   Re(sum_i h_i r_i conj(t_i))     (also ComplExN3)
//
// Complex rows hold d/2 real parts followed by d/2 imaginary parts.
double ScoreEmbeddings(ModelKind kind, int norm_order,
                       std::span<const double> head,
                       std::span<const double> relation,
                       std::span<const double> tail);

// Adds `weight` * df/d{head,relation,tail} into the output spans. The
// derivative of a norm or complex modulus at zero is taken to be zero.
void AccumulateScoreGradient(ModelKind kind, int norm_order,
                             std::span<const double> head,
                             std::span<const double> relation,
                             std::span<const double> tail, double weight,
                             std::span<double> d_head,
                             std::span<double> d_relation,
                             std::span<double> d_tail);

struct ScoreGradient {
  std::vector<double> d_head;
  std::vector<double> d_relation;
  std::vector<double> d_tail;
};

// Throws std::out_of_range when an id exceeds the tables.
double Score(const ModelParams& params, const Triple& triple);
ScoreGradient ComputeScoreGradient(const ModelParams& params,
                                   const Triple& triple);

// Throws std::out_of_range when an id exceeds the tables.
void CheckTripleBounds(const ModelParams& params, const Triple& triple);

}  // namespace kge

#endif  // KGE_SCORING_H_
