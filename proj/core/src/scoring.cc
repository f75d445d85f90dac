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

#include "kge/scoring.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kge {
namespace {

double Sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

double TransEScore(int p, std::span<const double> h, std::span<const double> r,
                   std::span<const double> t) {
  double acc = 0.0;
  if (p == 1) {
    for (std::size_t i = 0; i < h.size(); ++i)
      acc += std::abs(h[i] + r[i] - t[i]);
    return -acc;
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double v = h[i] + r[i] - t[i];
    acc += v * v;
  }
  return -std::sqrt(acc);
}

double RotatEScore(std::span<const double> h, std::span<const double> phase,
                   std::span<const double> t) {
  const std::size_t half = phase.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double c = std::cos(phase[i]), s = std::sin(phase[i]);
    const double re = h[i] * c - h[half + i] * s - t[i];
    const double im = h[i] * s + h[half + i] * c - t[half + i];
    acc += std::hypot(re, im);
  }
  return -acc;
}

double DistMultScore(std::span<const double> h, std::span<const double> r,
                     std::span<const double> t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) acc += h[i] * r[i] * t[i];
  return acc;
}

double ComplExScore(std::span<const double> h, std::span<const double> r,
                    std::span<const double> t) {
  const std::size_t half = h.size() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double hr = h[i], hi = h[half + i];
    const double rr = r[i], ri = r[half + i];
    const double tr = t[i], ti = t[half + i];
    acc += (hr * rr - hi * ri) * tr + (hr * ri + hi * rr) * ti;
  }
  return acc;
}

}  // namespace

double ScoreEmbeddings(ModelKind kind, int norm_order,
                       std::span<const double> head,
                       std::span<const double> relation,
                       std::span<const double> tail) {
  switch (kind) {
    case ModelKind::kTransE:
      return TransEScore(norm_order, head, relation, tail);
    case ModelKind::kRotatE:
      return RotatEScore(head, relation, tail);
    case ModelKind::kDistMult:
    case ModelKind::kDistMultN3:
      return DistMultScore(head, relation, tail);
    case ModelKind::kComplEx:
    case ModelKind::kComplExN3:
      return ComplExScore(head, relation, tail);
  }
  return 0.0;
}

void AccumulateScoreGradient(ModelKind kind, int norm_order,
                             std::span<const double> h,
                             std::span<const double> r,
                             std::span<const double> t, double weight,
                             std::span<double> dh, std::span<double> dr,
                             std::span<double> dt) {
  switch (kind) {
    case ModelKind::kTransE: {
      if (norm_order == 1) {
        for (std::size_t i = 0; i < h.size(); ++i) {
          const double g = -weight * Sign(h[i] + r[i] - t[i]);
          dh[i] += g;
          dr[i] += g;
          dt[i] -= g;
        }
        return;
      }
      double sq = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        const double v = h[i] + r[i] - t[i];
        sq += v * v;
      }
      const double norm = std::sqrt(sq);
      if (norm == 0.0) return;
      for (std::size_t i = 0; i < h.size(); ++i) {
        const double g = -weight * (h[i] + r[i] - t[i]) / norm;
        dh[i] += g;
        dr[i] += g;
        dt[i] -= g;
      }
      return;
    }
    case ModelKind::kRotatE: {
      const std::size_t half = r.size();
      for (std::size_t i = 0; i < half; ++i) {
        const double c = std::cos(r[i]), s = std::sin(r[i]);
        const double a = h[i], b = h[half + i];
        const double rot_re = a * c - b * s;
        const double rot_im = a * s + b * c;
        const double re = rot_re - t[i];
        const double im = rot_im - t[half + i];
        const double mod = std::hypot(re, im);
        if (mod == 0.0) continue;
        // f = -mod, so every partial carries a leading minus sign.
        const double w = -weight / mod;
        dh[i] += w * (re * c + im * s);
        dh[half + i] += w * (-re * s + im * c);
        dr[i] += w * (-re * rot_im + im * rot_re);
        dt[i] -= w * re;
        dt[half + i] -= w * im;
      }
      return;
    }
    case ModelKind::kDistMult:
    case ModelKind::kDistMultN3:
      for (std::size_t i = 0; i < h.size(); ++i) {
        dh[i] += weight * r[i] * t[i];
        dr[i] += weight * h[i] * t[i];
        dt[i] += weight * h[i] * r[i];
      }
      return;
    case ModelKind::kComplEx:
    case ModelKind::kComplExN3: {
      const std::size_t half = h.size() / 2;
      for (std::size_t i = 0; i < half; ++i) {
        const double hr = h[i], hi = h[half + i];
        const double rr = r[i], ri = r[half + i];
        const double tr = t[i], ti = t[half + i];
        dh[i] += weight * (rr * tr + ri * ti);
        dh[half + i] += weight * (rr * ti - ri * tr);
        dr[i] += weight * (hr * tr + hi * ti);
        dr[half + i] += weight * (hr * ti - hi * tr);
        dt[i] += weight * (hr * rr - hi * ri);
        dt[half + i] += weight * (hr * ri + hi * rr);
      }
      return;
    }
  }
}

void CheckTripleBounds(const ModelParams& params, const Triple& triple) {
  if (triple.head >= params.entities.rows() ||
      triple.tail >= params.entities.rows() ||
      triple.relation >= params.relations.rows()) {
    throw std::out_of_range("triple (" + std::to_string(triple.head) + ", " +
                            std::to_string(triple.relation) + ", " +
                            std::to_string(triple.tail) +
                            ") outside model tables");
  }
}

double Score(const ModelParams& params, const Triple& triple) {
  CheckTripleBounds(params, triple);
  return ScoreEmbeddings(
      params.kind, params.norm_order, params.entities.Row(triple.head),
      params.relations.Row(triple.relation), params.entities.Row(triple.tail));
}

ScoreGradient ComputeScoreGradient(const ModelParams& params,
                                   const Triple& triple) {
  CheckTripleBounds(params, triple);
  ScoreGradient grad;
  grad.d_head.assign(params.entities.width(), 0.0);
  grad.d_relation.assign(params.relations.width(), 0.0);
  grad.d_tail.assign(params.entities.width(), 0.0);
  AccumulateScoreGradient(
      params.kind, params.norm_order, params.entities.Row(triple.head),
      params.relations.Row(triple.relation), params.entities.Row(triple.tail),
      1.0, grad.d_head, grad.d_relation, grad.d_tail);
  return grad;
}

}  // namespace kge
