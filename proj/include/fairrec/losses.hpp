// Copyright 2026 The FairRec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Pairwise losses on raw dot-product scores, with derivatives w.r.t. raw.

#pragma once

#include <algorithm>
#include <cmath>

#include "fairrec/propagation.hpp"

namespace fairrec {

inline constexpr double kProbFloor = 1e-7;
inline constexpr double kProbCeil = 1.0 - 1e-7;

inline double clamp_prob(double p) { return std::clamp(p, kProbFloor, kProbCeil); }

struct PairLosses {
  double positive = 0.0;  // -log(p_pos), label 1
  double negative = 0.0;  // -log(1 - p_neg), label 0
};

inline PairLosses pair_ce_losses(double prob_pos, double prob_neg) {
  return {-std::log(clamp_prob(prob_pos)), -std::log(1.0 - clamp_prob(prob_neg))};
}

// (1 - lambda) * L_pos + (1 + lambda) * L_neg
inline double cost_sensitive_combine(double loss_pos, double loss_neg, double lambda) {
  return (1.0 - lambda) * loss_pos + (1.0 + lambda) * loss_neg;
}

struct CostWeights {
  double positive = 1.0;
  double negative = 1.0;
};

inline CostWeights cost_weights(double lambda) { return {1.0 - lambda, 1.0 + lambda}; }

// d/draw of -log(clamp(sigmoid(raw))). Zero where the clamp is active.
inline double ce_positive_grad(double raw) {
  const double p = logistic(raw);
  if (p <= kProbFloor || p >= kProbCeil) return 0.0;
  return -(1.0 - p);
}

// d/draw of -log(1 - clamp(sigmoid(raw))).
inline double ce_negative_grad(double raw) {
  const double p = logistic(raw);
  if (p <= kProbFloor || p >= kProbCeil) return 0.0;
  return p;
}

// softplus(x) = log(1 + e^x), evaluated without overflow.
inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// -log(sigmoid(raw_pos - raw_neg))
inline double bpr_pair_loss(double raw_pos, double raw_neg) { return softplus(-(raw_pos - raw_neg)); }

// d/draw_pos; d/draw_neg is the negation.
inline double bpr_pos_grad(double raw_pos, double raw_neg) { return -logistic(-(raw_pos - raw_neg)); }

}  // namespace fairrec
