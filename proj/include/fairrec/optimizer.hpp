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

#pragma once

#include <cmath>
#include <cstddef>

#include "fairrec/propagation.hpp"

namespace fairrec {

enum class OptimizerKind { kAdam, kSgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Minimizes: params -= step(grad).
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  void step(Matrix& params, const Matrix& grad) {
    if (config_.kind == OptimizerKind::kSgd) {
      params.noalias() -= config_.learning_rate * grad;
      return;
    }
    if (m_.size() == 0) {
      m_ = Matrix::Zero(params.rows(), params.cols());
      v_ = Matrix::Zero(params.rows(), params.cols());
    }
    ++t_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    const double lr = config_.learning_rate;
    const double eps = config_.epsilon;
    const Eigen::Index n = params.size();
    double* p = params.data();
    const double* g = grad.data();
    double* m = m_.data();
    double* v = v_.data();
    for (Eigen::Index k = 0; k < n; ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      p[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps);
    }
  }

  const OptimizerConfig& config() const { return config_; }
  std::size_t steps() const { return t_; }

 private:
  OptimizerConfig config_;
  Matrix m_;
  Matrix v_;
  std::size_t t_ = 0;
};

}  // namespace fairrec
