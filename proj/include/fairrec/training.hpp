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

// Edge-classification training on the propagated embeddings: every training
// edge (u, i) is paired with one uniformly sampled non-interacted item j per
// epoch. The cost-sensitive objective weights the positive cross-entropy
// term by (1 - lambda) and the negative one by (1 + lambda); the BPR
// objective ranks i above j instead.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairrec/common.hpp"
#include "fairrec/dataset.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/losses.hpp"
#include "fairrec/metrics.hpp"
#include "fairrec/optimizer.hpp"
#include "fairrec/propagation.hpp"

namespace fairrec {

enum class Objective { kCostSensitiveCe, kPlainCe, kBpr };

inline std::string_view objective_name(Objective o) {
  switch (o) {
    case Objective::kCostSensitiveCe: return "cost_sensitive_ce";
    case Objective::kPlainCe: return "plain_ce";
    case Objective::kBpr: return "bpr";
  }
  return "unknown";
}

inline Objective parse_objective(std::string_view s) {
  if (s == "cost_sensitive_ce") return Objective::kCostSensitiveCe;
  if (s == "plain_ce") return Objective::kPlainCe;
  if (s == "bpr") return Objective::kBpr;
  throw Error(ErrorCode::kInvalidArgument, "unknown objective '" + std::string(s) + "'");
}

// When embeddings are re-propagated. Per-batch gives exact gradients after
// every update; per-epoch reuses the epoch-start propagation for all batches.
enum class Propagation { kPerBatch, kPerEpoch };

struct TrainConfig {
  double lambda = 0.1;
  std::size_t gamma = 20;  // consumed by the filter step, carried for reporting
  std::size_t dim = 64;
  std::size_t num_layers = 3;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::size_t batch_size = 2048;
  std::size_t max_epochs = 1000;
  std::size_t patience = 20;
  std::uint64_t seed = 0;
  Objective objective = Objective::kCostSensitiveCe;
  std::size_t validation_cutoff = 100;
  Propagation propagation = Propagation::kPerBatch;

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
    if (patience < 1) throw Error(ErrorCode::kInvalidArgument, "patience must be >= 1");
    if (batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 1");
    if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw Error(ErrorCode::kInvalidArgument, "learning rate must be finite and non-negative");
    }
    if (validation_cutoff < 1) throw Error(ErrorCode::kInvalidArgument, "validation cutoff must be >= 1");
  }

  // plain_ce is the cost-sensitive loss at lambda = 0.
  double effective_lambda() const { return objective == Objective::kPlainCe ? 0.0 : lambda; }

  OptimizerConfig optimizer_config() const {
    OptimizerConfig c;
    c.kind = optimizer;
    c.learning_rate = learning_rate;
    return c;
  }
};

struct BatchPair {
  UserId user = 0;
  ItemId positive = 0;
  ItemId negative = 0;
};

// Uniform over items the user has no training edge with, by rejection.
template <typename Rng>
ItemId sample_negative(UserId u, const BipartiteGraph& graph, Rng& rng) {
  if (graph.user_degree()[u] >= graph.num_items()) {
    throw Error(ErrorCode::kNoNegativeAvailable,
                "user " + std::to_string(u) + " has interacted with every item");
  }
  std::uniform_int_distribution<ItemId> dist(0, static_cast<ItemId>(graph.num_items() - 1));
  while (true) {
    const ItemId j = dist(rng);
    if (!graph.has_edge(u, j)) return j;
  }
}

struct PairLoss {
  double loss = 0.0;
  double d_pos = 0.0;  // dL/draw_pos
  double d_neg = 0.0;  // dL/draw_neg
};

inline PairLoss pair_objective(Objective objective, double lambda, double raw_pos, double raw_neg) {
  if (objective == Objective::kBpr) {
    const double g = bpr_pos_grad(raw_pos, raw_neg);
    return {bpr_pair_loss(raw_pos, raw_neg), g, -g};
  }
  const PairLosses l = pair_ce_losses(logistic(raw_pos), logistic(raw_neg));
  const CostWeights w = cost_weights(lambda);
  return {cost_sensitive_combine(l.positive, l.negative, lambda), w.positive * ce_positive_grad(raw_pos),
          w.negative * ce_negative_grad(raw_neg)};
}

// Loss of one batch and its pair gradients, scored on `state`.
template <typename Rng>
double batch_loss(const EmbeddingState& state, const BipartiteGraph& graph, std::span<const std::size_t> edge_ids,
                  Objective objective, double lambda, Rng& rng, std::vector<PairGradient>& grads) {
  grads.clear();
  double loss = 0.0;
  const auto edges = graph.edges();
  for (std::size_t id : edge_ids) {
    const Edge& e = edges[id];
    const ItemId j = sample_negative(e.user, graph, rng);
    const double raw_pos = raw_score(state, e.user, e.item);
    const double raw_neg = raw_score(state, e.user, j);
    const PairLoss pl = pair_objective(objective, lambda, raw_pos, raw_neg);
    loss += pl.loss;
    grads.push_back({e.user, e.item, pl.d_pos});
    grads.push_back({e.user, j, pl.d_neg});
  }
  return loss;
}

// One pass over all training edges in shuffled mini-batches, one optimizer
// step per batch on the summed batch loss. Returns the summed epoch loss.
template <typename Rng>
double train_epoch(Matrix& h0, Optimizer& optimizer, const BipartiteGraph& graph, const TrainConfig& config,
                   Rng& rng) {
  std::vector<std::size_t> order(graph.num_edges());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  const double lambda = config.effective_lambda();
  double epoch_loss = 0.0;
  std::vector<PairGradient> grads;
  EmbeddingState state;
  const std::size_t num_batches = (order.size() + config.batch_size - 1) / config.batch_size;
  for (std::size_t b = 0; b < num_batches; ++b) {
    if (b == 0 || config.propagation == Propagation::kPerBatch) {
      state = forward(h0, graph, config.num_layers);
    }
    const std::size_t begin = b * config.batch_size;
    const std::size_t end = std::min(order.size(), begin + config.batch_size);
    const std::span<const std::size_t> batch(order.data() + begin, end - begin);
    const double loss = batch_loss(state, graph, batch, config.objective, lambda, rng, grads);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kNonFinite, "non-finite loss in batch " + std::to_string(b));
    }
    epoch_loss += loss;
    optimizer.step(h0, backward(state, graph, grads));
  }
  return epoch_loss;
}

// Patience counts epochs since the last strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Returns true when `metric` is a new best.
  bool update(double metric) {
    ++epoch_;
    if (metric > best_) {
      best_ = metric;
      best_epoch_ = epoch_;
      since_best_ = 0;
      return true;
    }
    ++since_best_;
    return false;
  }

  bool should_stop() const { return since_best_ >= patience_; }
  std::size_t since_best() const { return since_best_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double validation_ndcg = 0.0;
  std::size_t epochs_since_best = 0;
  double seconds = 0.0;
};

struct TrainTrace {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_validation_ndcg = 0.0;
  bool stopped_early = false;
};

inline void write_trace(std::ostream& out, const TrainTrace& trace) {
  out << "epoch\tloss\tval_ndcg\tseconds\n";
  out.precision(17);
  for (const auto& r : trace.epochs) {
    out << r.epoch << '\t' << r.loss << '\t' << r.validation_ndcg << '\t' << r.seconds << '\n';
  }
}

struct FitResult {
  EmbeddingState best;
  TrainTrace trace;
};

class Trainer {
 public:
  Trainer(const BipartiteGraph& graph, TrainConfig config)
      : graph_(graph),
        config_(std::move(config)),
        h0_(init_embeddings(graph.num_nodes(), config_.dim, derive_seed(config_.seed, "init"))),
        optimizer_(config_.optimizer_config()),
        rng_(derive_seed(config_.seed, "sampling")) {
    config_.validate();
  }

  double train_epoch() { return fairrec::train_epoch(h0_, optimizer_, graph_, config_, rng_); }

  EmbeddingState embed() const { return forward(h0_, graph_, config_.num_layers); }
  const Matrix& parameters() const { return h0_; }
  const TrainConfig& config() const { return config_; }

 private:
  const BipartiteGraph& graph_;
  TrainConfig config_;
  Matrix h0_;
  Optimizer optimizer_;
  std::mt19937_64 rng_;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains on `graph` (the possibly filtered training graph) with early stopping
// on validation NDCG@validation_cutoff. Ranking for validation excludes the
// split's train items.
inline FitResult fit(const Split& split, const BipartiteGraph& graph, const TrainConfig& config,
                     const EpochCallback& on_epoch = {}) {
  config.validate();
  if (split.validation.empty()) throw Error(ErrorCode::kEmptyValidation, "validation set is empty");
  const auto train_profiles = user_profiles(split.train);
  const auto validation_profiles = user_profiles(split.validation);

  Trainer trainer(graph, config);
  EarlyStopping stopper(config.patience);
  FitResult result;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochRecord record;
    record.epoch = epoch;
    record.loss = trainer.train_epoch();
    EmbeddingState state = trainer.embed();
    record.validation_ndcg = validation_ndcg(state, train_profiles, validation_profiles, graph.num_items(),
                                             config.validation_cutoff);
    if (stopper.update(record.validation_ndcg)) result.best = std::move(state);
    record.epochs_since_best = stopper.since_best();
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.trace.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
    if (stopper.should_stop()) {
      result.trace.stopped_early = true;
      break;
    }
  }
  if (result.trace.epochs.empty()) {
    // max_epochs == 0: the untrained initialization is the only candidate.
    result.best = trainer.embed();
  }
  result.trace.best_epoch = stopper.best_epoch();
  result.trace.best_validation_ndcg = result.trace.epochs.empty() ? 0.0 : stopper.best();
  return result;
}

}  // namespace fairrec
