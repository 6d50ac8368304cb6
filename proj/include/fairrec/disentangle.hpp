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

// Separates long-tail items that are under-exposed from long-tail items that
// are simply disliked. A baseline rating predictor mu + b_u + b_i gives each
// training edge a residual; items below the degree threshold whose residuals
// are positive on fewer than two thirds of their edges lose all their edges.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairrec/common.hpp"
#include "fairrec/dataset.hpp"
#include "fairrec/graph.hpp"

namespace fairrec {

struct BaselineModel {
  double mu = 0.0;
  // Zero for nodes without training ratings.
  std::vector<double> user_dev;
  std::vector<double> item_dev;

  double predict(UserId u, ItemId i) const { return mu + user_dev[u] + item_dev[i]; }
};

// b_u and b_i are independent, unregularized mean deviations from mu.
inline BaselineModel fit_baseline(const RatingDataset& train) {
  if (train.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot fit a baseline on an empty train set");
  BaselineModel model;
  double sum = 0.0;
  for (const auto& r : train.interactions) sum += r.rating;
  model.mu = sum / static_cast<double>(train.size());

  std::vector<double> user_sum(train.num_users, 0.0), item_sum(train.num_items, 0.0);
  std::vector<std::size_t> user_n(train.num_users, 0), item_n(train.num_items, 0);
  for (const auto& r : train.interactions) {
    const double dev = r.rating - model.mu;
    user_sum[r.user] += dev;
    item_sum[r.item] += dev;
    ++user_n[r.user];
    ++item_n[r.item];
  }
  model.user_dev.assign(train.num_users, 0.0);
  model.item_dev.assign(train.num_items, 0.0);
  for (std::size_t u = 0; u < train.num_users; ++u) {
    if (user_n[u] > 0) model.user_dev[u] = user_sum[u] / static_cast<double>(user_n[u]);
  }
  for (std::size_t i = 0; i < train.num_items; ++i) {
    if (item_n[i] > 0) model.item_dev[i] = item_sum[i] / static_cast<double>(item_n[i]);
  }
  return model;
}

inline double edge_error(const BaselineModel& model, UserId u, ItemId i, double rating) {
  return rating - model.predict(u, i);
}

struct FilterReport {
  std::size_t gamma = 0;
  std::vector<ItemId> removed_items;  // ascending
  std::size_t removed_edges = 0;
  // Share of an item's edges with a strictly positive residual; empty for
  // items without edges.
  std::vector<std::optional<double>> positive_fraction;
  // Users that have no edges left after filtering.
  std::vector<UserId> isolated_users;
};

struct FilterResult {
  BipartiteGraph graph;
  FilterReport report;
};

// Single pass over the input graph's edges using its (pre-filter) degrees.
// The ratio test is strict: exactly 2/3 positive keeps the item.
inline FilterResult filter_low_quality(const BipartiteGraph& graph, const RatingDataset& train,
                                       const BaselineModel& model, std::size_t gamma) {
  std::unordered_map<std::uint64_t, double> rating;
  rating.reserve(train.size());
  for (const auto& r : train.interactions) rating.emplace(pair_key(r.user, r.item), r.rating);

  const std::size_t num_items = graph.num_items();
  std::vector<std::size_t> positive(num_items, 0);
  for (const auto& e : graph.edges()) {
    const auto it = rating.find(pair_key(e.user, e.item));
    if (it == rating.end()) {
      throw Error(ErrorCode::kInvalidArgument, "graph edge has no rating in the train set");
    }
    if (edge_error(model, e.user, e.item, it->second) > 0.0) ++positive[e.item];
  }

  FilterReport report;
  report.gamma = gamma;
  report.positive_fraction.resize(num_items);
  std::vector<bool> drop(num_items, false);
  const auto degree = graph.item_degree();
  for (std::size_t i = 0; i < num_items; ++i) {
    if (degree[i] == 0) continue;
    const double frac = static_cast<double>(positive[i]) / static_cast<double>(degree[i]);
    report.positive_fraction[i] = frac;
    // 3 * positive < 2 * degree is frac < 2/3 without rounding.
    if (degree[i] < gamma && 3 * positive[i] < 2 * degree[i]) {
      drop[i] = true;
      report.removed_items.push_back(static_cast<ItemId>(i));
    }
  }

  std::vector<Edge> kept;
  kept.reserve(graph.num_edges());
  for (const auto& e : graph.edges()) {
    if (drop[e.item]) {
      ++report.removed_edges;
    } else {
      kept.push_back(e);
    }
  }
  BipartiteGraph filtered(graph.num_users(), num_items, std::move(kept));
  for (std::size_t u = 0; u < filtered.num_users(); ++u) {
    if (filtered.user_degree()[u] == 0 && graph.user_degree()[u] > 0) {
      report.isolated_users.push_back(static_cast<UserId>(u));
    }
  }
  return {std::move(filtered), std::move(report)};
}

inline FilterResult filter_low_quality(const BipartiteGraph& graph, const RatingDataset& train,
                                       std::size_t gamma) {
  return filter_low_quality(graph, train, fit_baseline(train), gamma);
}

inline nlohmann::json to_json(const FilterReport& report) {
  nlohmann::json fractions = nlohmann::json::array();
  for (const auto& f : report.positive_fraction) {
    fractions.push_back(f ? nlohmann::json(*f) : nlohmann::json(nullptr));
  }
  return {
      {"gamma", report.gamma},
      {"removed_edges", report.removed_edges},
      {"removed_item_count", report.removed_items.size()},
      {"removed_items", report.removed_items},
      {"isolated_users", report.isolated_users},
      {"positive_fraction", std::move(fractions)},
  };
}

}  // namespace fairrec
