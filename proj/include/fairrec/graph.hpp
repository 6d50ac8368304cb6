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

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fairrec/common.hpp"
#include "fairrec/dataset.hpp"

namespace fairrec {

using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

struct Edge {
  UserId user = 0;
  ItemId item = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// User-item interaction graph. Node ids in norm_adjacency are users first
// ([0, num_users)) then items ([num_users, num_users + num_items)).
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  BipartiteGraph(std::size_t num_users, std::size_t num_items, std::vector<Edge> edges)
      : num_users_(num_users), num_items_(num_items), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    user_degree_.assign(num_users_, 0);
    item_degree_.assign(num_items_, 0);
    for (const auto& e : edges_) {
      if (e.user >= num_users_ || e.item >= num_items_) {
        throw Error(ErrorCode::kInvalidArgument, "edge endpoint out of range");
      }
      ++user_degree_[e.user];
      ++item_degree_[e.item];
    }
    // Edges are sorted by user, so each user's items form a contiguous run.
    user_offsets_.assign(num_users_ + 1, 0);
    for (std::size_t u = 0; u < num_users_; ++u) {
      user_offsets_[u + 1] = user_offsets_[u] + user_degree_[u];
    }
    user_items_.reserve(edges_.size());
    for (const auto& e : edges_) user_items_.push_back(e.item);

    const auto n = static_cast<Eigen::Index>(num_nodes());
    std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
    triplets.reserve(2 * edges_.size());
    for (const auto& e : edges_) {
      const double w = 1.0 / std::sqrt(static_cast<double>(user_degree_[e.user]) *
                                        static_cast<double>(item_degree_[e.item]));
      const auto u = static_cast<std::int64_t>(e.user);
      const auto i = static_cast<std::int64_t>(num_users_ + e.item);
      triplets.emplace_back(u, i, w);
      triplets.emplace_back(i, u, w);
    }
    norm_adjacency_.resize(n, n);
    norm_adjacency_.setFromTriplets(triplets.begin(), triplets.end());
    norm_adjacency_.makeCompressed();
  }

  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }
  std::size_t num_nodes() const { return num_users_ + num_items_; }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const std::size_t> user_degree() const { return user_degree_; }
  std::span<const std::size_t> item_degree() const { return item_degree_; }

  // Sorted items of user u.
  std::span<const ItemId> items_of(UserId u) const {
    return std::span<const ItemId>(user_items_).subspan(user_offsets_[u], user_degree_[u]);
  }

  bool has_edge(UserId u, ItemId i) const {
    const auto items = items_of(u);
    return std::binary_search(items.begin(), items.end(), i);
  }

  std::size_t item_node(ItemId i) const { return num_users_ + i; }

  // D^{-1/2} A D^{-1/2}, symmetric, no self-loops.
  const SparseOperator& norm_adjacency() const { return norm_adjacency_; }

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> user_degree_;
  std::vector<std::size_t> item_degree_;
  std::vector<std::size_t> user_offsets_;
  std::vector<ItemId> user_items_;
  SparseOperator norm_adjacency_;
};

inline BipartiteGraph build_graph(const RatingDataset& train) {
  if (train.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot build a graph from an empty train set");
  std::vector<Edge> edges;
  edges.reserve(train.size());
  for (const auto& r : train.interactions) edges.push_back({r.user, r.item});
  return BipartiteGraph(train.num_users, train.num_items, std::move(edges));
}

}  // namespace fairrec
