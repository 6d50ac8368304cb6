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

// Light Graph Convolution: H^(k+1) = D^{-1/2} A D^{-1/2} H^(k), final
// embeddings are the mean over layers 0..K. Propagation is linear in H^(0), so
// the gradient with respect to H^(0) is the same operator (symmetric) applied
// to the gradient with respect to the final embeddings.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fairrec/common.hpp"
#include "fairrec/graph.hpp"

namespace fairrec {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double xavier_bound(std::size_t dim) {
  return std::sqrt(6.0 / static_cast<double>(dim + dim));
}

// Entries i.i.d. uniform on (-a, a), a = sqrt(6 / (d + d)).
inline Matrix init_embeddings(std::size_t num_nodes, std::size_t dim, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be >= 1");
  const double a = xavier_bound(dim);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-a, a);
  Matrix h(static_cast<Eigen::Index>(num_nodes), static_cast<Eigen::Index>(dim));
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      double v = dist(rng);
      while (v == -a) v = dist(rng);
      h(r, c) = v;
    }
  }
  return h;
}

struct EmbeddingState {
  std::size_t num_users = 0;
  std::size_t num_layers = 0;    // K
  std::vector<Matrix> per_layer;  // H^(0) .. H^(K)
  Matrix final;

  std::size_t dim() const { return static_cast<std::size_t>(final.cols()); }
  auto user_row(UserId u) const { return final.row(static_cast<Eigen::Index>(u)); }
  auto item_row(ItemId i) const { return final.row(static_cast<Eigen::Index>(num_users + i)); }
};

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNonFinite, std::string("non-finite values in ") + what);
  }
}

inline EmbeddingState forward(const Matrix& h0, const BipartiteGraph& graph, std::size_t num_layers) {
  if (static_cast<std::size_t>(h0.rows()) != graph.num_nodes()) {
    throw Error(ErrorCode::kInvalidArgument, "embedding rows do not match the graph's node count");
  }
  require_finite(h0, "initial embeddings");
  EmbeddingState state;
  state.num_users = graph.num_users();
  state.num_layers = num_layers;
  state.per_layer.reserve(num_layers + 1);
  state.per_layer.push_back(h0);
  state.final = h0;
  for (std::size_t k = 0; k < num_layers; ++k) {
    Matrix next = graph.norm_adjacency() * state.per_layer.back();
    state.final += next;
    state.per_layer.push_back(std::move(next));
  }
  state.final /= static_cast<double>(num_layers + 1);
  require_finite(state.final, "propagated embeddings");
  return state;
}

inline double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct ScorePair {
  UserId user = 0;
  ItemId item = 0;
  double raw = 0.0;
  double prob = 0.5;
};

inline double raw_score(const EmbeddingState& state, UserId u, ItemId i) {
  return state.user_row(u).dot(state.item_row(i));
}

inline ScorePair score(const EmbeddingState& state, UserId u, ItemId i) {
  const double raw = raw_score(state, u, i);
  return {u, i, raw, logistic(raw)};
}

// Upstream gradient dL/draw for one scored (user, item) pair.
struct PairGradient {
  UserId user = 0;
  ItemId item = 0;
  double d_raw = 0.0;
};

// Applies (1/(K+1)) * sum_k A^k to a gradient w.r.t. the final embeddings;
// A is symmetric so this is also the transpose.
inline Matrix backpropagate(const Matrix& d_final, const BipartiteGraph& graph, std::size_t num_layers) {
  Matrix total = d_final;
  Matrix layer = d_final;
  for (std::size_t k = 0; k < num_layers; ++k) {
    layer = graph.norm_adjacency() * layer;
    total += layer;
  }
  total /= static_cast<double>(num_layers + 1);
  return total;
}

// dL/dH^(0) for L = sum over pairs of a loss whose derivative with respect
// to raw = <final[u], final[i]> is d_raw.
inline Matrix backward(const EmbeddingState& state, const BipartiteGraph& graph,
                       std::span<const PairGradient> pairs) {
  if (graph.num_users() != state.num_users ||
      graph.num_nodes() != static_cast<std::size_t>(state.final.rows())) {
    throw Error(ErrorCode::kInvalidArgument, "state was not produced on this graph");
  }
  Matrix d_final = Matrix::Zero(state.final.rows(), state.final.cols());
  for (const auto& p : pairs) {
    if (p.user >= graph.num_users() || p.item >= graph.num_items()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "batch references node ids outside the graph (user " + std::to_string(p.user) +
                      ", item " + std::to_string(p.item) + ")");
    }
    if (p.d_raw == 0.0) continue;
    const auto u = static_cast<Eigen::Index>(p.user);
    const auto i = static_cast<Eigen::Index>(graph.item_node(p.item));
    d_final.row(u) += p.d_raw * state.final.row(i);
    d_final.row(i) += p.d_raw * state.final.row(u);
  }
  return backpropagate(d_final, graph, state.num_layers);
}

// ---------------------------------------------------------------------------
// Checkpoint format (little-endian):
//   char[8]  magic "FRECCKPT"
//   u32      version (1)
//   u32      num_layers K
//   u64      num_nodes, num_users, dim, seed
//   f64[num_nodes * dim]  H^(0), row-major
//   f64[num_nodes * dim]  final layer-averaged embeddings, row-major

struct CheckpointHeader {
  std::uint32_t num_layers = 0;
  std::uint64_t num_nodes = 0;
  std::uint64_t num_users = 0;
  std::uint64_t dim = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const CheckpointHeader&, const CheckpointHeader&) = default;
};

struct Checkpoint {
  CheckpointHeader header;
  Matrix initial;
  Matrix final;
};

inline constexpr char kCheckpointMagic[8] = {'F', 'R', 'E', 'C', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(ErrorCode::kFormat, "truncated checkpoint");
  return value;
}

}  // namespace detail

inline void save_checkpoint(std::ostream& out, const EmbeddingState& state, std::uint64_t seed) {
  static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes little-endian");
  const Matrix& h0 = state.per_layer.front();
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::write_pod<std::uint32_t>(out, kCheckpointVersion);
  detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(state.num_layers));
  detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(h0.rows()));
  detail::write_pod<std::uint64_t>(out, state.num_users);
  detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(h0.cols()));
  detail::write_pod<std::uint64_t>(out, seed);
  const auto bytes = static_cast<std::streamsize>(h0.size() * sizeof(double));
  out.write(reinterpret_cast<const char*>(h0.data()), bytes);
  out.write(reinterpret_cast<const char*>(state.final.data()), bytes);
  if (!out) throw Error(ErrorCode::kIo, "failed to write checkpoint");
}

inline Checkpoint load_checkpoint(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw Error(ErrorCode::kFormat, "not a checkpoint file");
  }
  if (detail::read_pod<std::uint32_t>(in) != kCheckpointVersion) {
    throw Error(ErrorCode::kFormat, "unsupported checkpoint version");
  }
  Checkpoint ckpt;
  ckpt.header.num_layers = detail::read_pod<std::uint32_t>(in);
  ckpt.header.num_nodes = detail::read_pod<std::uint64_t>(in);
  ckpt.header.num_users = detail::read_pod<std::uint64_t>(in);
  ckpt.header.dim = detail::read_pod<std::uint64_t>(in);
  ckpt.header.seed = detail::read_pod<std::uint64_t>(in);
  if (ckpt.header.num_users > ckpt.header.num_nodes || ckpt.header.dim == 0 ||
      ckpt.header.num_nodes * ckpt.header.dim > (std::uint64_t{1} << 34)) {
    throw Error(ErrorCode::kFormat, "implausible checkpoint header");
  }
  const auto rows = static_cast<Eigen::Index>(ckpt.header.num_nodes);
  const auto cols = static_cast<Eigen::Index>(ckpt.header.dim);
  const auto bytes = static_cast<std::streamsize>(rows * cols * static_cast<Eigen::Index>(sizeof(double)));
  ckpt.initial.resize(rows, cols);
  ckpt.final.resize(rows, cols);
  in.read(reinterpret_cast<char*>(ckpt.initial.data()), bytes);
  in.read(reinterpret_cast<char*>(ckpt.final.data()), bytes);
  if (!in) throw Error(ErrorCode::kFormat, "truncated checkpoint");
  return ckpt;
}

// Scoring-only state rebuilt from a checkpoint.
inline EmbeddingState state_from_checkpoint(const Checkpoint& ckpt) {
  EmbeddingState state;
  state.num_users = ckpt.header.num_users;
  state.num_layers = ckpt.header.num_layers;
  state.per_layer.push_back(ckpt.initial);
  state.final = ckpt.final;
  return state;
}

}  // namespace fairrec
