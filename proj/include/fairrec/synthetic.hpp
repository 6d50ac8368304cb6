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

// Synthetic rating corpora with known ground truth.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "fairrec/common.hpp"
#include "fairrec/dataset.hpp"

namespace fairrec {

// ---------------------------------------------------------------------------
// Planted-quality corpus.
//
// Every rating r is paired inside the same user with a rating 6 - r, so the
// global mean is exactly 3 and every user's mean deviation is exactly 0. The
// baseline residual of a rating is then r minus the item's mean rating, and
// the positive fraction of a long-tail item is fixed by its rating pattern:
// 5s are positive and 1s are negative. Long-tail items are the only items
// with degree below `gamma`.

struct PlantedConfig {
  std::size_t gamma = 20;
  std::size_t popular_items = 30;
  std::size_t low_quality_items = 40;   // positive fraction < 2/3
  std::size_t high_quality_items = 40;  // positive fraction > 2/3
  std::size_t boundary_items = 10;      // positive fraction exactly 2/3
  std::size_t min_tail_degree = 3;
  std::uint64_t seed = 7;
};

struct PlantedCorpus {
  RatingDataset data;
  std::vector<ItemId> popular;
  std::vector<ItemId> low_quality;
  std::vector<ItemId> high_quality;
  std::vector<ItemId> boundary;
};

inline PlantedCorpus planted_quality_corpus(const PlantedConfig& config) {
  if (config.gamma <= config.min_tail_degree || config.min_tail_degree < 3) {
    throw Error(ErrorCode::kInvalidArgument, "planted corpus needs 3 <= min_tail_degree < gamma");
  }
  std::mt19937_64 rng(config.seed);
  PlantedCorpus corpus;
  RatingDataset& data = corpus.data;
  data.rating_scale = {1.0, 5.0};

  // Tail items and their (degree, positives) patterns.
  struct TailItem {
    ItemId id;
    std::size_t degree;
    std::size_t positives;
  };
  std::vector<TailItem> tail;
  ItemId next_item = 0;
  for (std::size_t k = 0; k < config.popular_items; ++k) corpus.popular.push_back(next_item++);
  std::uniform_int_distribution<std::size_t> degree_dist(config.min_tail_degree, config.gamma - 1);
  for (std::size_t k = 0; k < config.low_quality_items; ++k) {
    const std::size_t n = degree_dist(rng);
    // Largest p with 3p < 2n, then anywhere from 0 to it.
    const std::size_t max_p = (2 * n - 1) / 3;
    const std::size_t p = std::uniform_int_distribution<std::size_t>(0, max_p)(rng);
    tail.push_back({next_item, n, p});
    corpus.low_quality.push_back(next_item++);
  }
  for (std::size_t k = 0; k < config.high_quality_items; ++k) {
    std::size_t n = degree_dist(rng);
    // Smallest p with 3p > 2n, keeping at least one negative.
    while ((2 * n) / 3 + 1 > n - 1) ++n;
    if (n >= config.gamma) throw Error(ErrorCode::kInvalidArgument, "gamma too small for a high-quality pattern");
    const std::size_t min_p = (2 * n) / 3 + 1;
    const std::size_t p = std::uniform_int_distribution<std::size_t>(min_p, n - 1)(rng);
    tail.push_back({next_item, n, p});
    corpus.high_quality.push_back(next_item++);
  }
  for (std::size_t k = 0; k < config.boundary_items; ++k) {
    // Degree a multiple of 3, exactly two thirds positive.
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, (config.gamma - 1) / 3)(rng) * 3;
    tail.push_back({next_item, n, 2 * n / 3});
    corpus.boundary.push_back(next_item++);
  }
  data.num_items = next_item;

  // One fresh user per tail rating; the user balances it with 6 - r on a
  // popular item and adds a balanced (4, 2) pair on two more popular items.
  UserId next_user = 0;
  const auto pick_popular = [&](std::unordered_set<ItemId>& used) {
    std::uniform_int_distribution<std::size_t> d(0, corpus.popular.size() - 1);
    while (true) {
      const ItemId i = corpus.popular[d(rng)];
      if (used.insert(i).second) return i;
    }
  };
  for (const auto& t : tail) {
    for (std::size_t k = 0; k < t.degree; ++k) {
      const UserId u = next_user++;
      const double r = k < t.positives ? 5.0 : 1.0;
      std::unordered_set<ItemId> used;
      data.interactions.push_back({u, t.id, r});
      data.interactions.push_back({u, pick_popular(used), 6.0 - r});
      data.interactions.push_back({u, pick_popular(used), 4.0});
      data.interactions.push_back({u, pick_popular(used), 2.0});
    }
  }
  data.num_users = next_user;

  // Top popular items up to degree >= gamma with balanced pairs from extra users.
  std::vector<std::size_t> deg = item_degrees(data);
  bool short_item = true;
  while (short_item) {
    short_item = false;
    for (ItemId i : corpus.popular) {
      if (deg[i] >= config.gamma) continue;
      short_item = true;
      const UserId u = static_cast<UserId>(data.num_users++);
      std::unordered_set<ItemId> used{i};
      const ItemId partner = pick_popular(used);
      data.interactions.push_back({u, i, 3.0});
      data.interactions.push_back({u, partner, 3.0});
      ++deg[i];
      ++deg[partner];
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Power-law corpus with popularity-confounded interactions.
//
// Item exposure weights follow a power law; users pick items with
// probability proportional to exposure^popularity_confounding times
// exp(affinity / temperature), and rate them from latent affinity plus an
// item quality term. A fraction of long-tail items are planted with very low
// quality.

struct PowerLawConfig {
  std::size_t num_users = 2000;
  std::size_t num_items = 1500;
  double degree_exponent = 1.5;      // density of item exposure ~ x^-exponent
  double exposure_range = 200.0;     // max / min exposure weight
  double popularity_confounding = 1.0;
  std::size_t factors = 8;
  double preference_temperature = 0.5;
  std::size_t min_interactions = 12;
  double mean_extra_interactions = 18.0;
  double low_quality_tail_share = 0.15;  // among the 80% least exposed items
  double rating_noise = 0.6;
  std::uint64_t seed = 1;
};

struct PowerLawCorpus {
  RatingDataset data;
  std::vector<double> exposure;  // per item
  std::vector<double> quality;   // per item
  std::vector<ItemId> low_quality;
};

inline PowerLawCorpus power_law_corpus(const PowerLawConfig& config) {
  if (config.num_items < 2 || config.num_users < 1 || config.degree_exponent <= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid power-law corpus configuration");
  }
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PowerLawCorpus corpus;
  const std::size_t ni = config.num_items;
  const std::size_t nu = config.num_users;

  // Truncated Pareto by inverse CDF: density ~ x^-s on [1, range].
  const double a = config.degree_exponent - 1.0;
  const double tail_mass = 1.0 - std::pow(config.exposure_range, -a);
  corpus.exposure.resize(ni);
  for (auto& w : corpus.exposure) w = std::pow(1.0 - unit(rng) * tail_mass, -1.0 / a);

  std::vector<ItemId> by_exposure(ni);
  for (ItemId i = 0; i < ni; ++i) by_exposure[i] = i;
  std::sort(by_exposure.begin(), by_exposure.end(),
            [&](ItemId x, ItemId y) { return corpus.exposure[x] > corpus.exposure[y]; });
  corpus.quality.resize(ni);
  for (auto& q : corpus.quality) q = 0.5 * normal(rng);
  const std::size_t head = ni / 5;
  for (std::size_t k = head; k < ni; ++k) {
    if (unit(rng) < config.low_quality_tail_share) {
      corpus.quality[by_exposure[k]] = -2.0 + 0.3 * normal(rng);
      corpus.low_quality.push_back(by_exposure[k]);
    }
  }
  std::sort(corpus.low_quality.begin(), corpus.low_quality.end());

  const double scale = 1.0 / std::sqrt(static_cast<double>(config.factors));
  std::vector<std::vector<double>> item_f(ni, std::vector<double>(config.factors));
  for (auto& f : item_f) {
    for (auto& x : f) x = normal(rng);
  }

  RatingDataset& data = corpus.data;
  data.num_users = nu;
  data.num_items = ni;
  data.rating_scale = {1.0, 5.0};
  std::vector<double> weight(ni), affinity(ni);
  std::exponential_distribution<double> extra(1.0 / config.mean_extra_interactions);
  for (UserId u = 0; u < nu; ++u) {
    std::vector<double> user_f(config.factors);
    for (auto& x : user_f) x = normal(rng);
    const double user_bias = 0.4 * normal(rng);
    for (std::size_t i = 0; i < ni; ++i) {
      double dot = 0.0;
      for (std::size_t f = 0; f < config.factors; ++f) dot += user_f[f] * item_f[i][f];
      affinity[i] = dot * scale;
      weight[i] = std::pow(corpus.exposure[i], config.popularity_confounding) *
                  std::exp((affinity[i] + 0.5 * corpus.quality[i]) / config.preference_temperature);
    }
    const std::size_t n = std::min<std::size_t>(
        ni - 1, config.min_interactions + static_cast<std::size_t>(extra(rng)));
    // Weighted sampling without replacement (exponential-key method).
    std::vector<std::pair<double, ItemId>> keys(ni);
    for (ItemId i = 0; i < ni; ++i) keys[i] = {-std::log(unit(rng) + 1e-300) / weight[i], i};
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n), keys.end());
    for (std::size_t k = 0; k < n; ++k) {
      const ItemId i = keys[k].second;
      const double raw = 3.5 + affinity[i] + corpus.quality[i] + user_bias + config.rating_noise * normal(rng);
      data.interactions.push_back({u, i, std::clamp(std::round(raw), 1.0, 5.0)});
    }
  }
  return corpus;
}

}  // namespace fairrec
