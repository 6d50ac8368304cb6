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

// Top-K evaluation: utility metrics (Recall, NDCG, MRR, MAP) and popularity
// fairness metrics (PRU, PRI, EO).
//
// Ranking protocol: for every user with a non-empty relevant set, all items
// outside the user's excluded set are candidates; candidates are ordered by
// score descending, ties by ascending item id. Ranks are 1-based.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairrec/common.hpp"
#include "fairrec/dataset.hpp"
#include "fairrec/propagation.hpp"

namespace fairrec {

using Profile = std::vector<ItemId>;  // sorted, unique

inline std::vector<Profile> user_profiles(const RatingDataset& data) {
  std::vector<Profile> out(data.num_users);
  for (const auto& r : data.interactions) out[r.user].push_back(r.item);
  for (auto& p : out) std::sort(p.begin(), p.end());
  return out;
}

inline std::vector<Profile> merge_profiles(const std::vector<Profile>& a, const std::vector<Profile>& b) {
  std::vector<Profile> out(a.size());
  for (std::size_t u = 0; u < a.size(); ++u) {
    std::set_union(a[u].begin(), a[u].end(), b[u].begin(), b[u].end(), std::back_inserter(out[u]));
  }
  return out;
}

inline bool contains(const Profile& p, ItemId i) { return std::binary_search(p.begin(), p.end(), i); }

struct RankedList {
  UserId user = 0;
  std::vector<ItemId> items;  // best first
};

struct UserRanking {
  RankedList top;
  Profile relevant;
  // 1-based rank of each relevant item in the full candidate ranking,
  // aligned with `relevant`. Filled only when full ranks are requested.
  std::vector<std::size_t> relevant_rank;
};

// score_fn(user, scores) must fill `scores` (sized num_items) for the user.
template <typename ScoreFn>
std::vector<UserRanking> rank_users(ScoreFn&& score_fn, std::size_t num_items,
                                    const std::vector<Profile>& excluded,
                                    const std::vector<Profile>& relevant, std::size_t cutoff,
                                    bool full_ranks) {
  if (cutoff < 1) throw Error(ErrorCode::kInvalidArgument, "cutoff must be >= 1");
  std::vector<UserRanking> out;
  std::vector<double> scores(num_items);
  std::vector<ItemId> candidates;
  candidates.reserve(num_items);
  for (std::size_t u = 0; u < relevant.size(); ++u) {
    if (relevant[u].empty()) continue;
    score_fn(static_cast<UserId>(u), scores);
    candidates.clear();
    const Profile& skip = excluded[u];
    auto it = skip.begin();
    for (ItemId i = 0; i < num_items; ++i) {
      while (it != skip.end() && *it < i) ++it;
      if (it != skip.end() && *it == i) continue;
      candidates.push_back(i);
    }
    const auto better = [&](ItemId a, ItemId b) {
      return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
    };
    UserRanking ranking;
    ranking.top.user = static_cast<UserId>(u);
    ranking.relevant = relevant[u];
    const std::size_t keep = std::min(cutoff, candidates.size());
    if (full_ranks) {
      std::sort(candidates.begin(), candidates.end(), better);
      ranking.relevant_rank.assign(ranking.relevant.size(), 0);
      for (std::size_t pos = 0; pos < candidates.size(); ++pos) {
        const auto rel = std::lower_bound(ranking.relevant.begin(), ranking.relevant.end(), candidates[pos]);
        if (rel != ranking.relevant.end() && *rel == candidates[pos]) {
          ranking.relevant_rank[static_cast<std::size_t>(rel - ranking.relevant.begin())] = pos + 1;
        }
      }
    } else {
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                        candidates.end(), better);
    }
    ranking.top.items.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep));
    out.push_back(std::move(ranking));
  }
  return out;
}

inline auto embedding_scorer(const EmbeddingState& state) {
  const auto num_items = static_cast<Eigen::Index>(state.final.rows()) -
                         static_cast<Eigen::Index>(state.num_users);
  return [&state, num_items](UserId u, std::vector<double>& scores) {
    const auto items = state.final.bottomRows(num_items);
    Eigen::Map<Eigen::VectorXd> out(scores.data(), num_items);
    out.noalias() = items * state.user_row(u).transpose();
  };
}

// Test-time ranking: candidates exclude each user's train and validation
// items; relevant items are the test profile.
inline std::vector<UserRanking> rank_all(const EmbeddingState& state, const Split& split,
                                         std::size_t cutoff, bool full_ranks = true) {
  const auto excluded = merge_profiles(user_profiles(split.train), user_profiles(split.validation));
  return rank_users(embedding_scorer(state), split.train.num_items, excluded,
                    user_profiles(split.test), cutoff, full_ranks);
}

// ---------------------------------------------------------------------------
// Per-user utility metrics. `ranked` is the user's list best-first; only its
// first `cutoff` entries count.

namespace detail {
inline std::span<const ItemId> head(std::span<const ItemId> ranked, std::size_t cutoff) {
  return ranked.first(std::min(cutoff, ranked.size()));
}
}  // namespace detail

inline double recall_at_m(std::span<const ItemId> ranked, const Profile& relevant, std::size_t cutoff) {
  std::size_t hits = 0;
  for (ItemId i : detail::head(ranked, cutoff)) hits += contains(relevant, i) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

// Binary relevance: DCG = sum over hit positions p of 1/log2(p+1), ideal DCG
// places min(N, |relevant|) hits at the top.
inline double ndcg_at_n(std::span<const ItemId> ranked, const Profile& relevant, std::size_t cutoff) {
  const auto top = detail::head(ranked, cutoff);
  double dcg = 0.0;
  for (std::size_t p = 0; p < top.size(); ++p) {
    if (contains(relevant, top[p])) dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(cutoff, relevant.size());
  for (std::size_t p = 0; p < ideal; ++p) idcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  return dcg / idcg;
}

// 1/rank of the first hit; 0 without a hit in the top `cutoff`.
inline double reciprocal_rank(std::span<const ItemId> ranked, const Profile& relevant, std::size_t cutoff) {
  const auto top = detail::head(ranked, cutoff);
  for (std::size_t p = 0; p < top.size(); ++p) {
    if (contains(relevant, top[p])) return 1.0 / static_cast<double>(p + 1);
  }
  return 0.0;
}

// (1/|relevant|) * sum over hit positions p <= cutoff of precision@p.
inline double average_precision(std::span<const ItemId> ranked, const Profile& relevant, std::size_t cutoff) {
  const auto top = detail::head(ranked, cutoff);
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t p = 0; p < top.size(); ++p) {
    if (contains(relevant, top[p])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

// ---------------------------------------------------------------------------
// Spearman's rank correlation: Pearson correlation of average (tie-corrected)
// ranks. Undefined (nullopt) when either side is constant or n < 2.

inline std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    // Positions start..end-1 share the mean 1-based rank.
    const double avg = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = avg;
    start = end;
  }
  return ranks;
}

inline std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kInvalidArgument, "spearman: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    const double dx = rx[k] - mean;
    const double dy = ry[k] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Fairness metrics

struct PruResult {
  std::optional<double> value;
  std::size_t users = 0;          // users contributing a correlation
  std::size_t skipped_users = 0;  // fewer than 2 test items or constant degrees
};

// -mean over users of SRC(degree of test item, full rank of test item).
inline PruResult pru(std::span<const UserRanking> rankings, std::span<const std::size_t> item_degree) {
  PruResult result;
  double sum = 0.0;
  std::vector<double> deg, rank;
  for (const auto& r : rankings) {
    deg.clear();
    rank.clear();
    for (std::size_t k = 0; k < r.relevant.size(); ++k) {
      deg.push_back(static_cast<double>(item_degree[r.relevant[k]]));
      rank.push_back(static_cast<double>(r.relevant_rank.at(k)));
    }
    const auto src = spearman(deg, rank);
    if (!src) {
      ++result.skipped_users;
      continue;
    }
    sum += *src;
    ++result.users;
  }
  if (result.users > 0) result.value = -sum / static_cast<double>(result.users);
  return result;
}

struct PriResult {
  std::optional<double> value;
  std::size_t items = 0;  // items appearing in at least one test profile
};

// -SRC over items between degree and mean full rank among the users whose
// test profile contains the item.
inline PriResult pri(std::span<const UserRanking> rankings, std::span<const std::size_t> item_degree) {
  std::vector<double> rank_sum(item_degree.size(), 0.0);
  std::vector<std::size_t> count(item_degree.size(), 0);
  for (const auto& r : rankings) {
    for (std::size_t k = 0; k < r.relevant.size(); ++k) {
      rank_sum[r.relevant[k]] += static_cast<double>(r.relevant_rank.at(k));
      ++count[r.relevant[k]];
    }
  }
  std::vector<double> deg, mean_rank;
  for (std::size_t i = 0; i < item_degree.size(); ++i) {
    if (count[i] == 0) continue;
    deg.push_back(static_cast<double>(item_degree[i]));
    mean_rank.push_back(rank_sum[i] / static_cast<double>(count[i]));
  }
  PriResult result;
  result.items = deg.size();
  if (const auto src = spearman(deg, mean_rank)) result.value = -*src;
  return result;
}

struct GroupAssignment {
  std::vector<bool> popular;  // G0 membership, indexed by item
  std::size_t num_popular = 0;
};

// G0: the round(share * |I|) items of highest degree (ties by ascending id).
inline GroupAssignment assign_groups(std::span<const std::size_t> item_degree, double popular_share = 0.2) {
  std::vector<ItemId> order(item_degree.size());
  std::iota(order.begin(), order.end(), ItemId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](ItemId a, ItemId b) { return item_degree[a] > item_degree[b]; });
  GroupAssignment groups;
  groups.num_popular = static_cast<std::size_t>(std::llround(popular_share * static_cast<double>(order.size())));
  groups.popular.assign(order.size(), false);
  for (std::size_t k = 0; k < groups.num_popular; ++k) groups.popular[order[k]] = true;
  return groups;
}

// |h0 - h1| / (h0 + h1) for one user, h_g = test hits from group g in the top
// `cutoff`. Users without hits contribute 0.
inline double eo_user(std::span<const ItemId> ranked, const Profile& relevant,
                      const GroupAssignment& groups, std::size_t cutoff) {
  double h0 = 0.0, h1 = 0.0;
  for (ItemId i : detail::head(ranked, cutoff)) {
    if (!contains(relevant, i)) continue;
    (groups.popular[i] ? h0 : h1) += 1.0;
  }
  if (h0 + h1 == 0.0) return 0.0;
  return std::abs(h0 - h1) / (h0 + h1);
}

inline double eo(std::span<const UserRanking> rankings, const GroupAssignment& groups, std::size_t cutoff) {
  if (rankings.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rankings) sum += eo_user(r.top.items, r.relevant, groups, cutoff);
  return sum / static_cast<double>(rankings.size());
}

// ---------------------------------------------------------------------------
// Report

struct CutoffMetrics {
  std::size_t cutoff = 0;
  double recall = 0.0;
  double ndcg = 0.0;
  double mrr = 0.0;
  double map = 0.0;
  double eo = 0.0;
  // Per-user values aligned with EvalReport::users.
  std::vector<double> user_recall, user_ndcg, user_rr, user_ap, user_eo;
};

struct EvalReport {
  std::vector<UserId> users;
  std::vector<CutoffMetrics> at;  // ascending cutoff
  PruResult pru;
  PriResult pri;
  std::size_t num_popular = 0;
  std::size_t num_unpopular = 0;

  const CutoffMetrics& at_cutoff(std::size_t cutoff) const {
    for (const auto& m : at) {
      if (m.cutoff == cutoff) return m;
    }
    throw Error(ErrorCode::kInvalidArgument, "no metrics for cutoff " + std::to_string(cutoff));
  }
};

inline double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Computes every metric from rankings that carry full ranks and at least
// max(cutoffs) top items. `item_degree` is the popularity table shared by all
// arms (unfiltered train degrees).
inline EvalReport evaluate_rankings(std::span<const UserRanking> rankings,
                                    std::span<const std::size_t> item_degree,
                                    std::vector<std::size_t> cutoffs) {
  if (cutoffs.empty()) throw Error(ErrorCode::kInvalidArgument, "at least one cutoff is required");
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
  EvalReport report;
  const GroupAssignment groups = assign_groups(item_degree);
  report.num_popular = groups.num_popular;
  report.num_unpopular = item_degree.size() - groups.num_popular;
  for (const auto& r : rankings) report.users.push_back(r.top.user);
  for (std::size_t cutoff : cutoffs) {
    CutoffMetrics m;
    m.cutoff = cutoff;
    for (const auto& r : rankings) {
      m.user_recall.push_back(recall_at_m(r.top.items, r.relevant, cutoff));
      m.user_ndcg.push_back(ndcg_at_n(r.top.items, r.relevant, cutoff));
      m.user_rr.push_back(reciprocal_rank(r.top.items, r.relevant, cutoff));
      m.user_ap.push_back(average_precision(r.top.items, r.relevant, cutoff));
      m.user_eo.push_back(eo_user(r.top.items, r.relevant, groups, cutoff));
    }
    m.recall = mean(m.user_recall);
    m.ndcg = mean(m.user_ndcg);
    m.mrr = mean(m.user_rr);
    m.map = mean(m.user_ap);
    m.eo = mean(m.user_eo);
    report.at.push_back(std::move(m));
  }
  report.pru = pru(rankings, item_degree);
  report.pri = pri(rankings, item_degree);
  return report;
}

inline EvalReport evaluate(const EmbeddingState& state, const Split& split,
                           std::span<const std::size_t> item_degree, std::vector<std::size_t> cutoffs) {
  if (cutoffs.empty()) throw Error(ErrorCode::kInvalidArgument, "at least one cutoff is required");
  const std::size_t max_cutoff = *std::max_element(cutoffs.begin(), cutoffs.end());
  const auto rankings = rank_all(state, split, max_cutoff, true);
  return evaluate_rankings(rankings, item_degree, std::move(cutoffs));
}

// Mean NDCG@cutoff on the validation profiles, train items excluded.
inline double validation_ndcg(const EmbeddingState& state, const std::vector<Profile>& train_profiles,
                              const std::vector<Profile>& validation_profiles, std::size_t num_items,
                              std::size_t cutoff) {
  const auto rankings = rank_users(embedding_scorer(state), num_items, train_profiles,
                                   validation_profiles, cutoff, false);
  if (rankings.empty()) throw Error(ErrorCode::kEmptyValidation, "validation set is empty");
  double sum = 0.0;
  for (const auto& r : rankings) sum += ndcg_at_n(r.top.items, r.relevant, cutoff);
  return sum / static_cast<double>(rankings.size());
}

namespace detail {

inline nlohmann::json distribution(std::vector<double> v) {
  if (v.empty()) return nullptr;
  std::sort(v.begin(), v.end());
  const auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {{"mean", mean(v)}, {"min", v.front()}, {"p25", q(0.25)}, {"median", q(0.5)},
          {"p75", q(0.75)}, {"max", v.back()}};
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json cutoffs = nlohmann::json::array();
  for (const auto& m : report.at) {
    cutoffs.push_back({
        {"cutoff", m.cutoff},
        {"metrics",
         {{"recall", m.recall},
          {"ndcg", m.ndcg},
          {"mrr", m.mrr},
          {"map", m.map},
          {"pru", detail::optional_json(report.pru.value)},
          {"pri", detail::optional_json(report.pri.value)},
          {"eo", m.eo}}},
        {"per_user",
         {{"recall", detail::distribution(m.user_recall)},
          {"ndcg", detail::distribution(m.user_ndcg)},
          {"mrr", detail::distribution(m.user_rr)},
          {"map", detail::distribution(m.user_ap)},
          {"eo", detail::distribution(m.user_eo)}}},
    });
  }
  return {
      {"evaluated_users", report.users.size()},
      {"cutoffs", std::move(cutoffs)},
      {"pru_users", report.pru.users},
      {"pru_skipped_users", report.pru.skipped_users},
      {"pri_items", report.pri.items},
      {"groups", {{"popular", report.num_popular}, {"unpopular", report.num_unpopular}, {"popular_share", 0.2}}},
  };
}

}  // namespace fairrec
