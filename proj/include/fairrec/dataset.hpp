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

// Explicit-feedback rating data: ingestion, k-core filtering and the
// per-user train/validation/test split.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairrec/common.hpp"

namespace fairrec {

struct Interaction {
  UserId user = 0;
  ItemId item = 0;
  double rating = 0.0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct RatingScale {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

struct RatingDataset {
  std::vector<Interaction> interactions;
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  RatingScale rating_scale;
  // Dense index -> raw key from the source file. Either empty or sized
  // num_users / num_items.
  std::vector<std::string> user_keys;
  std::vector<std::string> item_keys;

  std::size_t size() const { return interactions.size(); }
  bool empty() const { return interactions.empty(); }

  friend bool operator==(const RatingDataset&, const RatingDataset&) = default;
};

inline std::uint64_t pair_key(UserId u, ItemId i) {
  return (static_cast<std::uint64_t>(u) << 32) | i;
}

// Throws kInvalidArgument on the first violated invariant.
inline void validate(const RatingDataset& data) {
  std::unordered_map<std::uint64_t, std::size_t> seen;
  seen.reserve(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto& r = data.interactions[n];
    if (r.user >= data.num_users || r.item >= data.num_items) {
      throw Error(ErrorCode::kInvalidArgument,
                  "interaction " + std::to_string(n) + " has an out-of-range id");
    }
    if (!(r.rating >= data.rating_scale.min && r.rating <= data.rating_scale.max)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "interaction " + std::to_string(n) + " has a rating outside the scale");
    }
    if (!seen.emplace(pair_key(r.user, r.item), n).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate (user, item) pair at interaction " + std::to_string(n));
    }
  }
  if (!data.user_keys.empty() && data.user_keys.size() != data.num_users) {
    throw Error(ErrorCode::kInvalidArgument, "user key table size mismatch");
  }
  if (!data.item_keys.empty() && data.item_keys.size() != data.num_items) {
    throw Error(ErrorCode::kInvalidArgument, "item key table size mismatch");
  }
}

inline std::vector<std::size_t> user_degrees(const RatingDataset& data) {
  std::vector<std::size_t> deg(data.num_users, 0);
  for (const auto& r : data.interactions) ++deg[r.user];
  return deg;
}

inline std::vector<std::size_t> item_degrees(const RatingDataset& data) {
  std::vector<std::size_t> deg(data.num_items, 0);
  for (const auto& r : data.interactions) ++deg[r.item];
  return deg;
}

// ---------------------------------------------------------------------------
// Ingestion

struct InputFormat {
  char delimiter = '\t';
  // Strip one layer of surrounding double quotes from each field
  // ("276725";"034545104X";"0" style exports).
  bool strip_quotes = true;
  // When unset, the scale is the observed [min, max].
  std::optional<RatingScale> rating_scale;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char delim,
                                                  bool strip_quotes) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    std::string_view field = line.substr(start, pos == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : pos - start);
    if (delim != '\t') field = trim(field);
    if (strip_quotes && field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    out.push_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace detail

// Reads one interaction per line: user key, item key, rating, then any
// trailing fields (ignored). A first line whose rating field does not parse is
// treated as a header. Duplicate (user, item) pairs keep the last rating.
inline RatingDataset load_interactions(std::istream& in, const InputFormat& format = {}) {
  RatingDataset data;
  std::unordered_map<std::string, UserId> user_index;
  std::unordered_map<std::string, ItemId> item_index;
  std::unordered_map<std::uint64_t, std::size_t> position;

  std::string line;
  std::size_t line_no = 0;
  bool seen_record = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    const auto fields = detail::split_fields(line, format.delimiter, format.strip_quotes);
    const std::optional<double> rating =
        fields.size() >= 3 ? detail::parse_real(fields[2]) : std::nullopt;
    if (!seen_record && !rating.has_value()) {
      // Header line.
      seen_record = true;
      continue;
    }
    seen_record = true;
    if (fields.size() < 3) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_no) + ": expected at least 3 fields, got " +
                      std::to_string(fields.size()));
    }
    if (!rating.has_value()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_no) + ": unparsable rating '" +
                      std::string(fields[2]) + "'");
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_no) + ": empty user or item key");
    }
    if (format.rating_scale &&
        (*rating < format.rating_scale->min || *rating > format.rating_scale->max)) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_no) + ": rating outside the declared scale");
    }

    auto [uit, unew] = user_index.try_emplace(std::string(fields[0]),
                                              static_cast<UserId>(data.user_keys.size()));
    if (unew) data.user_keys.emplace_back(fields[0]);
    auto [iit, inew] = item_index.try_emplace(std::string(fields[1]),
                                              static_cast<ItemId>(data.item_keys.size()));
    if (inew) data.item_keys.emplace_back(fields[1]);

    const Interaction rec{uit->second, iit->second, *rating};
    auto [pit, pnew] = position.try_emplace(pair_key(rec.user, rec.item), data.size());
    if (pnew) {
      data.interactions.push_back(rec);
    } else {
      data.interactions[pit->second].rating = rec.rating;
    }
  }
  if (data.interactions.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no interactions in input");
  }
  data.num_users = data.user_keys.size();
  data.num_items = data.item_keys.size();
  if (format.rating_scale) {
    data.rating_scale = *format.rating_scale;
  } else {
    auto [lo, hi] = std::minmax_element(
        data.interactions.begin(), data.interactions.end(),
        [](const Interaction& a, const Interaction& b) { return a.rating < b.rating; });
    data.rating_scale = {lo->rating, hi->rating};
  }
  return data;
}

// ---------------------------------------------------------------------------
// k-core

// Keeps only the listed interactions and re-densifies ids in order of first
// use of the old ids (ascending), carrying the key tables along.
inline RatingDataset compact(const RatingDataset& data, const std::vector<bool>& keep_user,
                             const std::vector<bool>& keep_item) {
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> user_map(data.num_users, kNone);
  std::vector<std::uint32_t> item_map(data.num_items, kNone);
  RatingDataset out;
  out.rating_scale = data.rating_scale;
  for (std::size_t u = 0; u < data.num_users; ++u) {
    if (!keep_user[u]) continue;
    user_map[u] = static_cast<UserId>(out.num_users++);
    if (!data.user_keys.empty()) out.user_keys.push_back(data.user_keys[u]);
  }
  for (std::size_t i = 0; i < data.num_items; ++i) {
    if (!keep_item[i]) continue;
    item_map[i] = static_cast<ItemId>(out.num_items++);
    if (!data.item_keys.empty()) out.item_keys.push_back(data.item_keys[i]);
  }
  for (const auto& r : data.interactions) {
    if (keep_user[r.user] && keep_item[r.item]) {
      out.interactions.push_back({user_map[r.user], item_map[r.item], r.rating});
    }
  }
  return out;
}

// Peels users and items with fewer than k interactions until every survivor
// has degree >= k.
inline RatingDataset k_core_filter(const RatingDataset& data, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  auto udeg = user_degrees(data);
  auto ideg = item_degrees(data);
  std::vector<bool> alive_user(data.num_users, true);
  std::vector<bool> alive_item(data.num_items, true);
  std::vector<bool> alive_edge(data.size(), true);

  std::vector<std::vector<std::size_t>> user_edges(data.num_users);
  std::vector<std::vector<std::size_t>> item_edges(data.num_items);
  for (std::size_t e = 0; e < data.size(); ++e) {
    user_edges[data.interactions[e].user].push_back(e);
    item_edges[data.interactions[e].item].push_back(e);
  }

  // Node ids: users [0, U), items [U, U+I).
  const std::size_t nu = data.num_users;
  std::vector<std::size_t> queue;
  for (std::size_t u = 0; u < nu; ++u) {
    if (udeg[u] < k) {
      alive_user[u] = false;
      queue.push_back(u);
    }
  }
  for (std::size_t i = 0; i < data.num_items; ++i) {
    if (ideg[i] < k) {
      alive_item[i] = false;
      queue.push_back(nu + i);
    }
  }
  while (!queue.empty()) {
    const std::size_t node = queue.back();
    queue.pop_back();
    if (node < nu) {
      for (std::size_t e : user_edges[node]) {
        if (!alive_edge[e]) continue;
        alive_edge[e] = false;
        const ItemId i = data.interactions[e].item;
        if (alive_item[i] && --ideg[i] < k) {
          alive_item[i] = false;
          queue.push_back(nu + i);
        }
      }
    } else {
      for (std::size_t e : item_edges[node - nu]) {
        if (!alive_edge[e]) continue;
        alive_edge[e] = false;
        const UserId u = data.interactions[e].user;
        if (alive_user[u] && --udeg[u] < k) {
          alive_user[u] = false;
          queue.push_back(u);
        }
      }
    }
  }
  RatingDataset out = compact(data, alive_user, alive_item);
  if (out.empty()) {
    throw Error(ErrorCode::kDatasetEliminated,
                "dataset eliminated by " + std::to_string(k) + "-core filtering");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Split

struct SplitFractions {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
};

struct Split {
  RatingDataset train;
  RatingDataset validation;
  RatingDataset test;
  std::uint64_t seed = 0;
  // Users with fewer than 3 interactions, placed entirely in train.
  std::size_t train_only_users = 0;

  friend bool operator==(const Split&, const Split&) = default;
};

struct PartSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

// Per-user part sizes: train = floor(f_train * n) capped at n - 2,
// validation = max(1, floor(f_val * n)), test gets the remainder. Users with
// n < 3 go entirely to train.
inline PartSizes part_sizes(std::size_t n, const SplitFractions& f) {
  if (n < 3) return {n, 0, 0};
  constexpr double kSlack = 1e-9;
  auto train = static_cast<std::size_t>(std::floor(f.train * static_cast<double>(n) + kSlack));
  train = std::min(train, n - 2);
  auto val = static_cast<std::size_t>(std::floor(f.validation * static_cast<double>(n) + kSlack));
  val = std::clamp<std::size_t>(val, 1, n - train - 1);
  return {train, val, n - train - val};
}

namespace detail {

inline RatingDataset empty_like(const RatingDataset& data) {
  RatingDataset out;
  out.num_users = data.num_users;
  out.num_items = data.num_items;
  out.rating_scale = data.rating_scale;
  out.user_keys = data.user_keys;
  out.item_keys = data.item_keys;
  return out;
}

}  // namespace detail

inline Split split_per_user(const RatingDataset& data, const SplitFractions& fractions,
                            std::uint64_t seed) {
  const double total = fractions.train + fractions.validation + fractions.test;
  if (std::abs(total - 1.0) > 1e-9 || fractions.train < 0 || fractions.validation < 0 ||
      fractions.test < 0) {
    throw Error(ErrorCode::kInvalidArgument, "split fractions must be non-negative and sum to 1");
  }
  std::vector<std::vector<std::size_t>> by_user(data.num_users);
  for (std::size_t e = 0; e < data.size(); ++e) by_user[data.interactions[e].user].push_back(e);

  Split split{detail::empty_like(data), detail::empty_like(data), detail::empty_like(data), seed, 0};
  std::mt19937_64 rng(seed);
  for (auto& rows : by_user) {
    if (rows.empty()) continue;
    // Canonical order first so the result does not depend on file order.
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return data.interactions[a].item < data.interactions[b].item;
    });
    std::shuffle(rows.begin(), rows.end(), rng);
    const PartSizes sizes = part_sizes(rows.size(), fractions);
    if (sizes.test == 0) ++split.train_only_users;
    std::size_t n = 0;
    for (; n < sizes.train; ++n) split.train.interactions.push_back(data.interactions[rows[n]]);
    for (; n < sizes.train + sizes.validation; ++n) {
      split.validation.interactions.push_back(data.interactions[rows[n]]);
    }
    for (; n < rows.size(); ++n) split.test.interactions.push_back(data.interactions[rows[n]]);
  }
  return split;
}

// ---------------------------------------------------------------------------
// Split files: split.tsv holds "user<TAB>item<TAB>rating<TAB>part" with dense
// ids; the key tables map dense ids back to raw keys, one per line.

inline void write_split(std::ostream& out, const Split& split) {
  out << "user\titem\trating\tpart\n";
  out.precision(17);
  const std::pair<const RatingDataset*, const char*> parts[] = {
      {&split.train, "train"}, {&split.validation, "validation"}, {&split.test, "test"}};
  for (const auto& [part, tag] : parts) {
    for (const auto& r : part->interactions) {
      out << r.user << '\t' << r.item << '\t' << r.rating << '\t' << tag << '\n';
    }
  }
}

inline void write_keys(std::ostream& out, const std::vector<std::string>& keys) {
  for (const auto& k : keys) out << k << '\n';
}

inline std::vector<std::string> read_keys(std::istream& in) {
  std::vector<std::string> keys;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    keys.push_back(line);
  }
  return keys;
}

inline Split read_split(std::istream& in, std::vector<std::string> user_keys,
                        std::vector<std::string> item_keys, RatingScale scale,
                        std::uint64_t seed) {
  RatingDataset base;
  base.num_users = user_keys.size();
  base.num_items = item_keys.size();
  base.rating_scale = scale;
  base.user_keys = std::move(user_keys);
  base.item_keys = std::move(item_keys);
  Split split{base, base, base, seed, 0};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line, '\t', false);
    const auto user = fields.size() == 4 ? detail::parse_real(fields[0]) : std::nullopt;
    const auto item = fields.size() == 4 ? detail::parse_real(fields[1]) : std::nullopt;
    const auto rating = fields.size() == 4 ? detail::parse_real(fields[2]) : std::nullopt;
    if (!user || !item || !rating || *user < 0 || *item < 0 ||
        *user >= static_cast<double>(base.num_users) ||
        *item >= static_cast<double>(base.num_items)) {
      throw Error(ErrorCode::kFormat, "split file line " + std::to_string(line_no) + " malformed");
    }
    const Interaction rec{static_cast<UserId>(*user), static_cast<ItemId>(*item), *rating};
    const std::string_view tag = detail::trim(fields[3]);
    if (tag == "train") {
      split.train.interactions.push_back(rec);
    } else if (tag == "validation") {
      split.validation.interactions.push_back(rec);
    } else if (tag == "test") {
      split.test.interactions.push_back(rec);
    } else {
      throw Error(ErrorCode::kFormat,
                  "split file line " + std::to_string(line_no) + ": unknown part tag");
    }
  }
  // Recount users that ended up with no test rows.
  std::vector<bool> has_test(base.num_users, false);
  std::vector<bool> has_any(base.num_users, false);
  for (const auto& r : split.test.interactions) has_test[r.user] = true;
  for (const auto& r : split.train.interactions) has_any[r.user] = true;
  for (std::size_t u = 0; u < base.num_users; ++u) {
    if (has_any[u] && !has_test[u]) ++split.train_only_users;
  }
  return split;
}

struct DatasetStats {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
  double density = 0.0;  // interactions / (users * items)
};

inline DatasetStats stats(const RatingDataset& data) {
  DatasetStats s{data.num_users, data.num_items, data.size(), 0.0};
  if (s.users > 0 && s.items > 0) {
    s.density = static_cast<double>(s.interactions) /
                (static_cast<double>(s.users) * static_cast<double>(s.items));
  }
  return s;
}

}  // namespace fairrec
