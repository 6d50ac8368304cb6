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

// End-to-end experiment pipeline behind the command-line tool. Every stage
// reads and writes plain files under one output directory:
//
//   split.tsv, users.tsv, items.tsv, stats.json   prepare
//   filtered_graph.tsv, filter_report.json         filter
//   checkpoint.bin, trace.tsv, train_config.json   train
//   eval_report.json, eval_cutoffs.tsv             eval
//   sweep_<param>.tsv                              sweep

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairrec/common.hpp"
#include "fairrec/dataset.hpp"
#include "fairrec/disentangle.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/metrics.hpp"
#include "fairrec/propagation.hpp"
#include "fairrec/training.hpp"

namespace fairrec {

namespace fs = std::filesystem;

struct ExperimentConfig {
  std::string dataset;
  InputFormat format;
  std::size_t k_core = 10;
  SplitFractions fractions;
  std::uint64_t seed = 2024;  // master seed
  TrainConfig train;
  bool filter = true;  // train on the filtered graph
  std::vector<std::size_t> cutoffs{100, 300};
  std::string out_dir = "fairrec_out";

  void validate() const {
    if (cutoffs.empty()) throw Error(ErrorCode::kInvalidArgument, "cutoffs must be non-empty");
    for (auto c : cutoffs) {
      if (c == 0) throw Error(ErrorCode::kInvalidArgument, "cutoffs must be >= 1");
    }
    if (k_core < 1) throw Error(ErrorCode::kInvalidArgument, "k_core must be >= 1");
    train.validate();
  }

  // The train config with its seed tied to the master seed.
  TrainConfig arm_config() const {
    TrainConfig c = train;
    c.seed = derive_seed(seed, "train");
    return c;
  }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  std::string delim(1, c.format.delimiter);
  return {
      {"dataset", c.dataset},
      {"delimiter", delim},
      {"k_core", c.k_core},
      {"fractions", {c.fractions.train, c.fractions.validation, c.fractions.test}},
      {"seed", c.seed},
      {"filter", c.filter},
      {"cutoffs", c.cutoffs},
      {"out", c.out_dir},
      {"train",
       {{"lambda", c.train.lambda},
        {"gamma", c.train.gamma},
        {"dim", c.train.dim},
        {"layers", c.train.num_layers},
        {"learning_rate", c.train.learning_rate},
        {"optimizer", c.train.optimizer == OptimizerKind::kAdam ? "adam" : "sgd"},
        {"batch_size", c.train.batch_size},
        {"max_epochs", c.train.max_epochs},
        {"patience", c.train.patience},
        {"objective", objective_name(c.train.objective)},
        {"validation_cutoff", c.train.validation_cutoff},
        {"propagation", c.train.propagation == Propagation::kPerBatch ? "per_batch" : "per_epoch"}}},
  };
}

// Missing keys keep their current values.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  try {
    if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
    if (j.contains("delimiter")) {
      const auto d = j.at("delimiter").get<std::string>();
      if (d.size() != 1) throw Error(ErrorCode::kInvalidArgument, "delimiter must be one character");
      c.format.delimiter = d[0];
    }
    if (j.contains("k_core")) c.k_core = j.at("k_core").get<std::size_t>();
    if (j.contains("fractions")) {
      const auto f = j.at("fractions").get<std::vector<double>>();
      if (f.size() != 3) throw Error(ErrorCode::kInvalidArgument, "fractions needs three values");
      c.fractions = {f[0], f[1], f[2]};
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("filter")) c.filter = j.at("filter").get<bool>();
    if (j.contains("cutoffs")) c.cutoffs = j.at("cutoffs").get<std::vector<std::size_t>>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    if (j.contains("train")) {
      const auto& t = j.at("train");
      auto& tc = c.train;
      if (t.contains("lambda")) tc.lambda = t.at("lambda").get<double>();
      if (t.contains("gamma")) tc.gamma = t.at("gamma").get<std::size_t>();
      if (t.contains("dim")) tc.dim = t.at("dim").get<std::size_t>();
      if (t.contains("layers")) tc.num_layers = t.at("layers").get<std::size_t>();
      if (t.contains("learning_rate")) tc.learning_rate = t.at("learning_rate").get<double>();
      if (t.contains("optimizer")) {
        const auto o = t.at("optimizer").get<std::string>();
        if (o == "adam") {
          tc.optimizer = OptimizerKind::kAdam;
        } else if (o == "sgd") {
          tc.optimizer = OptimizerKind::kSgd;
        } else {
          throw Error(ErrorCode::kInvalidArgument, "unknown optimizer '" + o + "'");
        }
      }
      if (t.contains("batch_size")) tc.batch_size = t.at("batch_size").get<std::size_t>();
      if (t.contains("max_epochs")) tc.max_epochs = t.at("max_epochs").get<std::size_t>();
      if (t.contains("patience")) tc.patience = t.at("patience").get<std::size_t>();
      if (t.contains("objective")) tc.objective = parse_objective(t.at("objective").get<std::string>());
      if (t.contains("validation_cutoff")) tc.validation_cutoff = t.at("validation_cutoff").get<std::size_t>();
      if (t.contains("propagation")) {
        const auto p = t.at("propagation").get<std::string>();
        if (p == "per_batch") {
          tc.propagation = Propagation::kPerBatch;
        } else if (p == "per_epoch") {
          tc.propagation = Propagation::kPerEpoch;
        } else {
          throw Error(ErrorCode::kInvalidArgument, "unknown propagation mode '" + p + "'");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// File helpers

namespace detail {

inline std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  return out;
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

inline nlohmann::json to_json(const DatasetStats& s) {
  return {{"users", s.users}, {"items", s.items}, {"interactions", s.interactions}, {"density", s.density}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// prepare

struct Prepared {
  Split split;
  DatasetStats raw;
  DatasetStats filtered;  // after k-core
};

inline Prepared prepare(const RatingDataset& raw, const ExperimentConfig& config) {
  validate(raw);
  RatingDataset core = k_core_filter(raw, config.k_core);
  Prepared p;
  p.raw = stats(raw);
  p.filtered = stats(core);
  p.split = split_per_user(core, config.fractions, derive_seed(config.seed, "split"));
  return p;
}

inline Prepared prepare(const ExperimentConfig& config) {
  if (config.dataset.empty()) throw Error(ErrorCode::kInvalidArgument, "no dataset given");
  auto in = detail::open_in(config.dataset);
  return prepare(load_interactions(in, config.format), config);
}

inline void write_prepared(const fs::path& dir, const Prepared& p) {
  {
    auto out = detail::open_out(dir / "split.tsv");
    write_split(out, p.split);
  }
  {
    auto out = detail::open_out(dir / "users.tsv");
    write_keys(out, p.split.train.user_keys);
  }
  {
    auto out = detail::open_out(dir / "items.tsv");
    write_keys(out, p.split.train.item_keys);
  }
  detail::write_json(dir / "stats.json",
                     {{"raw", detail::to_json(p.raw)},
                      {"k_core", detail::to_json(p.filtered)},
                      {"split",
                       {{"train", p.split.train.size()},
                        {"validation", p.split.validation.size()},
                        {"test", p.split.test.size()},
                        {"train_only_users", p.split.train_only_users},
                        {"seed", p.split.seed}}},
                      {"rating_scale", {p.split.train.rating_scale.min, p.split.train.rating_scale.max}}});
}

inline Split load_prepared(const fs::path& dir) {
  if (!fs::exists(dir / "split.tsv")) {
    throw Error(ErrorCode::kIo, "no prepared split in '" + dir.string() + "' (run prepare first)");
  }
  const auto st = detail::read_json(dir / "stats.json");
  auto users_in = detail::open_in(dir / "users.tsv");
  auto items_in = detail::open_in(dir / "items.tsv");
  auto split_in = detail::open_in(dir / "split.tsv");
  const auto scale = st.at("rating_scale").get<std::vector<double>>();
  return read_split(split_in, read_keys(users_in), read_keys(items_in), {scale.at(0), scale.at(1)},
                    st.at("split").at("seed").get<std::uint64_t>());
}

// ---------------------------------------------------------------------------
// filter

inline void write_graph(std::ostream& out, const BipartiteGraph& g) {
  out << "user\titem\n";
  for (const auto& e : g.edges()) out << e.user << '\t' << e.item << '\n';
}

inline BipartiteGraph read_graph(std::istream& in, std::size_t num_users, std::size_t num_items) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (++line_no == 1 || line.empty()) continue;
    std::istringstream fields(line);
    std::uint64_t u = 0, i = 0;
    if (!(fields >> u >> i) || u >= num_users || i >= num_items) {
      throw Error(ErrorCode::kFormat, "graph file line " + std::to_string(line_no) + " malformed");
    }
    edges.push_back({static_cast<UserId>(u), static_cast<ItemId>(i)});
  }
  return BipartiteGraph(num_users, num_items, std::move(edges));
}

inline FilterResult run_filter(const Split& split, std::size_t gamma) {
  return filter_low_quality(build_graph(split.train), split.train, gamma);
}

// ---------------------------------------------------------------------------
// train / eval in memory

struct ArmResult {
  FitResult fit;
  EvalReport report;
  std::optional<FilterReport> filter;
};

// Trains one arm on `split` (filtered when config.filter) and evaluates it on
// the test profiles with the unfiltered train degrees.
inline ArmResult run_arm(const Split& split, const ExperimentConfig& config, const EpochCallback& on_epoch = {}) {
  config.validate();
  ArmResult arm;
  BipartiteGraph graph = build_graph(split.train);
  const std::vector<std::size_t> degrees(graph.item_degree().begin(), graph.item_degree().end());
  if (config.filter) {
    FilterResult filtered = filter_low_quality(graph, split.train, config.train.gamma);
    graph = std::move(filtered.graph);
    arm.filter = std::move(filtered.report);
  }
  arm.fit = fit(split, graph, config.arm_config(), on_epoch);
  arm.report = evaluate(arm.fit.best, split, degrees, config.cutoffs);
  return arm;
}

inline std::string format_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

inline void write_cutoff_table(std::ostream& out, const EvalReport& report) {
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); };
  out << "cutoff\trecall\tndcg\tmrr\tmap\tpru\tpri\teo\n";
  for (const auto& m : report.at) {
    out << m.cutoff << '\t' << format_double(m.recall) << '\t' << format_double(m.ndcg) << '\t'
        << format_double(m.mrr) << '\t' << format_double(m.map) << '\t' << opt(report.pru.value) << '\t'
        << opt(report.pri.value) << '\t' << format_double(m.eo) << '\n';
  }
}

// ---------------------------------------------------------------------------
// sweep

enum class SweepParameter { kLambda, kGamma };

struct SweepRow {
  double value = 0.0;
  std::size_t cutoff = 0;
  std::optional<EvalReport> report;
  std::string error;  // empty on success
};

// One arm per value on the same split; every arm rebuilds its random streams
// from the master seed so arms differ only in the swept parameter.
inline std::vector<SweepRow> run_sweep(const Split& split, const ExperimentConfig& config, SweepParameter param,
                                       const std::vector<double>& values,
                                       const std::function<void(const SweepRow&)>& on_row = {}) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one value");
  config.validate();
  std::vector<SweepRow> rows;
  const std::size_t cutoff = *std::min_element(config.cutoffs.begin(), config.cutoffs.end());
  for (double v : values) {
    SweepRow row;
    row.value = v;
    row.cutoff = cutoff;
    try {
      ExperimentConfig arm = config;
      if (param == SweepParameter::kLambda) {
        arm.train.lambda = v;
      } else {
        if (v < 0 || v != std::floor(v)) throw Error(ErrorCode::kInvalidArgument, "gamma must be a non-negative integer");
        arm.train.gamma = static_cast<std::size_t>(v);
      }
      row.report = run_arm(split, arm).report;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    if (on_row) on_row(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_sweep_table(std::ostream& out, std::string_view param, const std::vector<SweepRow>& rows) {
  out << param << "\tcutoff\tndcg\tpru\tpri\teo\tstatus\n";
  for (const auto& r : rows) {
    out << format_double(r.value) << '\t' << r.cutoff << '\t';
    if (r.report) {
      const auto& m = r.report->at_cutoff(r.cutoff);
      const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); };
      out << format_double(m.ndcg) << '\t' << opt(r.report->pru.value) << '\t' << opt(r.report->pri.value) << '\t'
          << format_double(m.eo) << "\tok\n";
    } else {
      std::string msg = r.error;
      for (auto& ch : msg) {
        if (ch == '\t' || ch == '\n') ch = ' ';
      }
      out << "nan\tnan\tnan\tnan\terror: " << msg << '\n';
    }
  }
}

}  // namespace fairrec
