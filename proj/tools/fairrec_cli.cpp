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

// fairrec: prepare, filter, train, evaluate and sweep from the command line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairrec.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> dataset;
  std::optional<std::string> delimiter;
  std::optional<std::size_t> k_core;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<std::size_t> gamma;
  std::optional<std::string> objective;
  std::optional<std::vector<std::size_t>> cutoffs;
  std::optional<std::string> out;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> dim;
  std::optional<std::size_t> layers;
  std::optional<double> learning_rate;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> patience;
  std::optional<bool> filter;
  std::optional<std::string> propagation;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config; flags override it");
  cmd->add_option("--dataset", o.dataset, "rating file: user, item, rating[, ...] per line");
  cmd->add_option("--delimiter", o.delimiter, "field delimiter (default: tab)");
  cmd->add_option("--k-core", o.k_core, "k-core threshold (default 10)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--lambda", o.lambda, "cost-sensitivity weight in [0, 1]");
  cmd->add_option("--gamma", o.gamma, "degree threshold of the low-quality filter");
  cmd->add_option("--objective", o.objective, "cost_sensitive_ce | plain_ce | bpr");
  cmd->add_option("--cutoffs", o.cutoffs, "evaluation cutoffs")->delimiter(',');
  cmd->add_option("--out", o.out, "output directory (default: $FAIRREC_OUT or ./fairrec_out)");
  cmd->add_option("--epochs", o.epochs, "maximum epochs");
  cmd->add_option("--dim", o.dim, "embedding size");
  cmd->add_option("--layers", o.layers, "propagation layers");
  cmd->add_option("--lr", o.learning_rate, "learning rate");
  cmd->add_option("--batch-size", o.batch_size, "mini-batch size");
  cmd->add_option("--patience", o.patience, "early-stopping patience in epochs");
  cmd->add_option("--filter", o.filter, "train on the filtered graph (true/false)");
  cmd->add_option("--propagation", o.propagation, "per_batch | per_epoch");
}

fairrec::ExperimentConfig resolve(const Overrides& o) {
  fairrec::ExperimentConfig c;
  if (const char* root = std::getenv("FAIRREC_OUT"); root != nullptr && *root != '\0') c.out_dir = root;
  if (!o.config_path.empty()) fairrec::apply_json(c, fairrec::detail::read_json(o.config_path));
  if (o.dataset) c.dataset = *o.dataset;
  if (o.delimiter) {
    const std::string d = *o.delimiter == "\\t" ? "\t" : *o.delimiter;
    if (d.size() != 1) throw fairrec::Error(fairrec::ErrorCode::kInvalidArgument, "delimiter must be one character");
    c.format.delimiter = d[0];
  }
  if (o.k_core) c.k_core = *o.k_core;
  if (o.seed) c.seed = *o.seed;
  if (o.lambda) c.train.lambda = *o.lambda;
  if (o.gamma) c.train.gamma = *o.gamma;
  if (o.objective) c.train.objective = fairrec::parse_objective(*o.objective);
  if (o.cutoffs) c.cutoffs = *o.cutoffs;
  if (o.out) c.out_dir = *o.out;
  if (o.epochs) c.train.max_epochs = *o.epochs;
  if (o.dim) c.train.dim = *o.dim;
  if (o.layers) c.train.num_layers = *o.layers;
  if (o.learning_rate) c.train.learning_rate = *o.learning_rate;
  if (o.batch_size) c.train.batch_size = *o.batch_size;
  if (o.patience) c.train.patience = *o.patience;
  if (o.filter) c.filter = *o.filter;
  if (o.propagation) fairrec::apply_json(c, {{"train", {{"propagation", *o.propagation}}}});
  c.validate();
  return c;
}

int cmd_prepare(const fairrec::ExperimentConfig& c) {
  const auto p = fairrec::prepare(c);
  fairrec::write_prepared(c.out_dir, p);
  std::cout << "users\t" << p.filtered.users << "\nitems\t" << p.filtered.items << "\ninteractions\t"
            << p.filtered.interactions << "\ndensity\t" << p.filtered.density << "\ntrain\t"
            << p.split.train.size() << "\nvalidation\t" << p.split.validation.size() << "\ntest\t"
            << p.split.test.size() << "\ntrain_only_users\t" << p.split.train_only_users << '\n';
  return 0;
}

int cmd_filter(const fairrec::ExperimentConfig& c) {
  const fs::path dir = c.out_dir;
  const auto split = fairrec::load_prepared(dir);
  const auto result = fairrec::run_filter(split, c.train.gamma);
  {
    auto out = fairrec::detail::open_out(dir / "filtered_graph.tsv");
    fairrec::write_graph(out, result.graph);
  }
  fairrec::detail::write_json(dir / "filter_report.json", fairrec::to_json(result.report));
  std::cout << "gamma\t" << result.report.gamma << "\nremoved_items\t" << result.report.removed_items.size()
            << "\nremoved_edges\t" << result.report.removed_edges << "\nremaining_edges\t"
            << result.graph.num_edges() << "\nisolated_users\t" << result.report.isolated_users.size() << '\n';
  return 0;
}

int cmd_train(const fairrec::ExperimentConfig& c) {
  const fs::path dir = c.out_dir;
  const auto split = fairrec::load_prepared(dir);
  fairrec::BipartiteGraph graph;
  if (c.filter) {
    if (!fs::exists(dir / "filtered_graph.tsv")) {
      throw fairrec::Error(fairrec::ErrorCode::kIo, "no filtered graph in '" + dir.string() +
                                                        "' (run filter first, or pass --filter false)");
    }
    auto in = fairrec::detail::open_in(dir / "filtered_graph.tsv");
    graph = fairrec::read_graph(in, split.train.num_users, split.train.num_items);
  } else {
    graph = fairrec::build_graph(split.train);
  }
  const auto config = c.arm_config();
  const auto result = fairrec::fit(split, graph, config, [](const fairrec::EpochRecord& r) {
    std::cerr << "epoch " << r.epoch << " loss " << r.loss << " val_ndcg " << r.validation_ndcg << '\n';
  });
  {
    auto out = fairrec::detail::open_out(dir / "checkpoint.bin", true);
    fairrec::save_checkpoint(out, result.best, config.seed);
  }
  {
    auto out = fairrec::detail::open_out(dir / "trace.tsv");
    fairrec::write_trace(out, result.trace);
  }
  fairrec::detail::write_json(dir / "train_config.json", fairrec::to_json(c));
  std::cout << "epochs\t" << result.trace.epochs.size() << "\nbest_epoch\t" << result.trace.best_epoch
            << "\nbest_val_ndcg\t" << result.trace.best_validation_ndcg << '\n';
  return 0;
}

int cmd_eval(const fairrec::ExperimentConfig& c, const std::string& checkpoint_path) {
  const fs::path dir = c.out_dir;
  const fs::path ckpt_path = checkpoint_path.empty() ? dir / "checkpoint.bin" : fs::path(checkpoint_path);
  if (!fs::exists(ckpt_path)) {
    throw fairrec::Error(fairrec::ErrorCode::kIo, "missing checkpoint '" + ckpt_path.string() + "'");
  }
  const auto split = fairrec::load_prepared(dir);
  auto in = fairrec::detail::open_in(ckpt_path, true);
  const auto ckpt = fairrec::load_checkpoint(in);
  if (ckpt.header.num_users != split.train.num_users ||
      ckpt.header.num_nodes != split.train.num_users + split.train.num_items) {
    throw fairrec::Error(fairrec::ErrorCode::kFormat, "checkpoint does not match the prepared split");
  }
  const auto state = fairrec::state_from_checkpoint(ckpt);
  const auto degrees = fairrec::item_degrees(split.train);
  const auto report = fairrec::evaluate(state, split, degrees, c.cutoffs);
  fairrec::detail::write_json(dir / "eval_report.json", fairrec::to_json(report));
  {
    auto out = fairrec::detail::open_out(dir / "eval_cutoffs.tsv");
    fairrec::write_cutoff_table(out, report);
  }
  fairrec::write_cutoff_table(std::cout, report);
  return 0;
}

int cmd_sweep(const fairrec::ExperimentConfig& c, const std::string& param, const std::vector<double>& values) {
  const fs::path dir = c.out_dir;
  const auto split = fairrec::load_prepared(dir);
  fairrec::SweepParameter p;
  if (param == "lambda") {
    p = fairrec::SweepParameter::kLambda;
  } else if (param == "gamma") {
    p = fairrec::SweepParameter::kGamma;
  } else {
    throw fairrec::Error(fairrec::ErrorCode::kInvalidArgument, "sweep parameter must be lambda or gamma");
  }
  const auto rows = fairrec::run_sweep(split, c, p, values, [&](const fairrec::SweepRow& r) {
    std::cerr << param << '=' << r.value << (r.error.empty() ? " done" : " failed: " + r.error) << '\n';
  });
  {
    auto out = fairrec::detail::open_out(dir / ("sweep_" + param + ".tsv"));
    fairrec::write_sweep_table(out, param, rows);
  }
  fairrec::write_sweep_table(std::cout, param, rows);
  return 0;
}

int cmd_synth(const std::string& path, const fairrec::PowerLawConfig& config) {
  const auto corpus = fairrec::power_law_corpus(config);
  auto out = fairrec::detail::open_out(path);
  out << "user\titem\trating\n";
  for (const auto& r : corpus.data.interactions) {
    out << 'u' << r.user << "\ti" << r.item << '\t' << r.rating << '\n';
  }
  std::cout << "interactions\t" << corpus.data.size() << "\nlow_quality_items\t" << corpus.low_quality.size()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-aware graph collaborative filtering experiments"};
  app.require_subcommand(1);

  Overrides o;
  auto* prepare = app.add_subcommand("prepare", "load, k-core filter and split a rating file");
  auto* filter = app.add_subcommand("filter", "remove edges of low-degree, low-quality items");
  auto* train = app.add_subcommand("train", "train one arm with early stopping");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  auto* sweep = app.add_subcommand("sweep", "train and evaluate one arm per lambda or gamma value");
  auto* synth = app.add_subcommand("synth", "write a synthetic power-law rating file");
  for (auto* cmd : {prepare, filter, train, eval, sweep}) add_common(cmd, o);

  std::string checkpoint;
  eval->add_option("--checkpoint", checkpoint, "checkpoint path (default: <out>/checkpoint.bin)");
  std::string sweep_param;
  std::vector<double> sweep_values;
  sweep->add_option("--param", sweep_param, "lambda | gamma")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->delimiter(',')->required();

  std::string synth_path;
  fairrec::PowerLawConfig synth_config;
  synth->add_option("--output", synth_path, "output rating file")->required();
  synth->add_option("--users", synth_config.num_users);
  synth->add_option("--items", synth_config.num_items);
  synth->add_option("--seed", synth_config.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_path, synth_config);
    const auto config = resolve(o);
    if (prepare->parsed()) return cmd_prepare(config);
    if (filter->parsed()) return cmd_filter(config);
    if (train->parsed()) return cmd_train(config);
    if (eval->parsed()) return cmd_eval(config, checkpoint);
    if (sweep->parsed()) return cmd_sweep(config, sweep_param, sweep_values);
  } catch (const fairrec::Error& e) {
    std::cerr << "error\tcode=" << fairrec::error_code_name(e.code()) << "\tmessage=" << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error\tcode=internal\tmessage=" << e.what() << '\n';
    return 1;
  }
  return 0;
}
