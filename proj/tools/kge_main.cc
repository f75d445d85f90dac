/*
 * Copyright 2026 The kge-ensemble Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// kge: train, evaluate and analyze knowledge graph embedding ensembles.

#include <exception>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.h"
#include "kge/errors.h"

namespace {

using kge::tools::ExitCode;

// Reads flat key=value files as options of whichever subcommand was given.
class SubcommandConfig : public CLI::ConfigTOML {
 public:
  explicit SubcommandConfig(const CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigTOML::from_config(input);
    const auto subs = app_->get_subcommands();
    if (subs.empty()) return items;
    for (CLI::ConfigItem& item : items) {
      if (item.parents.empty()) item.parents = {subs.front()->get_name()};
    }
    return items;
  }

 private:
  const CLI::App* app_;
};

// Training flags are applied over the per-kind defaults only when given,
// either on the command line or through --config.
struct TrainFlags {
  std::string model = "transe";
  double lr = 0;
  std::string optimizer;
  std::size_t batches = 0;
  std::size_t batch_size = 0;
  std::size_t eta = 0;
  double gamma = 0;
  double lambda = 0;
  int norm = 2;
  std::size_t max_epochs = 0;
  std::size_t valid_every = 0;
  std::size_t patience = 0;
  std::uint64_t seed = 1;
};

void AddTrainCommand(CLI::App& app, kge::tools::TrainOptions& opts,
                     TrainFlags& flags) {
  CLI::App* cmd = app.add_subcommand("train", "Train a k-replica ensemble");
  cmd->fallthrough();
  cmd->add_option("--model", flags.model,
                  "transe, rotate, distmult, complex, distmult_n3, complex_n3")
      ->capture_default_str();
  cmd->add_option("--dim", opts.dim, "Per-replica embedding size d_l")
      ->capture_default_str();
  cmd->add_option("--k", opts.k, "Number of replicas")->capture_default_str();
  cmd->add_option("--runs", opts.runs,
                  "Repeated runs; run r uses base seed seed + r*k")
      ->capture_default_str();
  cmd->add_option("--workers", opts.workers, "Concurrent replica trainings")
      ->capture_default_str();
  cmd->add_option("--dataset", opts.dataset,
                  "Directory with train/valid/test.txt")
      ->required();
  cmd->add_option("--out", opts.out, "Run directory")->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Base seed")->capture_default_str();
  cmd->add_option("--lr", flags.lr, "Learning rate");
  cmd->add_option("--optimizer", flags.optimizer, "adam or adagrad");
  cmd->add_option("--batches", flags.batches,
                  "Batches per epoch (binary loss)");
  cmd->add_option("--batch-size", flags.batch_size,
                  "Triples per batch (multiclass loss)");
  cmd->add_option("--eta", flags.eta, "Negatives per positive and side");
  cmd->add_option("--gamma", flags.gamma, "Margin");
  cmd->add_option("--lambda", flags.lambda, "Regularization coefficient");
  cmd->add_option("--norm", flags.norm, "TransE norm order (1 or 2)")
      ->capture_default_str();
  cmd->add_option("--max-epochs", flags.max_epochs, "Epoch cap");
  cmd->add_option("--valid-every", flags.valid_every, "Validation period");
  cmd->add_option("--patience", flags.patience,
                  "Validations without improvement before stopping");
}

// Resolves TrainConfig: kind defaults, then given flags.
void ResolveTrain(const CLI::App& cmd, const TrainFlags& flags,
                  kge::tools::TrainOptions& opts) {
  opts.kind = kge::ParseModelKind(flags.model);
  kge::TrainConfig& c = opts.config;
  c = kge::DefaultTrainConfig(opts.kind);
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  c.seed = flags.seed;
  c.norm_order = flags.norm;
  if (given("--lr")) c.lr = flags.lr;
  if (given("--optimizer"))
    c.optimizer = kge::ParseOptimizerKind(flags.optimizer);
  if (given("--batches")) c.batches_per_epoch = flags.batches;
  if (given("--batch-size")) c.batch_size = flags.batch_size;
  if (given("--eta")) c.eta = flags.eta;
  if (given("--gamma")) c.gamma = flags.gamma;
  if (given("--lambda")) c.lambda = flags.lambda;
  if (given("--max-epochs")) c.max_epochs = flags.max_epochs;
  if (given("--valid-every")) c.valid_every = flags.valid_every;
  if (given("--patience")) c.patience = flags.patience;
}

void AddEvalCommand(CLI::App& app, kge::tools::EvalOptions& opts) {
  CLI::App* cmd = app.add_subcommand(
      "eval", "Evaluate checkpoints; several seeds of one config aggregate");
  cmd->fallthrough();
  cmd->add_option("--checkpoint", opts.checkpoints,
                  "Checkpoint path or glob; repeatable")
      ->required();
  cmd->add_option("--dataset", opts.dataset, "Dataset directory")->required();
  cmd->add_option("--out", opts.out, "Output directory")->capture_default_str();
  cmd->add_option("--workers", opts.workers, "Evaluation threads")
      ->capture_default_str();
  cmd->add_flag("--ranks", opts.include_ranks,
                "Include per-triple ranks in metrics.json");
}

void AddAnalyzeCommand(CLI::App& app, kge::tools::AnalyzeOptions& opts,
                       std::string& checkpoint) {
  CLI::App* cmd = app.add_subcommand(
      "analyze", "Relation categories, symmetric rules, per-category metrics");
  cmd->fallthrough();
  cmd->add_option("--dataset", opts.dataset, "Dataset directory")->required();
  cmd->add_option("--checkpoint", checkpoint,
                  "Checkpoint for the per-category breakdown");
  cmd->add_option("--out", opts.out, "Output directory")->capture_default_str();
  cmd->add_option("--sym-threshold", opts.sym_threshold,
                  "Minimum symmetric rule confidence")
      ->capture_default_str();
  cmd->add_option("--min-support", opts.min_support,
                  "Minimum (x, y) pairs for a rule")
      ->capture_default_str();
  cmd->add_option("--cat-threshold", opts.cat_threshold,
                  "Average fan-out/fan-in threshold for the n side")
      ->capture_default_str();
  cmd->add_option("--workers", opts.workers, "Evaluation threads")
      ->capture_default_str();
}

void AddSynthCommand(CLI::App& app, kge::tools::SynthOptions& opts,
                     std::string& pattern) {
  CLI::App* cmd = app.add_subcommand("synth", "Write a synthetic dataset");
  cmd->fallthrough();
  cmd->add_option("--pattern", pattern, "symmetric, 1-n, n-1, n-n or mixed")
      ->capture_default_str();
  cmd->add_option("--entities", opts.spec.entities, "Entity budget")
      ->capture_default_str();
  cmd->add_option("--pairs", opts.spec.pairs, "Unordered pairs (symmetric)")
      ->capture_default_str();
  cmd->add_option("--triples", opts.spec.triples,
                  "Triple count (0: all the mixed design produces)")
      ->capture_default_str();
  cmd->add_option("--fan", opts.spec.fan, "Fan-out/fan-in")
      ->capture_default_str();
  cmd->add_option("--valid-frac", opts.spec.valid_fraction, "Validation share")
      ->capture_default_str();
  cmd->add_option("--test-frac", opts.spec.test_fraction, "Test share")
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Generator seed")->capture_default_str();
  cmd->add_option("--out", opts.out, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge graph embedding ensembles", "kge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", KGE_VERSION);
  app.set_config("--config", "",
                 "Flat key=value file with flag names as keys; flags win");
  app.config_formatter(std::make_shared<SubcommandConfig>(&app));

  kge::tools::TrainOptions train;
  TrainFlags train_flags;
  kge::tools::EvalOptions eval;
  kge::tools::AnalyzeOptions analyze;
  std::string analyze_checkpoint;
  kge::tools::SynthOptions synth;
  std::string synth_pattern = "mixed";

  AddTrainCommand(app, train, train_flags);
  AddEvalCommand(app, eval);
  AddAnalyzeCommand(app, analyze, analyze_checkpoint);
  AddSynthCommand(app, synth, synth_pattern);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ExitCode::kExitOk : ExitCode::kExitUsage;
  }

  try {
    if (CLI::App* cmd = app.get_subcommand("train"); cmd->parsed()) {
      ResolveTrain(*cmd, train_flags, train);
      return kge::tools::RunTrain(train);
    }
    if (app.get_subcommand("eval")->parsed()) return kge::tools::RunEval(eval);
    if (app.get_subcommand("analyze")->parsed()) {
      if (!analyze_checkpoint.empty()) analyze.checkpoint = analyze_checkpoint;
      return kge::tools::RunAnalyze(analyze);
    }
    synth.spec.pattern = kge::ParseSyntheticPattern(synth_pattern);
    return kge::tools::RunSynth(synth);
  } catch (const kge::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCode::kExitUsage;
  } catch (const kge::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCode::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCode::kExitRuntime;
  }
}
