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

#include "commands.h"

#include <glob.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kge/ensemble.h"
#include "kge/errors.h"
#include "kge/evaluation.h"
#include "kge/patterns.h"
#include "kge/report.h"

#ifndef KGE_VERSION
#define KGE_VERSION "unknown"
#endif

namespace kge::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream out;
  out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

// Shortest text that parses back to the same double.
std::string Exact(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

Dataset LoadAndReport(const fs::path& dir) {
  Dataset d = LoadDataset(dir);
  std::cerr << "loaded " << dir.string() << ": " << d.num_entities()
            << " entities, " << d.num_relations() << " relations, "
            << d.train.size() << "/" << d.valid.size() << "/" << d.test.size()
            << " train/valid/test\n";
  for (const std::string& w : d.report.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  return d;
}

// Flat key=value text accepted back through --config.
std::string ManifestConfig(const TrainOptions& o, std::uint64_t seed) {
  const TrainConfig& c = o.config;
  std::ostringstream out;
  out << "model=" << ModelKindName(o.kind) << '\n'
      << "dim=" << o.dim << '\n'
      << "k=" << o.k << '\n'
      << "workers=" << o.workers << '\n'
      << "dataset=\"" << fs::absolute(o.dataset).string() << "\"\n"
      << "seed=" << seed << '\n'
      << "lr=" << Exact(c.lr) << '\n'
      << "optimizer=" << OptimizerKindName(c.optimizer) << '\n'
      << "batches=" << c.batches_per_epoch << '\n'
      << "batch-size=" << c.batch_size << '\n'
      << "eta=" << c.eta << '\n'
      << "gamma=" << Exact(c.gamma) << '\n'
      << "lambda=" << Exact(c.lambda) << '\n'
      << "norm=" << c.norm_order << '\n'
      << "max-epochs=" << c.max_epochs << '\n'
      << "valid-every=" << c.valid_every << '\n'
      << "patience=" << c.patience << '\n';
  return out.str();
}

json ManifestJson(const TrainOptions& o, const TrainConfig& config,
                  const fs::path& run_dir, const std::string& started,
                  const EnsembleTraining& trained) {
  json replicas = json::array();
  for (std::size_t j = 0; j < trained.replicas.size(); ++j) {
    const TrainResult& r = trained.replicas[j];
    json entry = {{"index", j},
                  {"seed", config.seed + j},
                  {"epochs", r.curve.size()},
                  {"best_epoch", r.best_epoch},
                  {"stopped_early", r.stopped_early},
                  {"warnings", r.warnings}};
    entry["best_valid_mrr"] =
        r.best_valid_mrr ? json(*r.best_valid_mrr) : json(nullptr);
    replicas.push_back(std::move(entry));
  }
  return {{"tool", "kge"},
          {"version", KGE_VERSION},
          {"started", started},
          {"finished", Timestamp()},
          {"run_dir", fs::absolute(run_dir).string()},
          {"dataset", fs::absolute(o.dataset).string()},
          {"model", ModelKindName(o.kind)},
          {"display_name", DisplayName(o.kind, o.k)},
          {"dim", o.dim},
          {"k", o.k},
          {"d", o.k * o.dim},
          {"workers", o.workers},
          {"base_seed", config.seed},
          {"config",
           {{"loss", LossKindName(config.loss)},
            {"gamma", config.gamma},
            {"eta", config.eta},
            {"lambda", config.lambda},
            {"optimizer", OptimizerKindName(config.optimizer)},
            {"lr", config.lr},
            {"batches", config.batches_per_epoch},
            {"batch_size", config.batch_size},
            {"max_epochs", config.max_epochs},
            {"valid_every", config.valid_every},
            {"patience", config.patience},
            {"norm", config.norm_order},
            {"n3_init_scale", config.n3_init_scale}}},
          {"config_digest", ConfigDigest(config)},
          {"replicas", replicas}};
}

}  // namespace

std::size_t CapWorkers(std::size_t requested) {
  std::size_t workers = std::max<std::size_t>(requested, 1);
  if (const char* env = std::getenv("KGE_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || cap == 0) {
      throw ConfigError(
          std::string("KGE_THREADS must be a positive integer, got '") + env +
          "'");
    }
    workers = std::min<std::size_t>(workers, cap);
  }
  return workers;
}

std::vector<fs::path> ExpandCheckpoints(
    const std::vector<std::string>& patterns) {
  std::vector<fs::path> out;
  for (const std::string& pattern : patterns) {
    if (pattern.find_first_of("*?[") == std::string::npos) {
      out.emplace_back(pattern);
      continue;
    }
    glob_t matches{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &matches);
    if (rc == GLOB_NOMATCH) {
      globfree(&matches);
      throw DataError("missing checkpoint: no file matches " + pattern);
    }
    if (rc != 0) {
      globfree(&matches);
      throw DataError("cannot expand checkpoint pattern " + pattern);
    }
    for (std::size_t i = 0; i < matches.gl_pathc; ++i) {
      out.emplace_back(matches.gl_pathv[i]);
    }
    globfree(&matches);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw ConfigError("no checkpoint given");
  return out;
}

int RunTrain(const TrainOptions& options) {
  ValidateTrainConfig(options.config, options.kind);
  if (options.runs < 1) throw ConfigError("runs must be >= 1");
  // Geometry errors before the dataset is read.
  InitModel(options.kind, 1, 1, options.dim, options.config.seed,
            options.config.norm_order);
  const Dataset dataset = LoadAndReport(options.dataset);
  const FilterIndex filter(dataset);
  const std::size_t workers = CapWorkers(options.workers);

  for (std::size_t run = 0; run < options.runs; ++run) {
    TrainConfig config = options.config;
    config.seed = options.config.seed + run * options.k;
    const fs::path dir = options.runs == 1
                             ? options.out
                             : options.out / ("run" + std::to_string(run));
    fs::create_directories(dir);
    const std::string started = Timestamp();
    std::cerr << "training " << DisplayName(options.kind, options.k)
              << " k=" << options.k << " d_l=" << options.dim
              << " seed=" << config.seed << " workers=" << workers << '\n';

    const EnsembleTraining trained = TrainEnsemble(
        options.kind, options.k, options.dim, dataset, filter, config, workers);

    SaveCheckpoint(trained.model, config, dir / "checkpoint.kge");
    for (std::size_t j = 0; j < trained.replicas.size(); ++j) {
      std::ostringstream csv;
      WriteCurveCsv(trained.replicas[j].curve, csv);
      WriteText(dir / ("curve_r" + std::to_string(j) + ".csv"), csv.str());
    }
    TrainOptions resolved = options;
    resolved.workers = workers;
    WriteText(dir / "manifest.cfg", ManifestConfig(resolved, config.seed));
    WriteText(
        dir / "manifest.json",
        ManifestJson(resolved, config, dir, started, trained).dump(2) + "\n");

    std::cout << dir.string() << ":";
    for (std::size_t j = 0; j < trained.replicas.size(); ++j) {
      const auto& r = trained.replicas[j];
      std::cout << " r" << j << "(epoch " << r.best_epoch;
      if (r.best_valid_mrr) std::cout << ", valid mrr " << *r.best_valid_mrr;
      std::cout << ")";
    }
    std::cout << '\n';
  }
  return kExitOk;
}

int RunEval(const EvalOptions& options) {
  const auto paths = ExpandCheckpoints(options.checkpoints);
  const Dataset dataset = LoadAndReport(options.dataset);
  const FilterIndex filter(dataset);
  const std::size_t workers = CapWorkers(options.workers);

  struct Group {
    ModelKind kind;
    std::size_t dim;
    std::size_t k;
    std::vector<std::string> paths;
    std::vector<MetricsReport> reports;
  };
  std::vector<Group> groups;
  for (const fs::path& path : paths) {
    const LoadedCheckpoint loaded = LoadCheckpoint(path);
    CheckVocabulary(loaded.model, dataset);
    const EnsembleModel& model = loaded.model;
    MetricsReport report =
        EvaluateModel(MakeScorer(model), dataset, filter, workers);
    std::cout << path.string() << ": mrr " << report.mrr;
    for (const auto& [n, v] : report.hits)
      std::cout << " hits@" << n << ' ' << v;
    std::cout << '\n';
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.kind == model.kind() && g.dim == model.replica_dim() &&
             g.k == model.k();
    });
    if (it == groups.end()) {
      groups.push_back({model.kind(), model.replica_dim(), model.k(), {}, {}});
      it = std::prev(groups.end());
    }
    it->paths.push_back(path.string());
    it->reports.push_back(std::move(report));
  }

  json metrics;
  std::vector<SummaryRow> rows;
  for (Group& g : groups) {
    rows.push_back({g.kind, g.dim, g.k, AggregateRuns(g.reports)});
  }
  if (paths.size() == 1) {
    const Group& g = groups.front();
    metrics = json::parse(MetricsJson(g.reports.front(), options.include_ranks,
                                      &dataset.vocabulary));
    metrics["checkpoint"] = g.paths.front();
    metrics["model"] = DisplayName(g.kind, g.k);
    metrics["kind"] = ModelKindName(g.kind);
    metrics["d_l"] = g.dim;
    metrics["k"] = g.k;
  } else {
    metrics["configurations"] = json::array();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const Group& g = groups[i];
      json entry = json::parse(RepeatedRunJson(rows[i].runs));
      entry["checkpoints"] = g.paths;
      entry["model"] = DisplayName(g.kind, g.k);
      entry["kind"] = ModelKindName(g.kind);
      entry["d_l"] = g.dim;
      entry["k"] = g.k;
      if (options.include_ranks) {
        entry["ranks"] = json::array();
        for (const MetricsReport& r : g.reports) {
          entry["ranks"].push_back(
              json::parse(MetricsJson(r, true, &dataset.vocabulary))["ranks"]);
        }
      }
      metrics["configurations"].push_back(std::move(entry));
    }
  }
  WriteText(options.out / "metrics.json", metrics.dump(2) + "\n");
  std::ostringstream csv;
  WriteSummaryCsv(rows, csv);
  WriteText(options.out / "summary.csv", csv.str());
  return kExitOk;
}

int RunAnalyze(const AnalyzeOptions& options) {
  if (!(options.sym_threshold > 0.0)) {
    throw ConfigError("sym-threshold must be > 0");
  }
  if (!(options.cat_threshold > 0.0)) {
    throw ConfigError("cat-threshold must be > 0");
  }
  const Dataset dataset = LoadAndReport(options.dataset);
  const auto categories = CategorizeRelations(
      dataset.train, dataset.num_relations(), options.cat_threshold);
  const auto rules =
      MineSymmetric(dataset.train, options.sym_threshold, options.min_support);

  std::ostringstream cats_csv, rules_csv;
  WriteCategoriesCsv(categories, dataset.vocabulary, cats_csv);
  WriteRulesCsv(rules, dataset.vocabulary, rules_csv);
  WriteText(options.out / "categories.csv", cats_csv.str());
  WriteText(options.out / "rules.csv", rules_csv.str());

  std::map<RelationCategoryKind, std::size_t> counts;
  for (const auto& c : categories) ++counts[c.category];
  for (RelationCategoryKind kind : kAllCategories) {
    const double share =
        categories.empty() ? 0.0 : 100.0 * counts[kind] / categories.size();
    std::cout << CategoryName(kind) << ": " << counts[kind] << " relations ("
              << std::fixed << std::setprecision(1) << share << "%)\n"
              << std::defaultfloat;
  }
  std::cout << "symmetric rules: " << rules.size() << '\n';

  if (options.checkpoint) {
    const LoadedCheckpoint loaded = LoadCheckpoint(*options.checkpoint);
    CheckVocabulary(loaded.model, dataset);
    const FilterIndex filter(dataset);
    const MetricsReport report = EvaluateModel(
        MakeScorer(loaded.model), dataset, filter, CapWorkers(options.workers));
    const auto rows = PerCategoryReport(report.ranks, categories, rules);
    std::ostringstream csv;
    WritePerCategoryCsv(rows, csv);
    WriteText(options.out / "patterns.csv", csv.str());
    std::cout << csv.str();
  }
  return kExitOk;
}

int RunSynth(const SynthOptions& options) {
  const Dataset d = GenerateSynthetic(options.spec, options.seed);
  WriteDataset(d, options.out);
  std::cout << options.out.string() << ": " << d.num_entities() << " entities, "
            << d.num_relations() << " relations, " << d.train.size() << "/"
            << d.valid.size() << "/" << d.test.size() << " train/valid/test\n";
  return kExitOk;
}

}  // namespace kge::tools
