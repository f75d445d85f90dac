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

#ifndef KGE_TOOLS_COMMANDS_H_
#define KGE_TOOLS_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kge/dataset.h"
#include "kge/embedding.h"
#include "kge/training.h"

namespace kge::tools {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitRuntime = 3,
};

struct TrainOptions {
  ModelKind kind = ModelKind::kTransE;
  std::size_t dim = 200;
  std::size_t k = 1;
  std::size_t runs = 1;
  std::size_t workers = 1;
  std::filesystem::path dataset;
  std::filesystem::path out = "run";
  TrainConfig config;
};

struct EvalOptions {
  std::vector<std::string> checkpoints;  // paths or glob patterns
  std::filesystem::path dataset;
  std::filesystem::path out = ".";
  std::size_t workers = 1;
  bool include_ranks = false;
};

struct AnalyzeOptions {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> checkpoint;
  std::filesystem::path out = ".";
  double sym_threshold = 0.8;
  std::size_t min_support = 10;
  double cat_threshold = 1.5;
  std::size_t workers = 1;
};

struct SynthOptions {
  SyntheticSpec spec;
  std::uint64_t seed = 1;
  std::filesystem::path out = "synthetic";
};

// Caps `requested` by the KGE_THREADS environment variable when set.
std::size_t CapWorkers(std::size_t requested);

// Expands glob patterns; plain paths pass through unchanged. Sorted, unique.
std::vector<std::filesystem::path> ExpandCheckpoints(
    const std::vector<std::string>& patterns);

int RunTrain(const TrainOptions& options);
int RunEval(const EvalOptions& options);
int RunAnalyze(const AnalyzeOptions& options);
int RunSynth(const SynthOptions& options);

}  // namespace kge::tools

#endif  // KGE_TOOLS_COMMANDS_H_
