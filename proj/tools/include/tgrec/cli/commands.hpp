/*
 * Copyright 2026 The tgrec Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tgrec/checkpoint.hpp"
#include "tgrec/ctbg.hpp"
#include "tgrec/dataset_io.hpp"
#include "tgrec/evaluation.hpp"
#include "tgrec/run_config.hpp"
#include "tgrec/synthetic.hpp"
#include "tgrec/training.hpp"

namespace tgrec::cli {

/// Interactions with ids and time normalization taken from a checkpoint, so
/// they line up with a trained model.
Dataset load_for_checkpoint(const RunConfig& config, const Checkpoint& checkpoint);

/// Ingests the data file and records the id map and time normalization.
Dataset cmd_ingest(const RunConfig& config, std::ostream& out);

struct TrainOutcome {
  std::filesystem::path run_dir;
  std::filesystem::path checkpoint;
  std::vector<EpochLog> log;
};

/// Trains on the train split and writes the checkpoint, id map, config and
/// per-epoch log.
TrainOutcome cmd_train(const RunConfig& config, std::ostream& out);

enum class EvalSplit { kValid, kTest };

struct EvalOptions {
  EvalSplit split = EvalSplit::kTest;
  bool with_popularity = false;
  int top = 0;  // > 0: write the top-k ranked items of every interaction to ranks.tsv
};

struct EvalOutcome {
  MetricsReport model;
  std::optional<MetricsReport> popularity;
};

/// Scores the chosen split with the checkpoint and writes metrics.tsv.
EvalOutcome cmd_eval(const RunConfig& config, const EvalOptions& options, std::ostream& out);

struct KernelProbe {
  double t1 = 0.0;
  double t2 = 0.0;
  double value = 0.0;
};

/// Evaluates the time kernel on (t1, t2) pairs given in raw seconds. With
/// `omega` set, those frequencies are used on the raw values directly;
/// otherwise the checkpoint's encoder is applied to normalized times.
std::vector<KernelProbe> cmd_probe_time(const RunConfig& config,
                                        const std::vector<std::pair<double, double>>& pairs,
                                        const std::optional<std::vector<double>>& omega,
                                        std::ostream& out);

struct AttentionRow {
  std::string offset;  // as given, e.g. "+5d"
  double offset_seconds = 0.0;
  double query_seconds = 0.0;
  int head = 0;
  std::string item;
  double neighbor_seconds = 0.0;
  double weight = 0.0;
};

/// Top-layer attention of `user` at base + offset for each offset (see
/// parse_duration). The base defaults to the user's last interaction.
std::vector<AttentionRow> cmd_export_attention(const RunConfig& config, const std::string& user,
                                               const std::vector<std::string>& offsets,
                                               std::optional<double> base_seconds,
                                               std::ostream& out);

struct SweepRow {
  std::string run_id;
  std::vector<std::string> values;  // aligned with the sweep axes
  MetricsReport metrics;
};

/// Trains and evaluates every point of the config's sweep grid and writes
/// sweep.tsv under <output>/<run_id>/.
std::vector<SweepRow> cmd_sweep(const RunConfig& config, std::ostream& out);

/// Writes planted synthetic interactions as user, item, seconds lines.
size_t cmd_generate_synthetic(const SyntheticConfig& config, const std::filesystem::path& path,
                              std::ostream& out);

/// "90", "90s", "15m", "12h", "5d" or "-5d" in seconds.
double parse_duration(std::string_view text);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tgrec::cli
