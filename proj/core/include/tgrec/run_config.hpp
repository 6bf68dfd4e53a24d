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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tgrec/ctbg.hpp"
#include "tgrec/dataset_io.hpp"
#include "tgrec/evaluation.hpp"
#include "tgrec/model.hpp"
#include "tgrec/training.hpp"

namespace tgrec {

/// The only sources of randomness in a run.
struct Seeds {
  uint64_t init = 1;       // parameter initialization
  uint64_t sampler = 2;    // neighbor sampling
  uint64_t negatives = 3;  // training negatives and sampled evaluation candidates
  bool operator==(const Seeds&) const = default;
};

/// One swept key with its candidate values, e.g. model.dim = 8,16,32.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
  bool operator==(const SweepAxis&) const = default;
};

struct RunConfig {
  std::filesystem::path data_path;
  std::filesystem::path checkpoint_path;  // empty: <output>/<run_id>/model.ckpt
  std::filesystem::path output_dir = "runs";
  std::string run_id;  // empty: derived from the config contents
  IngestOptions ingest;
  SplitRatios split;
  ModelConfig model;
  TrainConfig train;
  EvalConfig eval;
  Seeds seeds;
  int workers = 0;         // 0: hardware concurrency
  int validate_every = 1;  // epochs between validation passes; 0 disables
  std::vector<SweepAxis> sweep;

  /// Copies seeds and worker count into the nested configs.
  void sync();
  /// Throws std::invalid_argument on the first invalid field.
  void validate() const;
  /// run_id if set, otherwise a 12-hex-digit digest of serialize().
  std::string resolved_run_id() const;
  std::filesystem::path run_dir() const { return output_dir / resolved_run_id(); }
  std::filesystem::path resolved_checkpoint() const;

  bool operator==(const RunConfig&) const = default;
};

/// Sets "section.key" from its textual value. Throws std::invalid_argument on
/// unknown keys or unparsable values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// INI text: [section] headers, key = value lines, ';' or '#' comments.
RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical text form; parse(serialize(c)) == c.
std::string serialize(const RunConfig& config);

/// One config per point of the sweep grid, varying the last axis fastest.
/// Each point gets run_id "<base>-<index>" and an empty sweep.
std::vector<RunConfig> expand_sweep(const RunConfig& base);

/// key=value lines for a model config, including fields derived from data.
std::string model_config_text(const ModelConfig& config);
ModelConfig parse_model_config_text(const std::string& text);

/// "full" or "sampled:K".
void parse_eval_mode(std::string_view text, EvalConfig& eval);
std::string eval_mode_text(const EvalConfig& eval);

/// Stable 64-bit FNV-1a digest.
uint64_t fnv1a(std::string_view text);

}  // namespace tgrec
