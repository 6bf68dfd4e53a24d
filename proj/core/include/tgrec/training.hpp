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
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tgrec/ctbg.hpp"
#include "tgrec/evaluation.hpp"
#include "tgrec/model.hpp"

namespace tgrec {

enum class LossKind { kBpr, kBce };

std::string_view to_string(LossKind loss);
LossKind parse_loss(std::string_view text);

struct TrainConfig {
  LossKind loss = LossKind::kBpr;
  double learning_rate = 1e-3;
  double l2 = 1e-4;  // lambda
  int batch_size = 128;
  int epochs = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  uint64_t negative_seed = 3;
  int workers = 1;
  // Training draws neighbor samples from a per-epoch stream derived from the
  // model's sampler seed; evaluation always uses the base stream.
  bool resample_per_epoch = true;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// (user, positive item, negative item, time); the negative has no edge with
/// the user strictly before `t` and differs from the positive.
struct TrainSample {
  int32_t user = 0;
  int32_t pos = 0;
  int32_t neg = 0;
  double t = 0.0;
  bool operator==(const TrainSample&) const = default;
};

struct SampledBatch {
  std::vector<TrainSample> samples;
  size_t skipped = 0;  // positives whose user had no eligible negative
};

/// Draws one uniform negative for each positive. Deterministic in `seed`
/// and in the position of each positive within `positives`.
SampledBatch attach_negatives(std::span<const Interaction> positives, const Ctbg& graph,
                              uint64_t seed);

/// `batch_size` positives drawn uniformly (with replacement) from
/// `train_edges`, each paired with a negative.
SampledBatch sample_batch(std::span<const Interaction> train_edges, const Ctbg& graph,
                          int batch_size, uint64_t seed);

/// -log sigmoid(r_pos - r_neg) + l2_term, evaluated stably.
double bpr_loss(double r_pos, double r_neg, double l2_term);
/// -[log sigmoid(r_pos) + log(1 - sigmoid(r_neg))] + l2_term.
double bce_loss(double r_pos, double r_neg, double l2_term);

struct PairLoss {
  double value = 0.0;
  double d_pos = 0.0;
  double d_neg = 0.0;
};
PairLoss pair_loss(LossKind kind, double r_pos, double r_neg);

struct GradientResult {
  double loss = 0.0;         // mean pair loss + lambda * ||touched params||^2
  double data_loss = 0.0;    // mean pair loss
  double reg_loss = 0.0;     // lambda * ||touched params||^2
  ModelParams grad;
  std::vector<Eigen::Index> touched_rows;
};

/// Loss and gradient of a batch. The L2 term covers the embedding rows read
/// by the batch plus every dense parameter. Throws std::runtime_error naming
/// the parameter group when a gradient is not finite.
GradientResult backward(const ModelParams& params, const Ctbg& graph,
                        std::span<const TrainSample> batch, const TrainConfig& config,
                        uint64_t sampler_seed);

/// Mean pair loss of a batch without gradients.
double batch_loss(const ModelParams& params, const Ctbg& graph, std::span<const TrainSample> batch,
                  LossKind kind, uint64_t sampler_seed);

/// Per-parameter first/second moment optimizer with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams& params, const TrainConfig& config);
  void step(ModelParams& params, ModelParams& grad);
  long steps() const { return steps_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long steps_ = 0;
  ModelParams first_;
  ModelParams second_;
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  size_t skipped = 0;
  std::optional<MetricsReport> valid;
  double wall_seconds = 0.0;
};

struct FitCallbacks {
  /// Validation hook run after each epoch; return nullopt to skip.
  std::function<std::optional<MetricsReport>(int epoch, const ModelParams&)> validate;
  std::function<void(const EpochLog&)> on_epoch;
};

struct FitResult {
  std::vector<EpochLog> log;
};

/// Mini-batch training over shuffled train edges. Deterministic given
/// seeds; worker count does not change results. Throws std::runtime_error
/// on a non-finite loss.
FitResult fit(ModelParams& params, const Ctbg& train_graph, std::span<const Interaction> train,
              const TrainConfig& config, const FitCallbacks& callbacks = {});

}  // namespace tgrec
