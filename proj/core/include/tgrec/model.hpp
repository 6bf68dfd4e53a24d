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

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tgrec/ctbg.hpp"
#include "tgrec/tct_layer.hpp"
#include "tgrec/time_encoding.hpp"

namespace tgrec {

struct ModelConfig {
  int dim = 32;         // d
  int time_dim = 32;    // d_time, even
  int layers = 1;       // L; 0 scores with long-term embeddings only
  int neighbors = 20;   // S
  int heads = 2;        // H, divides d
  int ffn_dim = 0;      // 0 selects 2 * d
  int max_positions = 64;
  Aggregator aggregator = Aggregator::kAttention;
  TimeMode time_mode = TimeMode::kLearned;
  bool query_time = true;     // time vector in query information
  bool neighbor_time = true;  // time vector in neighbor information
  double time_max_frequency = 1.0;  // fastest initial frequency, rad/s
  double time_span_seconds = 1.0;   // raw span the frequencies are initialized against
  uint64_t sampler_seed = 2;

  int info_dim() const { return dim + time_dim; }
  int hidden_dim() const { return ffn_dim > 0 ? ffn_dim : 2 * dim; }
  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// All trainable state. Rows [0, num_users) of `embeddings` are users, the
/// remaining rows are items.
struct ModelParams {
  ModelConfig config;
  int32_t num_users = 0;
  int32_t num_items = 0;
  Eigen::MatrixXd embeddings;
  TimeEncoder time;
  std::vector<LayerParams> layers;

  Eigen::Index row_of(NodeRef node) const {
    return node.kind == NodeKind::kUser ? node.id : num_users + node.id;
  }
};

/// Named flat view of one parameter array.
struct ParamTensor {
  std::string name;
  std::span<double> values;
  bool trainable = true;
};

/// Every sized parameter array in a fixed declared order (the checkpoint and
/// optimizer both rely on it).
std::vector<ParamTensor> param_tensors(ModelParams& params);

struct ConstParamTensor {
  std::string name;
  std::span<const double> values;
  bool trainable = true;
};
std::vector<ConstParamTensor> param_tensors(const ModelParams& params);

/// Xavier-uniform weights, zero FFN biases, forget-gate bias 1, geometric
/// time frequencies. Deterministic in `seed`.
ModelParams init_params(const ModelConfig& config, int32_t num_users, int32_t num_items,
                        uint64_t seed);

/// Same shapes as `params`, all zeros. Used as a gradient accumulator.
ModelParams zeros_like(const ModelParams& params);

/// Temporal embedding of `node` at time `t` after `depth` layers
/// (depth 0 returns the long-term embedding).
Eigen::VectorXd layer_forward(const ModelParams& params, const Ctbg& graph, NodeRef node, double t,
                              int depth);

/// layer_forward at depth L.
Eigen::VectorXd temporal_embedding(const ModelParams& params, const Ctbg& graph, NodeRef node,
                                   double t);

/// Dot product of the depth-L temporal embeddings of user `u` and item `i` at `t`.
double score(const ModelParams& params, const Ctbg& graph, int32_t u, int32_t i, double t);

struct ScoredItem {
  int32_t item = 0;
  double score = 0.0;
  bool operator==(const ScoredItem&) const = default;
};

/// Descending score, ties broken by ascending item id.
void sort_ranked(std::vector<ScoredItem>& items);

/// Scores every candidate for `u` at `t` and sorts. Throws on an empty list.
std::vector<ScoredItem> rank(const ModelParams& params, const Ctbg& graph, int32_t u, double t,
                             std::span<const int32_t> candidates);

/// Attention of the top layer for one query.
struct AttentionRecord {
  NodeRef query;
  double t = 0.0;
  std::vector<SampledNeighbor> neighbors;
  std::vector<Eigen::VectorXd> weights;  // one per head; empty for the LSTM summarizer
};

AttentionRecord attention_at(const ModelParams& params, const Ctbg& graph, NodeRef node, double t);

}  // namespace tgrec
