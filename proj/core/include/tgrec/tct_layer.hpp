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
#include <span>
#include <string_view>
#include <vector>

#include "tgrec/time_encoding.hpp"

namespace tgrec {

/// Neighbor summarizer used inside a layer. kAttention is the temporal
/// collaborative attention; kMean and kLstm are ablation substitutes.
enum class Aggregator { kAttention, kMean, kLstm };

std::string_view to_string(Aggregator aggregator);
Aggregator parse_aggregator(std::string_view text);

/// Parameters of one temporal collaborative transformer layer.
///
/// With d the embedding size, d_time the time size and D = d + d_time:
/// per head, query/key/value are (d / H) x D; the feed-forward network maps
/// [summary (d) | query info (D)] -> d_ffn -> d. The LSTM block is sized only
/// when the layer runs with Aggregator::kLstm (gates stacked i, f, g, o).
struct LayerParams {
  std::vector<Eigen::MatrixXd> query;
  std::vector<Eigen::MatrixXd> key;
  std::vector<Eigen::MatrixXd> value;
  Eigen::MatrixXd ffn_w1;
  Eigen::VectorXd ffn_b1;
  Eigen::MatrixXd ffn_w2;
  Eigen::VectorXd ffn_b2;
  Eigen::MatrixXd lstm_input;   // 4d x D
  Eigen::MatrixXd lstm_hidden;  // 4d x d
  Eigen::VectorXd lstm_bias;    // 4d

  int heads() const { return static_cast<int>(value.size()); }
  void set_zero();
};

/// Query information [embedding | time vector].
Eigen::VectorXd construct_query_info(const Eigen::VectorXd& embedding,
                                     const Eigen::VectorXd& time_vector);
Eigen::VectorXd construct_query_info(const Eigen::VectorXd& embedding, double t,
                                     const TimeEncoder& encoder);

/// Row s is [embedding_s | time_vector_s].
Eigen::MatrixXd construct_neighbor_info(const Eigen::MatrixXd& embeddings,
                                        const Eigen::MatrixXd& time_vectors);
Eigen::MatrixXd construct_neighbor_info(const Eigen::MatrixXd& embeddings,
                                        std::span<const double> times, const TimeEncoder& encoder);

/// Unnormalized logits scale * (key_w k_s) . (query_w q) for each row k_s of `keys`.
Eigen::VectorXd attention_logits(const Eigen::VectorXd& query_info, const Eigen::MatrixXd& keys,
                                 const Eigen::MatrixXd& query_w, const Eigen::MatrixXd& key_w,
                                 double scale);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Softmax-normalized attention of one head, scale 1/sqrt(D).
/// Throws std::invalid_argument when `keys` has no rows.
Eigen::VectorXd attention_weights(const Eigen::VectorXd& query_info, const Eigen::MatrixXd& keys,
                                  const LayerParams& params, int head);

/// sum_s weights_s * value_w v_s for one head.
Eigen::VectorXd propagate(const Eigen::VectorXd& weights, const Eigen::MatrixXd& values,
                          const LayerParams& params, int head);

/// FFN([neighbor_summary | query_info]) with a ReLU between two affine maps.
Eigen::VectorXd aggregate(const Eigen::VectorXd& neighbor_summary,
                          const Eigen::VectorXd& query_info, const LayerParams& params);

/// Final hidden state of an LSTM run over the rows of `neighbor_info` in order.
Eigen::VectorXd lstm_summarize(const Eigen::MatrixXd& neighbor_info, const LayerParams& params);

/// Intermediates of one layer evaluation kept for the backward pass.
struct LayerCache {
  Eigen::VectorXd query_info;
  Eigen::MatrixXd neighbor_info;  // S x D, S may be 0
  std::vector<Eigen::VectorXd> head_query;
  std::vector<Eigen::MatrixXd> head_keys;    // S x d/H
  std::vector<Eigen::MatrixXd> head_values;  // S x d/H
  std::vector<Eigen::VectorXd> head_weights;
  // LSTM per step (columns), index 0 is the initial zero state for h and c.
  Eigen::MatrixXd lstm_gates;  // 4d x S (activated)
  Eigen::MatrixXd lstm_cells;  // d x (S + 1)
  Eigen::MatrixXd lstm_states; // d x (S + 1)
  Eigen::VectorXd summary;
  Eigen::VectorXd ffn_input;
  Eigen::VectorXd ffn_pre;
  Eigen::VectorXd output;
};

/// Runs one layer: summarize neighbors (zero summary when there are none),
/// then aggregate with the query information. Fills `cache.output`.
void layer_apply(const LayerParams& params, Aggregator aggregator, Eigen::VectorXd query_info,
                 Eigen::MatrixXd neighbor_info, LayerCache& cache);

/// Reverse-mode pass through `layer_apply`. Parameter gradients are added to
/// `grad`; input gradients are written to `grad_query_info` and
/// `grad_neighbor_info`.
void layer_backward(const LayerParams& params, Aggregator aggregator, const LayerCache& cache,
                    const Eigen::VectorXd& grad_output, LayerParams& grad,
                    Eigen::VectorXd& grad_query_info, Eigen::MatrixXd& grad_neighbor_info);

}  // namespace tgrec
