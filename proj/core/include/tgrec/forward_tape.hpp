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
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tgrec/ctbg.hpp"
#include "tgrec/model.hpp"
#include "tgrec/tct_layer.hpp"

namespace tgrec {

/// Records the recursive neighbor expansion of a set of temporal embedding
/// queries and replays it in reverse for gradients.
///
/// A depth-l embedding of node v at time t reads the depth-(l-1) embedding of
/// v at t and of each sampled neighbor (w, t_s) at t_s. Evaluations are
/// memoized on (node, t, depth) and neighbor samples on (node, t), so all
/// depths and heads of one query share the same draw. Every child lies at a
/// lower depth and is recorded before its parent, so reverse recording order
/// is a valid backward order.
class ForwardTape {
 public:
  using Handle = size_t;
  using SampleObserver = std::function<void(NodeRef, double, const SampledNeighbor&)>;

  ForwardTape(const ModelParams& params, const Ctbg& graph, uint64_t sampler_seed);

  Handle embed(NodeRef node, double t, int depth);
  Handle embed(NodeRef node, double t) { return embed(node, t, params_.config.layers); }

  const Eigen::VectorXd& value(Handle h) const;

  /// Adds `grad` to the upstream gradient of an embedding.
  void add_gradient(Handle h, const Eigen::VectorXd& grad);

  /// Pushes the accumulated upstream gradients through the recorded
  /// evaluations into `grad` (shape of zeros_like(params)).
  void backward(ModelParams& grad);

  /// Embedding-table rows read by any recorded evaluation, ascending.
  std::vector<Eigen::Index> touched_rows() const;

  /// Number of distinct (neighbor, timestamp) pairs sampled so far.
  size_t sampled_pairs() const { return neighbor_pairs_.size(); }
  size_t evaluations() const { return evals_.size(); }

  AttentionRecord attention(Handle h) const;

  /// Called once per sampled neighbor of every expanded node.
  void set_observer(SampleObserver observer) { observer_ = std::move(observer); }

 private:
  struct Key {
    int32_t id;
    uint8_t kind;
    int32_t depth;
    uint64_t time;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const;
  };
  struct Eval {
    NodeRef node;
    double t = 0.0;
    int depth = 0;
    int position = 0;  // history length before t, the query's own index
    Handle query_child = 0;
    std::vector<Handle> neighbor_children;
    const std::vector<SampledNeighbor>* sample = nullptr;
    LayerCache cache;
    Eigen::VectorXd leaf;  // depth 0 only
    Eigen::VectorXd grad;
  };

  const std::vector<SampledNeighbor>& sample_for(NodeRef node, double t);
  Eigen::VectorXd time_vector(double t, int position, bool enabled) const;

  const ModelParams& params_;
  const Ctbg& graph_;
  uint64_t seed_;
  std::vector<Eval> evals_;
  std::unordered_map<Key, Handle, KeyHash> memo_;
  std::unordered_map<Key, std::vector<SampledNeighbor>, KeyHash> samples_;
  std::unordered_set<Key, KeyHash> neighbor_pairs_;
  SampleObserver observer_;
};

}  // namespace tgrec
