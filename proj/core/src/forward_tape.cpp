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

#include "tgrec/forward_tape.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "tgrec/random.hpp"

namespace tgrec {

size_t ForwardTape::KeyHash::operator()(const Key& k) const {
  return static_cast<size_t>(derive_seed(
      k.time, {static_cast<uint64_t>(k.id), k.kind, static_cast<uint64_t>(k.depth)}));
}

ForwardTape::ForwardTape(const ModelParams& params, const Ctbg& graph, uint64_t sampler_seed)
    : params_(params), graph_(graph), seed_(sampler_seed) {
  if (graph.num_users() > params.num_users || graph.num_items() > params.num_items) {
    throw std::invalid_argument("graph has more nodes than the model has embeddings");
  }
}

const std::vector<SampledNeighbor>& ForwardTape::sample_for(NodeRef node, double t) {
  const Key key{node.id, static_cast<uint8_t>(node.kind), -1, time_key(t)};
  auto it = samples_.find(key);
  if (it != samples_.end()) {
    return it->second;
  }
  auto drawn = sample_neighbors(graph_, node, t, params_.config.neighbors, seed_);
  const NodeRef other{node.kind == NodeKind::kUser ? NodeKind::kItem : NodeKind::kUser, 0};
  for (const auto& n : drawn) {
    neighbor_pairs_.insert(Key{n.id, static_cast<uint8_t>(other.kind), 0, time_key(n.timestamp)});
    if (observer_) {
      observer_(node, t, n);
    }
  }
  return samples_.emplace(key, std::move(drawn)).first->second;
}

Eigen::VectorXd ForwardTape::time_vector(double t, int position, bool enabled) const {
  if (!enabled) {
    return Eigen::VectorXd::Zero(params_.config.time_dim);
  }
  return params_.time.features(t, position);
}

ForwardTape::Handle ForwardTape::embed(NodeRef node, double t, int depth) {
  if (depth < 0 || depth > params_.config.layers) {
    throw std::invalid_argument("depth " + std::to_string(depth) + " outside [0, " +
                                std::to_string(params_.config.layers) + "]");
  }
  if (!graph_.contains(node)) {
    throw std::out_of_range(std::string("unknown ") +
                            (node.kind == NodeKind::kUser ? "user " : "item ") +
                            std::to_string(node.id));
  }
  const Key key{node.id, static_cast<uint8_t>(node.kind), depth, time_key(t)};
  if (auto it = memo_.find(key); it != memo_.end()) {
    return it->second;
  }

  Eval eval;
  eval.node = node;
  eval.t = t;
  eval.depth = depth;
  if (depth == 0) {
    eval.leaf = params_.embeddings.row(params_.row_of(node)).transpose();
  } else {
    const auto& cfg = params_.config;
    eval.query_child = embed(node, t, depth - 1);
    eval.position = static_cast<int>(graph_.neighbors_before(node, t).size());
    eval.sample = &sample_for(node, t);
    const NodeKind other = node.kind == NodeKind::kUser ? NodeKind::kItem : NodeKind::kUser;
    for (const auto& n : *eval.sample) {
      eval.neighbor_children.push_back(embed(NodeRef{other, n.id}, n.timestamp, depth - 1));
    }

    const auto rows = static_cast<Eigen::Index>(eval.sample->size());
    Eigen::MatrixXd neighbor_info(rows, cfg.info_dim());
    for (Eigen::Index s = 0; s < rows; ++s) {
      const auto& n = (*eval.sample)[static_cast<size_t>(s)];
      neighbor_info.row(s).head(cfg.dim) = value(eval.neighbor_children[static_cast<size_t>(s)]).transpose();
      neighbor_info.row(s).tail(cfg.time_dim) =
          time_vector(n.timestamp, n.position, cfg.neighbor_time).transpose();
    }
    Eigen::VectorXd query_info =
        construct_query_info(value(eval.query_child), time_vector(t, eval.position, cfg.query_time));
    layer_apply(params_.layers[static_cast<size_t>(depth - 1)], cfg.aggregator,
                std::move(query_info), std::move(neighbor_info), eval.cache);
  }
  evals_.push_back(std::move(eval));
  const Handle h = evals_.size() - 1;
  memo_.emplace(key, h);
  return h;
}

const Eigen::VectorXd& ForwardTape::value(Handle h) const {
  const Eval& e = evals_.at(h);
  return e.depth == 0 ? e.leaf : e.cache.output;
}

void ForwardTape::add_gradient(Handle h, const Eigen::VectorXd& grad) {
  Eval& e = evals_.at(h);
  if (e.grad.size() == 0) {
    e.grad = grad;
  } else {
    e.grad += grad;
  }
}

void ForwardTape::backward(ModelParams& grad) {
  const auto& cfg = params_.config;
  Eigen::VectorXd grad_query;
  Eigen::MatrixXd grad_neighbors;
  for (size_t idx = evals_.size(); idx-- > 0;) {
    Eval& e = evals_[idx];
    if (e.grad.size() == 0) {
      continue;
    }
    if (e.depth == 0) {
      grad.embeddings.row(params_.row_of(e.node)) += e.grad.transpose();
      continue;
    }
    const auto layer = static_cast<size_t>(e.depth - 1);
    layer_backward(params_.layers[layer], cfg.aggregator, e.cache, e.grad, grad.layers[layer],
                   grad_query, grad_neighbors);

    add_gradient(e.query_child, grad_query.head(cfg.dim));
    if (cfg.query_time) {
      params_.time.accumulate_gradient(e.t, e.position, grad_query.tail(cfg.time_dim), grad.time);
    }
    for (size_t s = 0; s < e.neighbor_children.size(); ++s) {
      const auto row = static_cast<Eigen::Index>(s);
      add_gradient(e.neighbor_children[s], grad_neighbors.row(row).head(cfg.dim).transpose());
      if (cfg.neighbor_time) {
        const auto& n = (*e.sample)[s];
        params_.time.accumulate_gradient(n.timestamp, n.position,
                                         grad_neighbors.row(row).tail(cfg.time_dim).transpose(),
                                         grad.time);
      }
    }
    e.grad.resize(0);
  }
  for (auto& e : evals_) {
    e.grad.resize(0);
  }
}

std::vector<Eigen::Index> ForwardTape::touched_rows() const {
  std::vector<Eigen::Index> rows;
  for (const auto& e : evals_) {
    if (e.depth == 0) {
      rows.push_back(params_.row_of(e.node));
    }
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

AttentionRecord ForwardTape::attention(Handle h) const {
  const Eval& e = evals_.at(h);
  AttentionRecord rec;
  rec.query = e.node;
  rec.t = e.t;
  if (e.depth == 0) {
    return rec;
  }
  rec.neighbors = *e.sample;
  rec.weights = e.cache.head_weights;
  return rec;
}

}  // namespace tgrec
