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

#include "tgrec/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "tgrec/forward_tape.hpp"

namespace tgrec {

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("model config: " + what); };
  if (dim < 1) fail("dim must be positive");
  if (time_dim < 2 || time_dim % 2 != 0) fail("time_dim must be even and >= 2");
  if (layers < 0) fail("layers must be >= 0");
  if (neighbors < 1) fail("neighbors must be >= 1");
  if (heads < 1) fail("heads must be >= 1");
  if (aggregator != Aggregator::kLstm && dim % heads != 0) fail("heads must divide dim");
  if (ffn_dim < 0) fail("ffn_dim must be >= 0");
  if (time_mode == TimeMode::kPosition && max_positions < 1) fail("max_positions must be >= 1");
  if (!(time_max_frequency > 0.0) || !std::isfinite(time_max_frequency)) {
    fail("time_max_frequency must be positive and finite");
  }
  if (!(time_span_seconds > 0.0) || !std::isfinite(time_span_seconds)) {
    fail("time_span_seconds must be positive and finite");
  }
}

namespace {

void add(std::vector<ParamTensor>& out, std::string name, Eigen::MatrixXd& m, bool trainable = true) {
  if (m.size() > 0) {
    out.push_back({std::move(name), std::span<double>(m.data(), static_cast<size_t>(m.size())), trainable});
  }
}

void add(std::vector<ParamTensor>& out, std::string name, Eigen::VectorXd& v, bool trainable = true) {
  if (v.size() > 0) {
    out.push_back({std::move(name), std::span<double>(v.data(), static_cast<size_t>(v.size())), trainable});
  }
}

void xavier(Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-a, a);
  m.resize(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      m(r, c) = dist(rng);
    }
  }
}

}  // namespace

std::vector<ParamTensor> param_tensors(ModelParams& p) {
  std::vector<ParamTensor> out;
  add(out, "embeddings", p.embeddings);
  add(out, "time.omega", p.time.omega, p.time.omega_trainable());
  add(out, "time.positions", p.time.positions);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& layer = p.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for (size_t h = 0; h < layer.query.size(); ++h) {
      add(out, prefix + "query" + std::to_string(h), layer.query[h]);
    }
    for (size_t h = 0; h < layer.key.size(); ++h) {
      add(out, prefix + "key" + std::to_string(h), layer.key[h]);
    }
    for (size_t h = 0; h < layer.value.size(); ++h) {
      add(out, prefix + "value" + std::to_string(h), layer.value[h]);
    }
    add(out, prefix + "ffn_w1", layer.ffn_w1);
    add(out, prefix + "ffn_b1", layer.ffn_b1);
    add(out, prefix + "ffn_w2", layer.ffn_w2);
    add(out, prefix + "ffn_b2", layer.ffn_b2);
    add(out, prefix + "lstm_input", layer.lstm_input);
    add(out, prefix + "lstm_hidden", layer.lstm_hidden);
    add(out, prefix + "lstm_bias", layer.lstm_bias);
  }
  return out;
}

std::vector<ConstParamTensor> param_tensors(const ModelParams& params) {
  std::vector<ConstParamTensor> out;
  for (auto& t : param_tensors(const_cast<ModelParams&>(params))) {
    out.push_back({std::move(t.name), t.values, t.trainable});
  }
  return out;
}

ModelParams init_params(const ModelConfig& config, int32_t num_users, int32_t num_items,
                        uint64_t seed) {
  config.validate();
  if (num_users <= 0 || num_items <= 0) {
    throw std::invalid_argument("user and item counts must be positive");
  }
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.config = config;
  p.num_users = num_users;
  p.num_items = num_items;

  const Eigen::Index d = config.dim;
  const Eigen::Index info = config.info_dim();
  xavier(p.embeddings, num_users + num_items, d, rng);
  p.time = TimeEncoder::geometric(config.time_dim, config.time_span_seconds, config.time_mode,
                                  config.max_positions, config.time_max_frequency);
  if (config.time_mode == TimeMode::kPosition) {
    xavier(p.time.positions, config.max_positions, config.time_dim, rng);
  }

  p.layers.resize(static_cast<size_t>(config.layers));
  for (auto& layer : p.layers) {
    if (config.aggregator != Aggregator::kLstm) {
      const Eigen::Index head_dim = d / config.heads;
      layer.value.resize(static_cast<size_t>(config.heads));
      if (config.aggregator == Aggregator::kAttention) {
        layer.query.resize(static_cast<size_t>(config.heads));
        layer.key.resize(static_cast<size_t>(config.heads));
      }
      for (size_t h = 0; h < layer.value.size(); ++h) {
        if (config.aggregator == Aggregator::kAttention) {
          xavier(layer.query[h], head_dim, info, rng);
          xavier(layer.key[h], head_dim, info, rng);
        }
        xavier(layer.value[h], head_dim, info, rng);
      }
    } else {
      xavier(layer.lstm_input, 4 * d, info, rng);
      xavier(layer.lstm_hidden, 4 * d, d, rng);
      layer.lstm_bias = Eigen::VectorXd::Zero(4 * d);
      layer.lstm_bias.segment(d, d).setOnes();
    }
    const Eigen::Index hidden = config.hidden_dim();
    xavier(layer.ffn_w1, hidden, d + info, rng);
    layer.ffn_b1 = Eigen::VectorXd::Zero(hidden);
    xavier(layer.ffn_w2, d, hidden, rng);
    layer.ffn_b2 = Eigen::VectorXd::Zero(d);
  }
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams g = params;
  for (auto& t : param_tensors(g)) {
    std::fill(t.values.begin(), t.values.end(), 0.0);
  }
  return g;
}

Eigen::VectorXd layer_forward(const ModelParams& params, const Ctbg& graph, NodeRef node, double t,
                              int depth) {
  ForwardTape tape(params, graph, params.config.sampler_seed);
  return tape.value(tape.embed(node, t, depth));
}

Eigen::VectorXd temporal_embedding(const ModelParams& params, const Ctbg& graph, NodeRef node,
                                   double t) {
  return layer_forward(params, graph, node, t, params.config.layers);
}

double score(const ModelParams& params, const Ctbg& graph, int32_t u, int32_t i, double t) {
  ForwardTape tape(params, graph, params.config.sampler_seed);
  const auto hu = tape.embed(NodeRef::user(u), t);
  const auto hi = tape.embed(NodeRef::item(i), t);
  return tape.value(hu).dot(tape.value(hi));
}

void sort_ranked(std::vector<ScoredItem>& items) {
  std::sort(items.begin(), items.end(), [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  });
}

std::vector<ScoredItem> rank(const ModelParams& params, const Ctbg& graph, int32_t u, double t,
                             std::span<const int32_t> candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("rank needs at least one candidate");
  }
  ForwardTape tape(params, graph, params.config.sampler_seed);
  const Eigen::VectorXd user = tape.value(tape.embed(NodeRef::user(u), t));
  std::vector<ScoredItem> out;
  out.reserve(candidates.size());
  for (int32_t item : candidates) {
    out.push_back({item, user.dot(tape.value(tape.embed(NodeRef::item(item), t)))});
  }
  sort_ranked(out);
  return out;
}

AttentionRecord attention_at(const ModelParams& params, const Ctbg& graph, NodeRef node, double t) {
  ForwardTape tape(params, graph, params.config.sampler_seed);
  return tape.attention(tape.embed(node, t));
}

}  // namespace tgrec
