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

#include "tgrec/tct_layer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tgrec {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require(bool ok, const char* what) {
  if (!ok) {
    throw std::invalid_argument(what);
  }
}

void check_head(const LayerParams& params, int head) {
  if (head < 0 || head >= params.heads()) {
    throw std::out_of_range("attention head " + std::to_string(head) + " out of range");
  }
}

}  // namespace

std::string_view to_string(Aggregator aggregator) {
  switch (aggregator) {
    case Aggregator::kAttention:
      return "attention";
    case Aggregator::kMean:
      return "mean";
    case Aggregator::kLstm:
      return "lstm";
  }
  return "attention";
}

Aggregator parse_aggregator(std::string_view text) {
  if (text == "attention") return Aggregator::kAttention;
  if (text == "mean") return Aggregator::kMean;
  if (text == "lstm") return Aggregator::kLstm;
  throw std::invalid_argument("unknown aggregator '" + std::string(text) + "'");
}

void LayerParams::set_zero() {
  for (auto* group : {&query, &key, &value}) {
    for (auto& m : *group) m.setZero();
  }
  ffn_w1.setZero();
  ffn_b1.setZero();
  ffn_w2.setZero();
  ffn_b2.setZero();
  lstm_input.setZero();
  lstm_hidden.setZero();
  lstm_bias.setZero();
}

Eigen::VectorXd construct_query_info(const Eigen::VectorXd& embedding,
                                     const Eigen::VectorXd& time_vector) {
  Eigen::VectorXd out(embedding.size() + time_vector.size());
  out << embedding, time_vector;
  return out;
}

Eigen::VectorXd construct_query_info(const Eigen::VectorXd& embedding, double t,
                                     const TimeEncoder& encoder) {
  return construct_query_info(embedding, encoder.encode(t));
}

Eigen::MatrixXd construct_neighbor_info(const Eigen::MatrixXd& embeddings,
                                        const Eigen::MatrixXd& time_vectors) {
  require(embeddings.rows() == time_vectors.rows(),
          "neighbor embeddings and time vectors must have equal row counts");
  Eigen::MatrixXd out(embeddings.rows(), embeddings.cols() + time_vectors.cols());
  out << embeddings, time_vectors;
  return out;
}

Eigen::MatrixXd construct_neighbor_info(const Eigen::MatrixXd& embeddings,
                                        std::span<const double> times,
                                        const TimeEncoder& encoder) {
  require(static_cast<size_t>(embeddings.rows()) == times.size(),
          "neighbor embeddings and timestamps must have equal counts");
  Eigen::MatrixXd time_vectors(embeddings.rows(), encoder.dim());
  for (Eigen::Index s = 0; s < embeddings.rows(); ++s) {
    time_vectors.row(s) = encoder.encode(times[static_cast<size_t>(s)]).transpose();
  }
  return construct_neighbor_info(embeddings, time_vectors);
}

Eigen::VectorXd attention_logits(const Eigen::VectorXd& query_info, const Eigen::MatrixXd& keys,
                                 const Eigen::MatrixXd& query_w, const Eigen::MatrixXd& key_w,
                                 double scale) {
  require(query_w.cols() == query_info.size() && key_w.cols() == keys.cols(),
          "projection width does not match information vector size");
  require(query_w.rows() == key_w.rows(), "query and key projections differ in output size");
  const Eigen::VectorXd q = query_w * query_info;
  return scale * ((keys * key_w.transpose()) * q);
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) {
    return logits;
  }
  const Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

Eigen::VectorXd attention_weights(const Eigen::VectorXd& query_info, const Eigen::MatrixXd& keys,
                                  const LayerParams& params, int head) {
  check_head(params, head);
  require(keys.rows() > 0, "attention needs at least one neighbor");
  const double scale = 1.0 / std::sqrt(static_cast<double>(query_info.size()));
  const auto h = static_cast<size_t>(head);
  return softmax(attention_logits(query_info, keys, params.query[h], params.key[h], scale));
}

Eigen::VectorXd propagate(const Eigen::VectorXd& weights, const Eigen::MatrixXd& values,
                          const LayerParams& params, int head) {
  check_head(params, head);
  require(weights.size() == values.rows(), "weight count must match value rows");
  const auto& w = params.value[static_cast<size_t>(head)];
  require(w.cols() == values.cols(), "value projection width mismatch");
  return w * (values.transpose() * weights);
}

Eigen::VectorXd aggregate(const Eigen::VectorXd& neighbor_summary,
                          const Eigen::VectorXd& query_info, const LayerParams& params) {
  require(params.ffn_w1.cols() == neighbor_summary.size() + query_info.size(),
          "aggregation input size mismatch");
  Eigen::VectorXd input(params.ffn_w1.cols());
  input << neighbor_summary, query_info;
  const Eigen::VectorXd hidden = (params.ffn_w1 * input + params.ffn_b1).cwiseMax(0.0);
  return params.ffn_w2 * hidden + params.ffn_b2;
}

namespace {

void lstm_forward(const LayerParams& p, LayerCache& c) {
  const Eigen::Index d = p.lstm_hidden.cols();
  const Eigen::Index steps = c.neighbor_info.rows();
  require(p.lstm_input.rows() == 4 * d && p.lstm_input.cols() == c.neighbor_info.cols(),
          "LSTM parameters are not sized for this layer");
  c.lstm_gates.resize(4 * d, steps);
  c.lstm_cells = Eigen::MatrixXd::Zero(d, steps + 1);
  c.lstm_states = Eigen::MatrixXd::Zero(d, steps + 1);
  for (Eigen::Index s = 0; s < steps; ++s) {
    Eigen::VectorXd z = p.lstm_input * c.neighbor_info.row(s).transpose() +
                        p.lstm_hidden * c.lstm_states.col(s) + p.lstm_bias;
    for (Eigen::Index k = 0; k < d; ++k) {
      z[k] = sigmoid(z[k]);
      z[d + k] = sigmoid(z[d + k]);
      z[2 * d + k] = std::tanh(z[2 * d + k]);
      z[3 * d + k] = sigmoid(z[3 * d + k]);
    }
    c.lstm_gates.col(s) = z;
    c.lstm_cells.col(s + 1) = z.segment(d, d).cwiseProduct(c.lstm_cells.col(s)) +
                              z.head(d).cwiseProduct(z.segment(2 * d, d));
    c.lstm_states.col(s + 1) =
        z.tail(d).cwiseProduct(c.lstm_cells.col(s + 1).array().tanh().matrix());
  }
  c.summary = c.lstm_states.col(steps);
}

void lstm_backward(const LayerParams& p, const LayerCache& c, const Eigen::VectorXd& grad_summary,
                   LayerParams& g, Eigen::MatrixXd& grad_neighbor_info) {
  const Eigen::Index d = p.lstm_hidden.cols();
  Eigen::VectorXd dh = grad_summary;
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd dz(4 * d);
  for (Eigen::Index s = c.neighbor_info.rows() - 1; s >= 0; --s) {
    const auto gates = c.lstm_gates.col(s);
    const auto in = gates.head(d).array();
    const auto forget = gates.segment(d, d).array();
    const auto cand = gates.segment(2 * d, d).array();
    const auto out = gates.tail(d).array();
    const Eigen::ArrayXd tanh_c = c.lstm_cells.col(s + 1).array().tanh();

    const Eigen::ArrayXd d_out = dh.array() * tanh_c;
    dc.array() += dh.array() * out * (1.0 - tanh_c.square());
    dz.head(d) = (dc.array() * cand * in * (1.0 - in)).matrix();
    dz.segment(d, d) = (dc.array() * c.lstm_cells.col(s).array() * forget * (1.0 - forget)).matrix();
    dz.segment(2 * d, d) = (dc.array() * in * (1.0 - cand.square())).matrix();
    dz.tail(d) = (d_out * out * (1.0 - out)).matrix();
    dc = (dc.array() * forget).matrix();

    const auto x = c.neighbor_info.row(s);
    g.lstm_input.noalias() += dz * x;
    g.lstm_hidden.noalias() += dz * c.lstm_states.col(s).transpose();
    g.lstm_bias += dz;
    grad_neighbor_info.row(s) += (p.lstm_input.transpose() * dz).transpose();
    dh = p.lstm_hidden.transpose() * dz;
  }
}

}  // namespace

Eigen::VectorXd lstm_summarize(const Eigen::MatrixXd& neighbor_info, const LayerParams& params) {
  LayerCache cache;
  cache.neighbor_info = neighbor_info;
  if (neighbor_info.rows() == 0) {
    return Eigen::VectorXd::Zero(params.lstm_hidden.cols());
  }
  lstm_forward(params, cache);
  return cache.summary;
}

void layer_apply(const LayerParams& params, Aggregator aggregator, Eigen::VectorXd query_info,
                 Eigen::MatrixXd neighbor_info, LayerCache& c) {
  const Eigen::Index d = params.ffn_w2.rows();
  c.query_info = std::move(query_info);
  c.neighbor_info = std::move(neighbor_info);
  const Eigen::Index num_neighbors = c.neighbor_info.rows();
  c.head_query.clear();
  c.head_keys.clear();
  c.head_values.clear();
  c.head_weights.clear();

  if (num_neighbors == 0) {
    c.summary = Eigen::VectorXd::Zero(d);
  } else if (aggregator == Aggregator::kLstm) {
    lstm_forward(params, c);
  } else {
    const double scale = 1.0 / std::sqrt(static_cast<double>(c.query_info.size()));
    c.summary.resize(d);
    Eigen::Index offset = 0;
    for (size_t h = 0; h < params.value.size(); ++h) {
      Eigen::VectorXd weights;
      if (aggregator == Aggregator::kAttention) {
        c.head_query.push_back(params.query[h] * c.query_info);
        c.head_keys.push_back(c.neighbor_info * params.key[h].transpose());
        weights = softmax(scale * (c.head_keys.back() * c.head_query.back()));
      } else {
        weights = Eigen::VectorXd::Constant(num_neighbors, 1.0 / static_cast<double>(num_neighbors));
      }
      c.head_values.push_back(c.neighbor_info * params.value[h].transpose());
      const Eigen::Index width = params.value[h].rows();
      c.summary.segment(offset, width) = c.head_values.back().transpose() * weights;
      c.head_weights.push_back(std::move(weights));
      offset += width;
    }
  }

  c.ffn_input.resize(c.summary.size() + c.query_info.size());
  c.ffn_input << c.summary, c.query_info;
  c.ffn_pre = params.ffn_w1 * c.ffn_input + params.ffn_b1;
  c.output = params.ffn_w2 * c.ffn_pre.cwiseMax(0.0) + params.ffn_b2;
}

void layer_backward(const LayerParams& params, Aggregator aggregator, const LayerCache& c,
                    const Eigen::VectorXd& grad_output, LayerParams& grad,
                    Eigen::VectorXd& grad_query_info, Eigen::MatrixXd& grad_neighbor_info) {
  const Eigen::Index d = c.summary.size();
  const Eigen::VectorXd hidden = c.ffn_pre.cwiseMax(0.0);
  grad.ffn_w2.noalias() += grad_output * hidden.transpose();
  grad.ffn_b2 += grad_output;
  const Eigen::VectorXd grad_pre =
      (params.ffn_w2.transpose() * grad_output).cwiseProduct(
          (c.ffn_pre.array() > 0.0).cast<double>().matrix());
  grad.ffn_w1.noalias() += grad_pre * c.ffn_input.transpose();
  grad.ffn_b1 += grad_pre;
  const Eigen::VectorXd grad_input = params.ffn_w1.transpose() * grad_pre;

  grad_query_info = grad_input.tail(c.query_info.size());
  grad_neighbor_info = Eigen::MatrixXd::Zero(c.neighbor_info.rows(), c.neighbor_info.cols());
  if (c.neighbor_info.rows() == 0) {
    return;
  }
  const Eigen::VectorXd grad_summary = grad_input.head(d);

  if (aggregator == Aggregator::kLstm) {
    lstm_backward(params, c, grad_summary, grad, grad_neighbor_info);
    return;
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(c.query_info.size()));
  Eigen::Index offset = 0;
  for (size_t h = 0; h < params.value.size(); ++h) {
    const Eigen::Index width = params.value[h].rows();
    const Eigen::VectorXd g = grad_summary.segment(offset, width);
    offset += width;
    const Eigen::VectorXd& weights = c.head_weights[h];

    // summary_h = W_v H^T w
    grad.value[h].noalias() += g * (c.neighbor_info.transpose() * weights).transpose();
    grad_neighbor_info.noalias() += weights * (params.value[h].transpose() * g).transpose();
    if (aggregator != Aggregator::kAttention) {
      continue;
    }

    const Eigen::VectorXd grad_weights = c.head_values[h] * g;
    const Eigen::VectorXd grad_logits =
        weights.cwiseProduct(grad_weights.array().matrix() -
                             Eigen::VectorXd::Constant(weights.size(), weights.dot(grad_weights)));
    // logits = scale * K q, K = H W_k^T, q = W_q h_q
    const Eigen::VectorXd grad_q = scale * (c.head_keys[h].transpose() * grad_logits);
    const Eigen::MatrixXd grad_keys = scale * grad_logits * c.head_query[h].transpose();
    grad.query[h].noalias() += grad_q * c.query_info.transpose();
    grad_query_info.noalias() += params.query[h].transpose() * grad_q;
    grad.key[h].noalias() += grad_keys.transpose() * c.neighbor_info;
    grad_neighbor_info.noalias() += grad_keys * params.key[h];
  }
}

}  // namespace tgrec
