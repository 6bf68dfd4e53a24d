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

#include "tgrec/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "tgrec/forward_tape.hpp"
#include "tgrec/random.hpp"

namespace tgrec {

namespace {

// Samples per forward tape. Gradients are reduced shard by shard in a fixed
// order, so results do not depend on the worker count.
constexpr size_t kShardSize = 32;

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <typename Fn>
void parallel_for(size_t count, int workers, Fn&& fn) {
  const auto n_threads = static_cast<size_t>(std::max(1, workers));
  if (n_threads == 1 || count < 2) {
    for (size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_threads);
  for (size_t w = 0; w < std::min(n_threads, count); ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t k = w; k < count; k += n_threads) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void add_into(ModelParams& dst, ModelParams& src) {
  auto d = param_tensors(dst);
  auto s = param_tensors(src);
  for (size_t k = 0; k < d.size(); ++k) {
    for (size_t j = 0; j < d[k].values.size(); ++j) {
      d[k].values[j] += s[k].values[j];
    }
  }
}

}  // namespace

std::string_view to_string(LossKind loss) { return loss == LossKind::kBpr ? "bpr" : "bce"; }

LossKind parse_loss(std::string_view text) {
  if (text == "bpr") return LossKind::kBpr;
  if (text == "bce") return LossKind::kBce;
  throw std::invalid_argument("unknown loss '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("train config: " + what); };
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be >= 0");
  if (!(l2 >= 0.0)) fail("l2 must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (epochs < 0) fail("epochs must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    fail("moment decay rates must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
}

SampledBatch attach_negatives(std::span<const Interaction> positives, const Ctbg& graph,
                              uint64_t seed) {
  SampledBatch out;
  out.samples.reserve(positives.size());
  const int32_t num_items = graph.num_items();
  std::vector<int32_t> excluded;
  for (size_t k = 0; k < positives.size(); ++k) {
    const auto& e = positives[k];
    excluded.clear();
    for (const auto& n : graph.neighbors_before(NodeRef::user(e.user), e.timestamp)) {
      excluded.push_back(n.id);
    }
    excluded.push_back(e.item);
    std::sort(excluded.begin(), excluded.end());
    excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
    const auto eligible = static_cast<size_t>(num_items) - excluded.size();
    if (eligible == 0) {
      ++out.skipped;
      continue;
    }

    std::mt19937_64 rng(derive_seed(seed, {k}));
    auto is_excluded = [&](int32_t item) {
      return std::binary_search(excluded.begin(), excluded.end(), item);
    };
    int32_t neg = -1;
    std::uniform_int_distribution<int32_t> any(0, num_items - 1);
    for (int attempt = 0; attempt < 64 && neg < 0; ++attempt) {
      const int32_t c = any(rng);
      if (!is_excluded(c)) neg = c;
    }
    if (neg < 0) {
      // Dense history: pick the j-th eligible item directly.
      std::uniform_int_distribution<size_t> pick(0, eligible - 1);
      size_t j = pick(rng);
      for (int32_t c = 0; c < num_items; ++c) {
        if (!is_excluded(c) && j-- == 0) {
          neg = c;
          break;
        }
      }
    }
    out.samples.push_back({e.user, e.item, neg, e.timestamp});
  }
  return out;
}

SampledBatch sample_batch(std::span<const Interaction> train_edges, const Ctbg& graph,
                          int batch_size, uint64_t seed) {
  if (train_edges.empty()) {
    throw std::invalid_argument("cannot sample a batch from an empty train set");
  }
  std::mt19937_64 rng(derive_seed(seed, {0}));
  std::uniform_int_distribution<size_t> pick(0, train_edges.size() - 1);
  std::vector<Interaction> positives;
  positives.reserve(static_cast<size_t>(std::max(batch_size, 0)));
  for (int k = 0; k < batch_size; ++k) {
    positives.push_back(train_edges[pick(rng)]);
  }
  return attach_negatives(positives, graph, derive_seed(seed, {1}));
}

double bpr_loss(double r_pos, double r_neg, double l2_term) {
  return softplus(-(r_pos - r_neg)) + l2_term;
}

double bce_loss(double r_pos, double r_neg, double l2_term) {
  return softplus(-r_pos) + softplus(r_neg) + l2_term;
}

PairLoss pair_loss(LossKind kind, double r_pos, double r_neg) {
  if (kind == LossKind::kBpr) {
    const double g = sigmoid(-(r_pos - r_neg));
    return {bpr_loss(r_pos, r_neg, 0.0), -g, g};
  }
  return {bce_loss(r_pos, r_neg, 0.0), -sigmoid(-r_pos), sigmoid(r_neg)};
}

GradientResult backward(const ModelParams& params, const Ctbg& graph,
                        std::span<const TrainSample> batch, const TrainConfig& config,
                        uint64_t sampler_seed) {
  GradientResult out;
  out.grad = zeros_like(params);
  if (batch.empty()) {
    return out;
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const size_t n_shards = (batch.size() + kShardSize - 1) / kShardSize;
  std::vector<ModelParams> shard_grads(n_shards);
  std::vector<double> shard_loss(n_shards, 0.0);
  std::vector<std::vector<Eigen::Index>> shard_rows(n_shards);

  parallel_for(n_shards, config.workers, [&](size_t s) {
    shard_grads[s] = zeros_like(params);
    ForwardTape tape(params, graph, sampler_seed);
    const size_t begin = s * kShardSize;
    const size_t end = std::min(batch.size(), begin + kShardSize);
    double loss = 0.0;
    for (size_t k = begin; k < end; ++k) {
      const auto& sample = batch[k];
      const auto hu = tape.embed(NodeRef::user(sample.user), sample.t);
      const auto hp = tape.embed(NodeRef::item(sample.pos), sample.t);
      const auto hn = tape.embed(NodeRef::item(sample.neg), sample.t);
      const Eigen::VectorXd eu = tape.value(hu);
      const Eigen::VectorXd ep = tape.value(hp);
      const Eigen::VectorXd en = tape.value(hn);
      const PairLoss pl = pair_loss(config.loss, eu.dot(ep), eu.dot(en));
      loss += pl.value;
      tape.add_gradient(hu, inv_n * (pl.d_pos * ep + pl.d_neg * en));
      tape.add_gradient(hp, inv_n * pl.d_pos * eu);
      tape.add_gradient(hn, inv_n * pl.d_neg * eu);
    }
    tape.backward(shard_grads[s]);
    shard_loss[s] = loss;
    shard_rows[s] = tape.touched_rows();
  });

  double loss_sum = 0.0;
  for (size_t s = 0; s < n_shards; ++s) {
    add_into(out.grad, shard_grads[s]);
    loss_sum += shard_loss[s];
    out.touched_rows.insert(out.touched_rows.end(), shard_rows[s].begin(), shard_rows[s].end());
  }
  std::sort(out.touched_rows.begin(), out.touched_rows.end());
  out.touched_rows.erase(std::unique(out.touched_rows.begin(), out.touched_rows.end()),
                         out.touched_rows.end());
  out.data_loss = loss_sum * inv_n;

  if (config.l2 > 0.0) {
    double reg = 0.0;
    for (Eigen::Index r : out.touched_rows) {
      reg += params.embeddings.row(r).squaredNorm();
      out.grad.embeddings.row(r) += 2.0 * config.l2 * params.embeddings.row(r);
    }
    const auto p_tensors = param_tensors(params);
    auto g_tensors = param_tensors(out.grad);
    for (size_t k = 0; k < p_tensors.size(); ++k) {
      if (p_tensors[k].name == "embeddings" || !p_tensors[k].trainable) continue;
      for (size_t j = 0; j < p_tensors[k].values.size(); ++j) {
        const double v = p_tensors[k].values[j];
        reg += v * v;
        g_tensors[k].values[j] += 2.0 * config.l2 * v;
      }
    }
    out.reg_loss = config.l2 * reg;
  }
  out.loss = out.data_loss + out.reg_loss;

  for (const auto& t : param_tensors(out.grad)) {
    for (double v : t.values) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("non-finite gradient in parameter group '" + t.name + "'");
      }
    }
  }
  return out;
}

double batch_loss(const ModelParams& params, const Ctbg& graph, std::span<const TrainSample> batch,
                  LossKind kind, uint64_t sampler_seed) {
  if (batch.empty()) return 0.0;
  ForwardTape tape(params, graph, sampler_seed);
  double loss = 0.0;
  for (const auto& s : batch) {
    const Eigen::VectorXd eu = tape.value(tape.embed(NodeRef::user(s.user), s.t));
    const Eigen::VectorXd ep = tape.value(tape.embed(NodeRef::item(s.pos), s.t));
    const Eigen::VectorXd en = tape.value(tape.embed(NodeRef::item(s.neg), s.t));
    loss += pair_loss(kind, eu.dot(ep), eu.dot(en)).value;
  }
  return loss / static_cast<double>(batch.size());
}

AdamOptimizer::AdamOptimizer(const ModelParams& params, const TrainConfig& config)
    : lr_(config.learning_rate),
      beta1_(config.beta1),
      beta2_(config.beta2),
      eps_(config.epsilon),
      first_(zeros_like(params)),
      second_(zeros_like(params)) {}

void AdamOptimizer::step(ModelParams& params, ModelParams& grad) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto p = param_tensors(params);
  auto g = param_tensors(grad);
  auto m = param_tensors(first_);
  auto v = param_tensors(second_);
  for (size_t k = 0; k < p.size(); ++k) {
    if (!p[k].trainable) continue;
    for (size_t j = 0; j < p[k].values.size(); ++j) {
      const double gj = g[k].values[j];
      double& mj = m[k].values[j];
      double& vj = v[k].values[j];
      mj = beta1_ * mj + (1.0 - beta1_) * gj;
      vj = beta2_ * vj + (1.0 - beta2_) * gj * gj;
      p[k].values[j] -= lr_ * (mj / c1) / (std::sqrt(vj / c2) + eps_);
    }
  }
}

FitResult fit(ModelParams& params, const Ctbg& train_graph, std::span<const Interaction> train,
              const TrainConfig& config, const FitCallbacks& callbacks) {
  config.validate();
  FitResult result;
  if (config.epochs == 0) {
    return result;
  }
  if (train.empty()) {
    throw std::invalid_argument("cannot fit on an empty train set");
  }
  AdamOptimizer optimizer(params, config);
  std::vector<size_t> order(train.size());
  std::vector<Interaction> positives;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), size_t{0});
    std::mt19937_64 shuffle_rng(derive_seed(config.negative_seed, {0x5eed, static_cast<uint64_t>(epoch)}));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const uint64_t sampler_seed =
        config.resample_per_epoch
            ? derive_seed(params.config.sampler_seed, {static_cast<uint64_t>(epoch)})
            : params.config.sampler_seed;

    EpochLog entry;
    entry.epoch = epoch;
    double loss_sum = 0.0;
    size_t n_samples = 0;
    const auto batch = static_cast<size_t>(config.batch_size);
    for (size_t begin = 0, b = 0; begin < order.size(); begin += batch, ++b) {
      positives.clear();
      for (size_t k = begin; k < std::min(order.size(), begin + batch); ++k) {
        positives.push_back(train[order[k]]);
      }
      auto sampled = attach_negatives(
          positives, train_graph,
          derive_seed(config.negative_seed, {static_cast<uint64_t>(epoch), b}));
      entry.skipped += sampled.skipped;
      if (sampled.samples.empty()) continue;
      auto step = backward(params, train_graph, sampled.samples, config, sampler_seed);
      if (!std::isfinite(step.loss)) {
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " + std::to_string(b));
      }
      loss_sum += step.data_loss * static_cast<double>(sampled.samples.size());
      n_samples += sampled.samples.size();
      optimizer.step(params, step.grad);
    }
    entry.mean_loss = n_samples > 0 ? loss_sum / static_cast<double>(n_samples) : 0.0;
    if (callbacks.validate) {
      entry.valid = callbacks.validate(epoch, params);
    }
    entry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (callbacks.on_epoch) {
      callbacks.on_epoch(entry);
    }
    result.log.push_back(std::move(entry));
  }
  return result;
}

}  // namespace tgrec
