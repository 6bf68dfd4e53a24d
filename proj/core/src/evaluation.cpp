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

#include "tgrec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tgrec/random.hpp"

namespace tgrec {

namespace {

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string MetricsReport::tsv_header(char delimiter) const {
  std::string out = "n_evaluated";
  for (const auto& [n, _] : recall_at) out += delimiter + ("recall@" + std::to_string(n));
  for (const auto& [n, _] : ndcg_at) out += delimiter + ("ndcg@" + std::to_string(n));
  out += delimiter;
  out += "mrr";
  return out;
}

std::string MetricsReport::tsv_row(char delimiter) const {
  std::string out = std::to_string(n_evaluated);
  for (const auto& [_, v] : recall_at) out += delimiter + fixed6(v);
  for (const auto& [_, v] : ndcg_at) out += delimiter + fixed6(v);
  out += delimiter + fixed6(mrr);
  return out;
}

std::string MetricsReport::table() const {
  std::ostringstream os;
  os << "metric       value\n";
  for (const auto& [n, v] : recall_at) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-12s %.6f\n", ("Recall@" + std::to_string(n)).c_str(), v);
    os << buf;
  }
  for (const auto& [n, v] : ndcg_at) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-12s %.6f\n", ("NDCG@" + std::to_string(n)).c_str(), v);
    os << buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-12s %.6f\n", "MRR", mrr);
  os << buf;
  os << "interactions " << n_evaluated << "\n";
  return os.str();
}

void ModelScorer::score(int32_t user, double t, std::span<const int32_t> items,
                        std::span<double> out) const {
  ForwardTape tape(params_, graph_, params_.config.sampler_seed);
  if (observer_) {
    tape.set_observer(observer_);
  }
  const Eigen::VectorXd u = tape.value(tape.embed(NodeRef::user(user), t));
  for (size_t k = 0; k < items.size(); ++k) {
    out[k] = u.dot(tape.value(tape.embed(NodeRef::item(items[k]), t)));
  }
}

PopularityScorer::PopularityScorer(std::span<const Interaction> train, int32_t num_items)
    : counts_(static_cast<size_t>(num_items), 0.0) {
  for (const auto& e : train) {
    if (e.item < 0 || e.item >= num_items) {
      throw std::out_of_range("item id outside the popularity table");
    }
    counts_[static_cast<size_t>(e.item)] += 1.0;
  }
}

void PopularityScorer::score(int32_t /*user*/, double /*t*/, std::span<const int32_t> items,
                             std::span<double> out) const {
  for (size_t k = 0; k < items.size(); ++k) {
    out[k] = counts_.at(static_cast<size_t>(items[k]));
  }
}

std::vector<int32_t> candidate_set(const Ctbg& graph, int32_t u, double t, int32_t truth,
                                   const EvalConfig& config) {
  const int32_t num_items = graph.num_items();
  if (truth < 0 || truth >= num_items) {
    throw std::out_of_range("ground-truth item outside the catalog");
  }
  std::vector<char> seen(static_cast<size_t>(num_items), 0);
  for (const auto& n : graph.neighbors_before(NodeRef::user(u), t)) {
    seen[static_cast<size_t>(n.id)] = 1;
  }
  seen[static_cast<size_t>(truth)] = 1;
  std::vector<int32_t> negatives;
  for (int32_t i = 0; i < num_items; ++i) {
    if (!seen[static_cast<size_t>(i)]) negatives.push_back(i);
  }

  if (config.mode == CandidateMode::kSampled &&
      negatives.size() > static_cast<size_t>(std::max(config.sample_size, 0))) {
    std::mt19937_64 rng(derive_seed(config.seed, {static_cast<uint64_t>(u), time_key(t)}));
    const auto k = static_cast<size_t>(std::max(config.sample_size, 0));
    for (size_t j = 0; j < k; ++j) {
      std::uniform_int_distribution<size_t> pick(j, negatives.size() - 1);
      std::swap(negatives[j], negatives[pick(rng)]);
    }
    negatives.resize(k);
  }
  negatives.push_back(truth);
  std::sort(negatives.begin(), negatives.end());
  return negatives;
}

RankMetrics metrics_for_rank(int rank, std::span<const int> cutoffs) {
  if (rank < 1) {
    throw std::invalid_argument("rank must be >= 1");
  }
  RankMetrics m;
  for (int n : cutoffs) {
    const bool hit = rank <= n;
    m.recall.push_back(hit ? 1.0 : 0.0);
    m.ndcg.push_back(hit ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0);
  }
  m.reciprocal_rank = 1.0 / static_cast<double>(rank);
  return m;
}

int rank_of(int32_t truth, std::span<const int32_t> items, std::span<const double> scores) {
  double truth_score = 0.0;
  bool found = false;
  for (size_t k = 0; k < items.size(); ++k) {
    if (items[k] == truth) {
      truth_score = scores[k];
      found = true;
      break;
    }
  }
  if (!found) {
    throw std::invalid_argument("ground truth missing from the candidate list");
  }
  int rank = 1;
  for (size_t k = 0; k < items.size(); ++k) {
    if (scores[k] > truth_score || (scores[k] == truth_score && items[k] < truth)) {
      ++rank;
    }
  }
  return rank;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MetricsReport evaluate(const Scorer& scorer, const Ctbg& graph, std::span<const Interaction> test,
                       const EvalConfig& config) {
  if (test.empty()) {
    throw std::invalid_argument("cannot evaluate an empty test set");
  }
  const size_t n = test.size();
  const size_t n_cut = config.cutoffs.size();
  std::vector<double> recall(n * n_cut), ndcg(n * n_cut), rr(n);

  auto run = [&](size_t k) {
    const auto& e = test[k];
    const auto candidates = candidate_set(graph, e.user, e.timestamp, e.item, config);
    std::vector<double> scores(candidates.size());
    scorer.score(e.user, e.timestamp, candidates, scores);
    const auto m = metrics_for_rank(rank_of(e.item, candidates, scores), config.cutoffs);
    for (size_t c = 0; c < n_cut; ++c) {
      recall[c * n + k] = m.recall[c];
      ndcg[c * n + k] = m.ndcg[c];
    }
    rr[k] = m.reciprocal_rank;
  };

  const auto workers = static_cast<size_t>(std::max(1, config.workers));
  if (workers == 1) {
    for (size_t k = 0; k < n; ++k) run(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (size_t k = w; k < n; k += workers) run(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  MetricsReport report;
  report.n_evaluated = n;
  const double inv = 1.0 / static_cast<double>(n);
  for (size_t c = 0; c < n_cut; ++c) {
    const std::span<const double> rs(recall.data() + c * n, n);
    const std::span<const double> ns(ndcg.data() + c * n, n);
    report.recall_at[config.cutoffs[c]] = pairwise_sum(rs) * inv;
    report.ndcg_at[config.cutoffs[c]] = pairwise_sum(ns) * inv;
  }
  report.mrr = pairwise_sum(rr) * inv;
  return report;
}

}  // namespace tgrec
