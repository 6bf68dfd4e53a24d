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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tgrec/ctbg.hpp"
#include "tgrec/forward_tape.hpp"
#include "tgrec/model.hpp"

namespace tgrec {

struct MetricsReport {
  std::map<int, double> recall_at;
  std::map<int, double> ndcg_at;
  double mrr = 0.0;
  size_t n_evaluated = 0;

  /// "n\trecall@10\t...\tndcg@10\t...\tmrr" header and values.
  std::string tsv_header(char delimiter = '\t') const;
  std::string tsv_row(char delimiter = '\t') const;
  std::string table() const;
};

/// Scores items for a user at a time. Implementations must be safe to call
/// concurrently.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual void score(int32_t user, double t, std::span<const int32_t> items,
                     std::span<double> out) const = 0;
};

/// Scores with the temporal model over a graph holding every interaction
/// available at evaluation time.
class ModelScorer : public Scorer {
 public:
  ModelScorer(const ModelParams& params, const Ctbg& graph) : params_(params), graph_(graph) {}
  void score(int32_t user, double t, std::span<const int32_t> items,
             std::span<double> out) const override;
  /// Forwarded to every tape the scorer creates.
  void set_observer(ForwardTape::SampleObserver observer) { observer_ = std::move(observer); }

 private:
  const ModelParams& params_;
  const Ctbg& graph_;
  ForwardTape::SampleObserver observer_;
};

/// Ranks items by their interaction count in the training set.
class PopularityScorer : public Scorer {
 public:
  PopularityScorer(std::span<const Interaction> train, int32_t num_items);
  void score(int32_t user, double t, std::span<const int32_t> items,
             std::span<double> out) const override;
  const std::vector<double>& counts() const { return counts_; }

 private:
  std::vector<double> counts_;
};

enum class CandidateMode { kFull, kSampled };

struct EvalConfig {
  CandidateMode mode = CandidateMode::kFull;
  int sample_size = 1000;
  uint64_t seed = 5;
  std::vector<int> cutoffs = {10, 20};
  int workers = 1;
  bool operator==(const EvalConfig&) const = default;
};

/// Candidates for ranking `truth` for user `u` at `t`. Full mode: every item
/// the user has no edge with strictly before `t`, plus `truth`. Sampled
/// mode: `truth` plus up to k negatives drawn without replacement from the
/// full-mode negatives, with a stream seeded by (seed, u, t). Sorted ascending.
std::vector<int32_t> candidate_set(const Ctbg& graph, int32_t u, double t, int32_t truth,
                                   const EvalConfig& config);

struct RankMetrics {
  std::vector<double> recall;  // aligned with the cutoff list
  std::vector<double> ndcg;
  double reciprocal_rank = 0.0;
};

/// Metrics for a ground truth at 1-based `rank`.
RankMetrics metrics_for_rank(int rank, std::span<const int> cutoffs);

/// 1-based position of `truth` when `items` are sorted by descending score,
/// ties broken by ascending item id.
int rank_of(int32_t truth, std::span<const int32_t> items, std::span<const double> scores);

/// Mean per-interaction metrics over `test`. `graph` must contain all
/// interactions visible at evaluation time; only edges strictly before each
/// test timestamp are read.
MetricsReport evaluate(const Scorer& scorer, const Ctbg& graph, std::span<const Interaction> test,
                       const EvalConfig& config);

/// Sum by recursive halving; fixed association order for a given length.
double pairwise_sum(std::span<const double> values);

}  // namespace tgrec
