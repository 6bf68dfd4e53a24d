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

#include <benchmark/benchmark.h>

#include <span>

#include "tgrec/evaluation.hpp"
#include "tgrec/model.hpp"
#include "tgrec/synthetic.hpp"
#include "tgrec/tct_layer.hpp"
#include "tgrec/time_encoding.hpp"
#include "tgrec/training.hpp"

namespace {

using namespace tgrec;

struct Fixture {
  std::vector<Interaction> edges;
  Ctbg graph;
  ModelParams params;

  Fixture(int layers, int neighbors) {
    SyntheticConfig sc;
    edges = generate_synthetic(sc);
    const auto scale = TimeScale::from_range(edges.front().timestamp, edges.back().timestamp);
    for (auto& e : edges) e.timestamp = scale.normalize(e.timestamp);
    graph = build_graph(edges, sc.users, sc.items);
    ModelConfig mc;
    mc.dim = 16;
    mc.time_dim = 16;
    mc.layers = layers;
    mc.neighbors = neighbors;
    mc.time_span_seconds = scale.span;
    params = init_params(mc, sc.users, sc.items, 1);
  }
};

void BM_TimeEncode(benchmark::State& state) {
  const auto enc = TimeEncoder::geometric(static_cast<int>(state.range(0)), 3.0e7);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(enc.encode(t));
    t += 1e-4;
  }
}
BENCHMARK(BM_TimeEncode)->Arg(16)->Arg(64);

void BM_LayerForward(benchmark::State& state) {
  const auto s = static_cast<Eigen::Index>(state.range(0));
  ModelConfig mc;
  mc.dim = 32;
  mc.time_dim = 32;
  const auto p = init_params(mc, 1, 1, 1);
  const Eigen::VectorXd q = Eigen::VectorXd::Random(mc.info_dim());
  const Eigen::MatrixXd n = Eigen::MatrixXd::Random(s, mc.info_dim());
  LayerCache cache;
  for (auto _ : state) {
    layer_apply(p.layers[0], Aggregator::kAttention, q, n, cache);
    benchmark::DoNotOptimize(cache.output.data());
  }
}
BENCHMARK(BM_LayerForward)->Arg(10)->Arg(20)->Arg(50);

void BM_Score(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)), 10);
  const double t = f.edges.back().timestamp;
  int32_t u = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(score(f.params, f.graph, u, 3, t));
    u = (u + 1) % f.params.num_users;
  }
}
BENCHMARK(BM_Score)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_TrainStep(benchmark::State& state) {
  const Fixture f(1, 20);
  TrainConfig tc;
  uint64_t seed = 0;
  for (auto _ : state) {
    const auto batch = sample_batch(f.edges, f.graph, static_cast<int>(state.range(0)), ++seed);
    benchmark::DoNotOptimize(backward(f.params, f.graph, batch.samples, tc, seed).loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_FullRankingEval(benchmark::State& state) {
  const Fixture f(1, 20);
  const ModelScorer scorer(f.params, f.graph);
  const std::span<const Interaction> test(f.edges.end() - 50, f.edges.end());
  EvalConfig ec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(scorer, f.graph, test, ec).mrr);
  }
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_FullRankingEval)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
