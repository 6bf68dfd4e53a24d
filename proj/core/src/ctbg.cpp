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

#include "tgrec/ctbg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "tgrec/random.hpp"

namespace tgrec {

namespace {

void validate(const Interaction& e, int32_t num_users, int32_t num_items, size_t index) {
  if (e.user < 0 || e.user >= num_users) {
    throw std::invalid_argument("interaction " + std::to_string(index) + ": user id " +
                                std::to_string(e.user) + " outside [0, " +
                                std::to_string(num_users) + ")");
  }
  if (e.item < 0 || e.item >= num_items) {
    throw std::invalid_argument("interaction " + std::to_string(index) + ": item id " +
                                std::to_string(e.item) + " outside [0, " +
                                std::to_string(num_items) + ")");
  }
  if (!std::isfinite(e.timestamp) || e.timestamp < 0.0) {
    throw std::invalid_argument("interaction " + std::to_string(index) +
                                ": timestamp must be finite and non-negative");
  }
}

// Counting-sort style CSR fill; `order` is already stable-sorted by time so
// every adjacency list comes out sorted with ties in input order.
template <typename KeyFn, typename OtherFn>
void fill_csr(std::span<const Interaction> interactions, const std::vector<size_t>& order,
              int32_t num_nodes, KeyFn key, OtherFn other, std::vector<size_t>& offsets,
              std::vector<Neighbor>& neighbors) {
  offsets.assign(static_cast<size_t>(num_nodes) + 1, 0);
  for (const auto& e : interactions) {
    ++offsets[static_cast<size_t>(key(e)) + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  neighbors.resize(interactions.size());
  std::vector<size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (size_t idx : order) {
    const auto& e = interactions[idx];
    neighbors[cursor[static_cast<size_t>(key(e))]++] = Neighbor{other(e), e.timestamp};
  }
}

}  // namespace

Ctbg Ctbg::build(std::span<const Interaction> interactions, int32_t num_users,
                 int32_t num_items) {
  if (interactions.empty()) {
    throw std::invalid_argument("cannot build a graph from an empty interaction list");
  }
  if (num_users <= 0 || num_items <= 0) {
    throw std::invalid_argument("node counts must be positive");
  }
  for (size_t k = 0; k < interactions.size(); ++k) {
    validate(interactions[k], num_users, num_items, k);
  }

  std::vector<size_t> order(interactions.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return interactions[a].timestamp < interactions[b].timestamp;
  });

  Ctbg g;
  g.num_users_ = num_users;
  g.num_items_ = num_items;
  fill_csr(
      interactions, order, num_users, [](const Interaction& e) { return e.user; },
      [](const Interaction& e) { return e.item; }, g.user_offsets_, g.user_neighbors_);
  fill_csr(
      interactions, order, num_items, [](const Interaction& e) { return e.item; },
      [](const Interaction& e) { return e.user; }, g.item_offsets_, g.item_neighbors_);
  return g;
}

bool Ctbg::contains(NodeRef node) const {
  const int32_t bound = node.kind == NodeKind::kUser ? num_users_ : num_items_;
  return node.id >= 0 && node.id < bound;
}

std::span<const Neighbor> Ctbg::adjacency(NodeRef node) const {
  if (!contains(node)) {
    throw std::out_of_range(std::string("unknown ") +
                            (node.kind == NodeKind::kUser ? "user " : "item ") +
                            std::to_string(node.id));
  }
  const auto& offsets = node.kind == NodeKind::kUser ? user_offsets_ : item_offsets_;
  const auto& neighbors = node.kind == NodeKind::kUser ? user_neighbors_ : item_neighbors_;
  const auto id = static_cast<size_t>(node.id);
  return std::span<const Neighbor>(neighbors).subspan(offsets[id], offsets[id + 1] - offsets[id]);
}

std::span<const Neighbor> Ctbg::neighbors_before(NodeRef node, double t) const {
  auto all = adjacency(node);
  auto end = std::lower_bound(all.begin(), all.end(), t,
                              [](const Neighbor& n, double v) { return n.timestamp < v; });
  return all.first(static_cast<size_t>(end - all.begin()));
}

Ctbg build_graph(std::span<const Interaction> interactions, int32_t num_users,
                 int32_t num_items) {
  return Ctbg::build(interactions, num_users, num_items);
}

Ctbg build_graph(std::span<const Interaction> interactions) {
  int32_t max_user = -1;
  int32_t max_item = -1;
  for (const auto& e : interactions) {
    max_user = std::max(max_user, e.user);
    max_item = std::max(max_item, e.item);
  }
  return Ctbg::build(interactions, max_user + 1, max_item + 1);
}

std::vector<SampledNeighbor> sample_neighbors(const Ctbg& graph, NodeRef node, double t,
                                              int count, uint64_t seed) {
  if (count < 1) {
    throw std::invalid_argument("sample count must be at least 1");
  }
  const auto pool = graph.neighbors_before(node, t);
  const auto pool_size = pool.size();
  if (pool_size == 0) {
    return {};
  }

  std::mt19937_64 rng(derive_seed(
      seed, {static_cast<uint64_t>(node.kind), static_cast<uint64_t>(node.id), time_key(t)}));
  const auto want = static_cast<size_t>(count);
  std::vector<size_t> picked;
  picked.reserve(want);

  if (pool_size >= want) {
    // Floyd's algorithm: uniform `want`-subset of [0, pool_size).
    for (size_t j = pool_size - want; j < pool_size; ++j) {
      std::uniform_int_distribution<size_t> dist(0, j);
      const size_t r = dist(rng);
      if (std::find(picked.begin(), picked.end(), r) == picked.end()) {
        picked.push_back(r);
      } else {
        picked.push_back(j);
      }
    }
  } else {
    picked.resize(pool_size);
    std::iota(picked.begin(), picked.end(), size_t{0});
    std::uniform_int_distribution<size_t> dist(0, pool_size - 1);
    while (picked.size() < want) {
      picked.push_back(dist(rng));
    }
  }
  std::sort(picked.begin(), picked.end());

  std::vector<SampledNeighbor> out;
  out.reserve(picked.size());
  for (size_t idx : picked) {
    out.push_back(SampledNeighbor{pool[idx].id, pool[idx].timestamp,
                                  static_cast<int32_t>(idx)});
  }
  return out;
}

SplitDataset chronological_split(std::span<const Interaction> interactions, SplitRatios ratios) {
  if (interactions.size() < 3) {
    throw std::invalid_argument("chronological split needs at least 3 interactions");
  }
  if (ratios.train < 0 || ratios.valid < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must be non-negative and sum to 1");
  }
  std::vector<Interaction> sorted(interactions.begin(), interactions.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Interaction& a, const Interaction& b) {
    return a.timestamp < b.timestamp;
  });

  const auto n = static_cast<double>(sorted.size());
  // Epsilon absorbs representation error, e.g. 0.7 * 10 evaluates to 6.9999...
  const auto n_train = static_cast<size_t>(std::floor(ratios.train * n + 1e-9));
  const auto n_valid = static_cast<size_t>(std::floor(ratios.valid * n + 1e-9));

  SplitDataset out;
  auto it = sorted.begin();
  out.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
  it += static_cast<std::ptrdiff_t>(n_train);
  out.valid.assign(it, it + static_cast<std::ptrdiff_t>(n_valid));
  it += static_cast<std::ptrdiff_t>(n_valid);
  out.test.assign(it, sorted.end());
  out.train_end = out.train.empty() ? sorted.front().timestamp : out.train.back().timestamp;
  out.valid_end = out.valid.empty() ? out.train_end : out.valid.back().timestamp;
  return out;
}

}  // namespace tgrec
