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

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace tgrec {

/// One (user, item, timestamp) event. Ids are dense indices.
struct Interaction {
  int32_t user = 0;
  int32_t item = 0;
  double timestamp = 0.0;

  bool operator==(const Interaction&) const = default;
};

enum class NodeKind : uint8_t { kUser = 0, kItem = 1 };

struct NodeRef {
  NodeKind kind = NodeKind::kUser;
  int32_t id = 0;

  static NodeRef user(int32_t id) { return {NodeKind::kUser, id}; }
  static NodeRef item(int32_t id) { return {NodeKind::kItem, id}; }
  bool operator==(const NodeRef&) const = default;
};

/// Adjacency entry: the counterpart node (item for a user, user for an item)
/// and the edge timestamp.
struct Neighbor {
  int32_t id = 0;
  double timestamp = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// A neighbor drawn by the sampler. `position` is the edge's 0-based index
/// in the node's time-sorted pre-query history.
struct SampledNeighbor {
  int32_t id = 0;
  double timestamp = 0.0;
  int32_t position = 0;

  bool operator==(const SampledNeighbor&) const = default;
};

/// Continuous-time bipartite graph. Immutable after construction; users and
/// items live in separate index spaces. Each side stores a CSR adjacency
/// sorted by timestamp, ties kept in input order.
class Ctbg {
 public:
  Ctbg() = default;

  /// Throws std::invalid_argument on empty input, out-of-range ids or
  /// non-finite / negative timestamps.
  static Ctbg build(std::span<const Interaction> interactions, int32_t num_users,
                    int32_t num_items);

  int32_t num_users() const { return num_users_; }
  int32_t num_items() const { return num_items_; }
  size_t num_edges() const { return user_neighbors_.size(); }

  bool contains(NodeRef node) const;

  /// Full time-sorted adjacency of `node`. Throws std::out_of_range for an
  /// unknown node.
  std::span<const Neighbor> adjacency(NodeRef node) const;

  /// Edges of `node` with timestamp strictly less than `t`, time-sorted.
  std::span<const Neighbor> neighbors_before(NodeRef node, double t) const;

 private:
  int32_t num_users_ = 0;
  int32_t num_items_ = 0;
  std::vector<size_t> user_offsets_;
  std::vector<Neighbor> user_neighbors_;
  std::vector<size_t> item_offsets_;
  std::vector<Neighbor> item_neighbors_;
};

/// Builds the graph with node counts given explicitly.
Ctbg build_graph(std::span<const Interaction> interactions, int32_t num_users,
                 int32_t num_items);

/// Builds the graph with counts inferred as (max id + 1) on each side.
Ctbg build_graph(std::span<const Interaction> interactions);

/// Draws `count` neighbors of `node` from the pool of edges strictly before `t`.
///
/// When the pool holds at least `count` edges the draw is uniform without
/// replacement. A smaller non-empty pool is returned whole and padded with
/// uniform draws with replacement up to `count`. An empty pool yields an empty
/// result. The output is sorted by (timestamp, pool position) and is a pure
/// function of (graph, node, t, count, seed); future edges never change it.
std::vector<SampledNeighbor> sample_neighbors(const Ctbg& graph, NodeRef node, double t,
                                              int count, uint64_t seed);

struct SplitDataset {
  std::vector<Interaction> train;
  std::vector<Interaction> valid;
  std::vector<Interaction> test;
  double train_end = 0.0;  // timestamp of the last train interaction
  double valid_end = 0.0;  // timestamp of the last valid interaction (or train_end)
};

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
  bool operator==(const SplitRatios&) const = default;
};

/// Stable time sort, then a contiguous partition of sizes
/// floor(train*N), floor(valid*N) and the remainder.
SplitDataset chronological_split(std::span<const Interaction> interactions,
                                 SplitRatios ratios = {});

}  // namespace tgrec
