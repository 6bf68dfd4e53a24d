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
#include <vector>

#include "tgrec/ctbg.hpp"

namespace tgrec {

/// Planted temporal co-purchase data.
///
/// Users belong to cohorts and each cohort has a home segment of the catalog.
/// Items are split into `phases` groups; one group is in season for each slot
/// of a repeating cycle. Spontaneous purchases arrive as a Poisson process
/// and pick an unseen item with weight home_weight (home segment) times
/// phase_weight (in season). With probability partner_prob a purchase from
/// category c schedules a follow-up from category c + category_step after a
/// fixed lag with small jitter, drawn with the same weights. Users never buy
/// the same item twice.
///
/// The defaults plant a short-lag same-category signal: the follow-up to a
/// purchase is best predicted from that purchase and its timestamp, which a
/// static user profile cannot capture.
struct SyntheticConfig {
  int users = 200;
  int cohorts = 4;
  int items = 100;
  int interactions_per_user = 40;
  int phases = 1;
  double cycle_seconds = 16.0 * 86400.0;
  double span_seconds = 365.0 * 86400.0;
  double mean_gap_seconds = 4.0 * 86400.0;  // spontaneous purchases
  double home_weight = 2.0;
  double phase_weight = 6.0;
  int categories = 10;
  int category_step = 0;  // follow-up category offset
  double partner_prob = 0.9;
  double lag_seconds = 1.0 * 86400.0;
  double lag_jitter_seconds = 0.3 * 86400.0;
  uint64_t seed = 11;
};

/// Phase group in season at `seconds`.
int synthetic_phase(const SyntheticConfig& config, double seconds);
/// Phase group of an item.
int synthetic_item_phase(const SyntheticConfig& config, int item);
/// Category of an item; items are interleaved across categories.
int synthetic_category(const SyntheticConfig& config, int item);
/// Category a follow-up purchase is drawn from.
int synthetic_next_category(const SyntheticConfig& config, int category);

/// Raw timestamps in seconds, sorted by time. Deterministic in config.seed.
std::vector<Interaction> generate_synthetic(const SyntheticConfig& config);

}  // namespace tgrec
