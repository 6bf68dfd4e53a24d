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

#include "tgrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

namespace tgrec {

int synthetic_phase(const SyntheticConfig& c, double seconds) {
  const double pos = std::fmod(seconds, c.cycle_seconds) / c.cycle_seconds;
  return std::clamp(static_cast<int>(pos * c.phases), 0, c.phases - 1);
}

int synthetic_item_phase(const SyntheticConfig& c, int item) { return item % c.phases; }

int synthetic_category(const SyntheticConfig& c, int item) { return item % c.categories; }

int synthetic_next_category(const SyntheticConfig& c, int category) {
  return (category + c.category_step) % c.categories;
}

std::vector<Interaction> generate_synthetic(const SyntheticConfig& c) {
  if (c.users < 1 || c.cohorts < 1 || c.items < c.cohorts || c.items < c.phases ||
      c.categories < 1 || c.categories > c.items ||
      c.interactions_per_user < 1 || c.interactions_per_user > c.items || c.phases < 1 ||
      !(c.cycle_seconds > 0.0) || !(c.span_seconds > 0.0) || !(c.mean_gap_seconds > 0.0) ||
      !(c.home_weight > 0.0) || !(c.phase_weight > 0.0) || c.partner_prob < 0.0 ||
      c.partner_prob > 1.0 || c.lag_seconds < 0.0 || c.lag_jitter_seconds < 0.0) {
    throw std::invalid_argument("invalid synthetic config");
  }
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> gap(1.0 / c.mean_gap_seconds);
  const int segment = std::max(1, c.items / c.cohorts);
  const double active = 2.0 * c.mean_gap_seconds * c.interactions_per_user /
                        (1.0 + c.partner_prob);

  struct Pending {
    double t;
    int category;
    bool operator>(const Pending& o) const { return t > o.t; }
  };

  std::vector<Interaction> out;
  out.reserve(static_cast<size_t>(c.users) * static_cast<size_t>(c.interactions_per_user));
  std::vector<double> weight(static_cast<size_t>(c.items));
  for (int u = 0; u < c.users; ++u) {
    const int cohort = u % c.cohorts;
    std::vector<char> seen(static_cast<size_t>(c.items), 0);
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> follow_ups;
    double next_spontaneous = unit(rng) * std::max(0.0, c.span_seconds - active);
    int bought = 0;
    while (bought < c.interactions_per_user) {
      int item = -1;
      double t = 0.0;
      int category = -1;  // -1: spontaneous, any category
      if (!follow_ups.empty() && follow_ups.top().t <= next_spontaneous) {
        t = follow_ups.top().t;
        category = follow_ups.top().category;
        follow_ups.pop();
      } else {
        t = next_spontaneous;
        next_spontaneous += gap(rng);
      }
      const int phase = synthetic_phase(c, t);
      double total = 0.0;
      for (int i = 0; i < c.items; ++i) {
        double w = 0.0;
        if (!seen[static_cast<size_t>(i)] && (category < 0 || synthetic_category(c, i) == category)) {
          w = 1.0;
          if (i / segment == cohort) w *= c.home_weight;
          if (synthetic_item_phase(c, i) == phase) w *= c.phase_weight;
        }
        weight[static_cast<size_t>(i)] = w;
        total += w;
      }
      if (total <= 0.0) continue;
      double r = unit(rng) * total;
      for (int i = 0; i < c.items; ++i) {
        r -= weight[static_cast<size_t>(i)];
        if (r <= 0.0 && weight[static_cast<size_t>(i)] > 0.0) {
          item = i;
          break;
        }
      }
      if (item < 0) {
        for (int i = c.items; i-- > 0;) {
          if (weight[static_cast<size_t>(i)] > 0.0) {
            item = i;
            break;
          }
        }
      }
      if (t > c.span_seconds) break;
      seen[static_cast<size_t>(item)] = 1;
      out.push_back({u, item, std::round(t)});
      ++bought;
      if (unit(rng) < c.partner_prob) {
        const double jitter = (2.0 * unit(rng) - 1.0) * c.lag_jitter_seconds;
        follow_ups.push({t + c.lag_seconds + jitter,
                          synthetic_next_category(c, synthetic_category(c, item))});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Interaction& a, const Interaction& b) { return a.timestamp < b.timestamp; });
  return out;
}

}  // namespace tgrec
