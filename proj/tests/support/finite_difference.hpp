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

// Central-difference gradient oracle over every trainable parameter entry.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tgrec/model.hpp"

namespace tgrec::testing {

struct GroupCheck {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  size_t entries = 0;
};

/// Relative error with a small denominator floor so that entries whose true
/// gradient is zero are judged on absolute agreement at that floor.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Compares `analytic` (shaped like `params`) with central differences of
/// `loss` at step `h`. `params` is perturbed in place and restored.
inline std::vector<GroupCheck> check_gradients(ModelParams& params, const ModelParams& analytic,
                                               const std::function<double()>& loss,
                                               double h = 1e-5) {
  std::vector<GroupCheck> out;
  auto values = param_tensors(params);
  const auto grads = param_tensors(analytic);
  for (size_t g = 0; g < values.size(); ++g) {
    if (!values[g].trainable) continue;
    GroupCheck check;
    check.name = values[g].name;
    for (size_t k = 0; k < values[g].values.size(); ++k) {
      double& x = values[g].values[k];
      const double saved = x;
      x = saved + h;
      const double up = loss();
      x = saved - h;
      const double down = loss();
      x = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = grads[g].values[k];
      check.max_rel_error = std::max(check.max_rel_error, relative_error(a, numeric));
      check.max_abs_error = std::max(check.max_abs_error, std::abs(a - numeric));
      ++check.entries;
    }
    out.push_back(check);
  }
  return out;
}

}  // namespace tgrec::testing
