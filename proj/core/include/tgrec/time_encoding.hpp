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

#include <Eigen/Dense>
#include <string_view>

namespace tgrec {

/// How timestamps enter the information vectors.
///  - kLearned:  harmonic map with trainable frequencies.
///  - kFixed:    harmonic map, frequencies frozen at initialization.
///  - kPosition: learned lookup over the index of an edge in the query
///               node's time-sorted history; the query itself takes the next
///               index. Indices past the table are clamped to its last row.
///  - kEmpty:    all-zero time vector.
enum class TimeMode { kLearned, kFixed, kPosition, kEmpty };

std::string_view to_string(TimeMode mode);
TimeMode parse_time_mode(std::string_view text);

/// Affine map from raw seconds onto [0, 1] over the observed span.
struct TimeScale {
  double origin = 0.0;
  double span = 1.0;

  static TimeScale from_range(double min_seconds, double max_seconds);
  double normalize(double seconds) const { return (seconds - origin) / span; }
  double to_seconds(double normalized) const { return origin + normalized * span; }
  bool operator==(const TimeScale&) const = default;
};

/// Harmonic time encoder
///   phi(t) = sqrt(2 / d_time) [cos(w_1 t), sin(w_1 t), ..., cos(w_m t), sin(w_m t)]
/// with m = d_time / 2 frequencies. phi(t1) . phi(t2) depends only on t1 - t2
/// and equals 1 at zero lag.
struct TimeEncoder {
  Eigen::VectorXd omega;
  Eigen::MatrixXd positions;  // max_positions x d_time, used in kPosition mode only
  TimeMode mode = TimeMode::kLearned;

  TimeEncoder() = default;
  explicit TimeEncoder(Eigen::VectorXd frequencies, TimeMode m = TimeMode::kLearned,
                       int max_positions = 0);

  /// Frequencies spaced geometrically from `max_frequency` rad/s down to
  /// 1/span rad/s in raw units, expressed in normalized time (multiplied by
  /// `span_seconds`).
  static TimeEncoder geometric(int time_dim, double span_seconds, TimeMode m = TimeMode::kLearned,
                               int max_positions = 0, double max_frequency = 1.0);

  int dim() const { return static_cast<int>(2 * omega.size()); }
  double scale() const;
  bool omega_trainable() const { return mode == TimeMode::kLearned; }

  Eigen::VectorXd encode(double t) const;
  double kernel(double t1, double t2) const;

  /// Mode-aware time vector for an event at `t` with history index `position`.
  Eigen::VectorXd features(double t, int position) const;

  /// Adds d(upstream . features(t, position)) into `grad` (same shape as *this).
  void accumulate_gradient(double t, int position, const Eigen::Ref<const Eigen::VectorXd>& upstream,
                           TimeEncoder& grad) const;

  void set_zero();
};

}  // namespace tgrec
