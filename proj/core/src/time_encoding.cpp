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

#include "tgrec/time_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tgrec {

std::string_view to_string(TimeMode mode) {
  switch (mode) {
    case TimeMode::kLearned:
      return "learned";
    case TimeMode::kFixed:
      return "fixed";
    case TimeMode::kPosition:
      return "position";
    case TimeMode::kEmpty:
      return "empty";
  }
  return "learned";
}

TimeMode parse_time_mode(std::string_view text) {
  if (text == "learned") return TimeMode::kLearned;
  if (text == "fixed") return TimeMode::kFixed;
  if (text == "position") return TimeMode::kPosition;
  if (text == "empty") return TimeMode::kEmpty;
  throw std::invalid_argument("unknown time mode '" + std::string(text) + "'");
}

TimeScale TimeScale::from_range(double min_seconds, double max_seconds) {
  TimeScale s;
  s.origin = min_seconds;
  s.span = max_seconds > min_seconds ? max_seconds - min_seconds : 1.0;
  return s;
}

TimeEncoder::TimeEncoder(Eigen::VectorXd frequencies, TimeMode m, int max_positions)
    : omega(std::move(frequencies)), mode(m) {
  if (omega.size() == 0) {
    throw std::invalid_argument("time encoder needs at least one frequency");
  }
  if (!omega.allFinite()) {
    throw std::invalid_argument("time encoder frequencies must be finite");
  }
  if (mode == TimeMode::kPosition) {
    if (max_positions < 1) {
      throw std::invalid_argument("position mode needs max_positions >= 1");
    }
    positions = Eigen::MatrixXd::Zero(max_positions, dim());
  }
}

TimeEncoder TimeEncoder::geometric(int time_dim, double span_seconds, TimeMode m,
                                   int max_positions, double max_frequency) {
  if (time_dim < 2 || time_dim % 2 != 0) {
    throw std::invalid_argument("time dimension must be even and >= 2");
  }
  if (!(max_frequency > 0.0) || !std::isfinite(max_frequency)) {
    throw std::invalid_argument("max frequency must be positive and finite");
  }
  const int count = time_dim / 2;
  const double span = std::max(span_seconds, 1.0);
  const double top = std::max(max_frequency, 1.0 / span);
  Eigen::VectorXd w(count);
  // Raw frequency top * 10^{-k alpha}, k = 0..count-1, reaches 1/span at the
  // last index. In normalized time every raw frequency is multiplied by span.
  const double alpha = count > 1 ? std::log10(top * span) / (count - 1) : 0.0;
  for (int k = 0; k < count; ++k) {
    w[k] = span * top * std::pow(10.0, -k * alpha);
  }
  return TimeEncoder(std::move(w), m, max_positions);
}

double TimeEncoder::scale() const { return std::sqrt(2.0 / dim()); }

Eigen::VectorXd TimeEncoder::encode(double t) const {
  const double c = scale();
  Eigen::VectorXd out(dim());
  for (Eigen::Index k = 0; k < omega.size(); ++k) {
    out[2 * k] = c * std::cos(omega[k] * t);
    out[2 * k + 1] = c * std::sin(omega[k] * t);
  }
  return out;
}

double TimeEncoder::kernel(double t1, double t2) const { return encode(t1).dot(encode(t2)); }

Eigen::VectorXd TimeEncoder::features(double t, int position) const {
  switch (mode) {
    case TimeMode::kLearned:
    case TimeMode::kFixed:
      return encode(t);
    case TimeMode::kPosition: {
      const auto row = std::clamp<Eigen::Index>(position, 0, positions.rows() - 1);
      return positions.row(row).transpose();
    }
    case TimeMode::kEmpty:
      break;
  }
  return Eigen::VectorXd::Zero(dim());
}

void TimeEncoder::accumulate_gradient(double t, int position,
                                      const Eigen::Ref<const Eigen::VectorXd>& upstream,
                                      TimeEncoder& grad) const {
  switch (mode) {
    case TimeMode::kLearned: {
      const double c = scale();
      for (Eigen::Index k = 0; k < omega.size(); ++k) {
        const double wt = omega[k] * t;
        grad.omega[k] += c * t * (-std::sin(wt) * upstream[2 * k] + std::cos(wt) * upstream[2 * k + 1]);
      }
      break;
    }
    case TimeMode::kPosition: {
      const auto row = std::clamp<Eigen::Index>(position, 0, positions.rows() - 1);
      grad.positions.row(row) += upstream.transpose();
      break;
    }
    case TimeMode::kFixed:
    case TimeMode::kEmpty:
      break;
  }
}

void TimeEncoder::set_zero() {
  omega.setZero();
  positions.setZero();
}

}  // namespace tgrec
