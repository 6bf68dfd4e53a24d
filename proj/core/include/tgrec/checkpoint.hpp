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

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "tgrec/dataset_io.hpp"
#include "tgrec/model.hpp"
#include "tgrec/time_encoding.hpp"

namespace tgrec {

/// Everything needed to score a dataset again: parameters, the raw id
/// mapping and the timestamp normalization.
struct Checkpoint {
  ModelParams params;
  IdMap ids;
  TimeScale scale;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr uint32_t kCheckpointVersion = 1;

/// Layout: magic "TGRCKPT\0", u32 version, model config block, time scale,
/// id-map block, then one block per parameter tensor in param_tensors order.
/// Integers and doubles are little-endian.
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tgrec
