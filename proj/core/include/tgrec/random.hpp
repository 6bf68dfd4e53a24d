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

#include <bit>
#include <cstdint>
#include <initializer_list>

namespace tgrec {

// SplitMix64 finalizer. Used to derive independent stream seeds from a base
// seed plus structured keys (node, timestamp, epoch, ...).
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> keys) {
  uint64_t h = mix64(base);
  for (uint64_t k : keys) {
    h = mix64(h ^ mix64(k));
  }
  return h;
}

inline uint64_t time_key(double t) {
  // +0.0 and -0.0 map to the same stream.
  return t == 0.0 ? 0 : std::bit_cast<uint64_t>(t);
}

}  // namespace tgrec
