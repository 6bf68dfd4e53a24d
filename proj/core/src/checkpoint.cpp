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

#include "tgrec/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "tgrec/run_config.hpp"

namespace tgrec {

namespace {

constexpr std::array<char, 8> kMagic = {'T', 'G', 'R', 'C', 'K', 'P', 'T', '\0'};
constexpr uint64_t kMaxBlock = uint64_t{1} << 34;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T v) {
    const T le = to_little(v);
    out_.write(reinterpret_cast<const char*>(&le), sizeof(T));
  }
  void put_string(const std::string& s) {
    put<uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T get(const char* what) {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw CheckpointError(std::string("truncated checkpoint reading ") + what);
    return to_little(v);
  }
  uint64_t get_count(const char* what) {
    const auto n = get<uint64_t>(what);
    if (n > kMaxBlock) throw CheckpointError(std::string("implausible size for ") + what);
    return n;
  }
  std::string get_string(const char* what) {
    std::string s(get_count(what), '\0');
    in_.read(s.data(), static_cast<std::streamsize>(s.size()));
    if (!in_) throw CheckpointError(std::string("truncated checkpoint reading ") + what);
    return s;
  }

 private:
  std::istream& in_;
};

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.put<uint32_t>(kCheckpointVersion);
  w.put_string(model_config_text(ckpt.params.config));
  w.put<int32_t>(ckpt.params.num_users);
  w.put<int32_t>(ckpt.params.num_items);
  w.put<double>(ckpt.scale.origin);
  w.put<double>(ckpt.scale.span);
  w.put<uint64_t>(ckpt.ids.users().size());
  for (const auto& s : ckpt.ids.users()) w.put_string(s);
  w.put<uint64_t>(ckpt.ids.items().size());
  for (const auto& s : ckpt.ids.items()) w.put_string(s);
  const auto tensors = param_tensors(ckpt.params);
  w.put<uint64_t>(tensors.size());
  for (const auto& t : tensors) {
    w.put_string(t.name);
    w.put<uint64_t>(t.values.size());
    for (double v : t.values) w.put<double>(v);
  }
  if (!out) throw CheckpointError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw CheckpointError("not a checkpoint file (bad magic)");
  Reader r(in);
  const auto version = r.get<uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig config;
  try {
    config = parse_model_config_text(r.get_string("model config"));
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("bad model config block: ") + e.what());
  }
  const auto num_users = r.get<int32_t>("user count");
  const auto num_items = r.get<int32_t>("item count");
  Checkpoint ckpt;
  ckpt.scale.origin = r.get<double>("time origin");
  ckpt.scale.span = r.get<double>("time span");
  const auto n_users = r.get_count("id map");
  for (uint64_t k = 0; k < n_users; ++k) ckpt.ids.add_user(r.get_string("user id"));
  const auto n_items = r.get_count("id map");
  for (uint64_t k = 0; k < n_items; ++k) ckpt.ids.add_item(r.get_string("item id"));
  if ((n_users != 0 && static_cast<int64_t>(ckpt.ids.num_users()) != num_users) ||
      (n_items != 0 && static_cast<int64_t>(ckpt.ids.num_items()) != num_items)) {
    throw CheckpointError("id map does not match the parameter shapes");
  }
  try {
    ckpt.params = init_params(config, num_users, num_items, 0);
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("bad shapes: ") + e.what());
  }
  auto tensors = param_tensors(ckpt.params);
  const auto count = r.get_count("tensor count");
  if (count != tensors.size()) {
    throw CheckpointError("expected " + std::to_string(tensors.size()) + " tensors, found " +
                          std::to_string(count));
  }
  for (auto& t : tensors) {
    const auto name = r.get_string("tensor name");
    if (name != t.name) throw CheckpointError("expected tensor '" + t.name + "', found '" + name + "'");
    const auto size = r.get_count("tensor size");
    if (size != t.values.size()) {
      throw CheckpointError("tensor '" + name + "' has " + std::to_string(size) + " values, expected " +
                            std::to_string(t.values.size()));
    }
    for (double& v : t.values) v = r.get<double>("tensor values");
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, checkpoint);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint '" + path.string() + "' not found");
  return read_checkpoint(in);
}

}  // namespace tgrec
