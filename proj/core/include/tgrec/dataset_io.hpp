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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tgrec/ctbg.hpp"
#include "tgrec/time_encoding.hpp"

namespace tgrec {

/// Raw identifier <-> dense index, assigned in order of first appearance.
class IdMap {
 public:
  int32_t add_user(const std::string& raw);
  int32_t add_item(const std::string& raw);
  /// -1 when unknown.
  int32_t find_user(const std::string& raw) const;
  int32_t find_item(const std::string& raw) const;

  const std::vector<std::string>& users() const { return users_; }
  const std::vector<std::string>& items() const { return items_; }
  int32_t num_users() const { return static_cast<int32_t>(users_.size()); }
  int32_t num_items() const { return static_cast<int32_t>(items_.size()); }

  bool operator==(const IdMap& other) const {
    return users_ == other.users_ && items_ == other.items_;
  }

 private:
  std::vector<std::string> users_;
  std::vector<std::string> items_;
  std::unordered_map<std::string, int32_t> user_index_;
  std::unordered_map<std::string, int32_t> item_index_;
};

struct IngestOptions {
  char delimiter = '\t';
  int user_column = 0;
  int item_column = 1;
  int timestamp_column = 2;
  bool normalize_time = true;
  bool operator==(const IngestOptions&) const = default;
};

/// Interactions with dense ids; timestamps already mapped through `scale`.
struct Dataset {
  std::vector<Interaction> interactions;
  IdMap ids;
  TimeScale scale;
  size_t lines_read = 0;
};

/// Malformed input, reported with the 1-based line number.
class IngestError : public std::runtime_error {
 public:
  IngestError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

/// Parses delimiter-separated (user, item, timestamp) lines. Lines starting
/// with '#' and blank lines are skipped. With a space delimiter, runs of
/// blanks count as one separator.
Dataset ingest(std::istream& in, const IngestOptions& options = {});
Dataset ingest(const std::filesystem::path& path, const IngestOptions& options = {});

/// Rows "user|item <TAB> index <TAB> raw id".
void write_id_map(std::ostream& out, const IdMap& ids);
IdMap read_id_map(std::istream& in);

/// Writes interactions back in raw form (raw ids, timestamps in seconds).
void write_interactions(std::ostream& out, std::span<const Interaction> interactions,
                        const IdMap& ids, const TimeScale& scale, char delimiter = '\t');

/// "tab", "comma", "space", "semicolon" or a single character.
char parse_delimiter(std::string_view text);
std::string delimiter_name(char delimiter);

}  // namespace tgrec
