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

#include "tgrec/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace tgrec {

int32_t IdMap::add_user(const std::string& raw) {
  auto [it, inserted] = user_index_.try_emplace(raw, static_cast<int32_t>(users_.size()));
  if (inserted) users_.push_back(raw);
  return it->second;
}

int32_t IdMap::add_item(const std::string& raw) {
  auto [it, inserted] = item_index_.try_emplace(raw, static_cast<int32_t>(items_.size()));
  if (inserted) items_.push_back(raw);
  return it->second;
}

int32_t IdMap::find_user(const std::string& raw) const {
  auto it = user_index_.find(raw);
  return it == user_index_.end() ? -1 : it->second;
}

int32_t IdMap::find_item(const std::string& raw) const {
  auto it = item_index_.find(raw);
  return it == item_index_.end() ? -1 : it->second;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter == ' ') {
    size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return fields;
  }
  size_t start = 0;
  while (true) {
    const size_t end = line.find(delimiter, start);
    fields.push_back(line.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Dataset ingest(std::istream& in, const IngestOptions& options) {
  const int needed =
      std::max({options.user_column, options.item_column, options.timestamp_column}) + 1;
  Dataset ds;
  std::vector<double> raw_times;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split(view, options.delimiter);
    if (static_cast<int>(fields.size()) < needed) {
      throw IngestError(line_no, "expected at least " + std::to_string(needed) + " columns, found " +
                                     std::to_string(fields.size()));
    }
    const auto user = trim(fields[static_cast<size_t>(options.user_column)]);
    const auto item = trim(fields[static_cast<size_t>(options.item_column)]);
    const auto ts = trim(fields[static_cast<size_t>(options.timestamp_column)]);
    if (user.empty() || item.empty()) {
      throw IngestError(line_no, "empty user or item id");
    }
    double t = 0.0;
    const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), t);
    if (ec != std::errc() || ptr != ts.data() + ts.size() || !std::isfinite(t)) {
      throw IngestError(line_no, "non-numeric timestamp '" + std::string(ts) + "'");
    }
    if (t < 0.0) {
      throw IngestError(line_no, "negative timestamp");
    }
    Interaction e;
    e.user = ds.ids.add_user(std::string(user));
    e.item = ds.ids.add_item(std::string(item));
    e.timestamp = t;
    ds.interactions.push_back(e);
    raw_times.push_back(t);
  }
  ds.lines_read = line_no;
  if (ds.interactions.empty()) {
    throw IngestError(line_no, "no interactions found");
  }
  if (options.normalize_time) {
    const auto [lo, hi] = std::minmax_element(raw_times.begin(), raw_times.end());
    ds.scale = TimeScale::from_range(*lo, *hi);
    for (auto& e : ds.interactions) e.timestamp = ds.scale.normalize(e.timestamp);
  }
  return ds;
}

Dataset ingest(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open data file '" + path.string() + "'");
  }
  return ingest(in, options);
}

void write_id_map(std::ostream& out, const IdMap& ids) {
  for (size_t k = 0; k < ids.users().size(); ++k) out << "user\t" << k << '\t' << ids.users()[k] << '\n';
  for (size_t k = 0; k < ids.items().size(); ++k) out << "item\t" << k << '\t' << ids.items()[k] << '\n';
}

IdMap read_id_map(std::istream& in) {
  IdMap ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw IngestError(line_no, "id map rows need 3 columns");
    const std::string raw(trim(fields[2]));
    int32_t got = -1;
    int32_t want = -1;
    std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), want);
    if (fields[0] == "user") {
      got = ids.add_user(raw);
    } else if (fields[0] == "item") {
      got = ids.add_item(raw);
    } else {
      throw IngestError(line_no, "unknown id kind '" + std::string(fields[0]) + "'");
    }
    if (got != want) throw IngestError(line_no, "id map indices must be dense and in order");
  }
  return ids;
}

void write_interactions(std::ostream& out, std::span<const Interaction> interactions,
                        const IdMap& ids, const TimeScale& scale, char delimiter) {
  char buf[64];
  for (const auto& e : interactions) {
    std::snprintf(buf, sizeof(buf), "%.17g", scale.to_seconds(e.timestamp));
    out << ids.users().at(static_cast<size_t>(e.user)) << delimiter
        << ids.items().at(static_cast<size_t>(e.item)) << delimiter << buf << '\n';
  }
}

char parse_delimiter(std::string_view text) {
  if (text == "tab" || text == "\\t") return '\t';
  if (text == "comma") return ',';
  if (text == "space") return ' ';
  if (text == "semicolon") return ';';
  if (text.size() == 1) return text.front();
  throw std::invalid_argument("unknown delimiter '" + std::string(text) + "'");
}

std::string delimiter_name(char delimiter) {
  switch (delimiter) {
    case '\t':
      return "tab";
    case ',':
      return "comma";
    case ' ':
      return "space";
    case ';':
      return "semicolon";
    default:
      return std::string(1, delimiter);
  }
}

}  // namespace tgrec
