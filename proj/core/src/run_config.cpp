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

#include "tgrec/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tgrec {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw std::invalid_argument("config key '" + std::string(key) + "': expected " + expected +
                              ", got '" + std::string(value) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, const char* expected) {
  value = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value, expected);
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) {
  return parse_number<int>(key, value, "an integer");
}

uint64_t parse_u64(std::string_view key, std::string_view value) {
  return parse_number<uint64_t>(key, value, "a non-negative integer");
}

double parse_double(std::string_view key, std::string_view value) {
  const double v = parse_number<double>(key, value, "a number");
  if (!std::isfinite(v)) bad_value(key, value, "a finite number");
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= value.size()) {
    const size_t end = value.find(',', start);
    const auto item = trim(value.substr(start, end == std::string_view::npos ? end : end - start));
    if (!item.empty()) out.emplace_back(item);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

template <typename F>
auto wrap(std::string_view key, std::string_view value, F&& parse) {
  try {
    return parse(trim(value));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config key '" + std::string(key) + "': " + e.what());
  }
}

bool apply_model_setting(ModelConfig& m, std::string_view name, std::string_view key,
                         std::string_view value) {
  if (name == "dim") {
    m.dim = parse_int(key, value);
  } else if (name == "time_dim") {
    m.time_dim = parse_int(key, value);
  } else if (name == "layers") {
    m.layers = parse_int(key, value);
  } else if (name == "neighbors") {
    m.neighbors = parse_int(key, value);
  } else if (name == "heads") {
    m.heads = parse_int(key, value);
  } else if (name == "ffn_dim") {
    m.ffn_dim = parse_int(key, value);
  } else if (name == "max_positions") {
    m.max_positions = parse_int(key, value);
  } else if (name == "aggregator") {
    m.aggregator = wrap(key, value, [](std::string_view v) { return parse_aggregator(v); });
  } else if (name == "time_mode") {
    m.time_mode = wrap(key, value, [](std::string_view v) { return parse_time_mode(v); });
  } else if (name == "time_max_frequency") {
    m.time_max_frequency = parse_double(key, value);
  } else if (name == "query_time") {
    m.query_time = parse_bool(key, value);
  } else if (name == "neighbor_time") {
    m.neighbor_time = parse_bool(key, value);
  } else {
    return false;
  }
  return true;
}

void write_model_keys(std::ostream& os, const ModelConfig& m) {
  os << "dim = " << m.dim << "\n";
  os << "time_dim = " << m.time_dim << "\n";
  os << "layers = " << m.layers << "\n";
  os << "neighbors = " << m.neighbors << "\n";
  os << "heads = " << m.heads << "\n";
  os << "ffn_dim = " << m.ffn_dim << "\n";
  os << "max_positions = " << m.max_positions << "\n";
  os << "aggregator = " << to_string(m.aggregator) << "\n";
  os << "time_mode = " << to_string(m.time_mode) << "\n";
  os << "time_max_frequency = " << fmt_double(m.time_max_frequency) << "\n";
  os << "query_time = " << fmt_bool(m.query_time) << "\n";
  os << "neighbor_time = " << fmt_bool(m.neighbor_time) << "\n";
}

RunConfig from_ptree(const boost::property_tree::ptree& tree) {
  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw std::invalid_argument("config key '" + section + "' is outside any section");
    }
    for (const auto& [key, leaf] : body) {
      const std::string value = leaf.get_value<std::string>();
      if (section == "sweep") {
        SweepAxis axis{key, split_list(value)};
        if (axis.values.empty()) {
          throw std::invalid_argument("sweep axis '" + key + "' has no values");
        }
        config.sweep.push_back(std::move(axis));
      } else {
        apply_setting(config, section + "." + key, value);
      }
    }
  }
  config.sync();
  return config;
}

}  // namespace

void parse_eval_mode(std::string_view text, EvalConfig& eval) {
  text = trim(text);
  if (text == "full") {
    eval.mode = CandidateMode::kFull;
    return;
  }
  constexpr std::string_view prefix = "sampled:";
  if (text.substr(0, prefix.size()) == prefix) {
    const int k = parse_int("eval.mode", text.substr(prefix.size()));
    if (k < 1) bad_value("eval.mode", text, "sampled:K with K >= 1");
    eval.mode = CandidateMode::kSampled;
    eval.sample_size = k;
    return;
  }
  bad_value("eval.mode", text, "'full' or 'sampled:K'");
}

std::string eval_mode_text(const EvalConfig& eval) {
  return eval.mode == CandidateMode::kFull ? std::string("full")
                                           : "sampled:" + std::to_string(eval.sample_size);
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  const size_t dot = key.find('.');
  if (dot == std::string_view::npos) {
    throw std::invalid_argument("config key '" + std::string(key) + "' needs a section prefix");
  }
  const std::string_view section = key.substr(0, dot);
  const std::string_view name = key.substr(dot + 1);
  bool known = true;
  if (section == "data") {
    if (name == "path") {
      c.data_path = std::string(trim(value));
    } else if (name == "delimiter") {
      c.ingest.delimiter = wrap(key, value, [](std::string_view v) { return parse_delimiter(v); });
    } else if (name == "user_column") {
      c.ingest.user_column = parse_int(key, value);
    } else if (name == "item_column") {
      c.ingest.item_column = parse_int(key, value);
    } else if (name == "timestamp_column") {
      c.ingest.timestamp_column = parse_int(key, value);
    } else {
      known = false;
    }
  } else if (section == "split") {
    if (name == "train") {
      c.split.train = parse_double(key, value);
    } else if (name == "valid") {
      c.split.valid = parse_double(key, value);
    } else if (name == "test") {
      c.split.test = parse_double(key, value);
    } else {
      known = false;
    }
  } else if (section == "model") {
    known = apply_model_setting(c.model, name, key, value);
  } else if (section == "train") {
    if (name == "loss") {
      c.train.loss = wrap(key, value, [](std::string_view v) { return parse_loss(v); });
    } else if (name == "learning_rate") {
      c.train.learning_rate = parse_double(key, value);
    } else if (name == "l2") {
      c.train.l2 = parse_double(key, value);
    } else if (name == "batch_size") {
      c.train.batch_size = parse_int(key, value);
    } else if (name == "epochs") {
      c.train.epochs = parse_int(key, value);
    } else if (name == "beta1") {
      c.train.beta1 = parse_double(key, value);
    } else if (name == "beta2") {
      c.train.beta2 = parse_double(key, value);
    } else if (name == "epsilon") {
      c.train.epsilon = parse_double(key, value);
    } else if (name == "resample_per_epoch") {
      c.train.resample_per_epoch = parse_bool(key, value);
    } else if (name == "validate_every") {
      c.validate_every = parse_int(key, value);
    } else {
      known = false;
    }
  } else if (section == "eval") {
    if (name == "mode") {
      parse_eval_mode(value, c.eval);
    } else if (name == "cutoffs") {
      std::vector<int> cutoffs;
      for (const auto& item : split_list(value)) cutoffs.push_back(parse_int(key, item));
      if (cutoffs.empty()) bad_value(key, value, "a comma-separated list of cutoffs");
      c.eval.cutoffs = cutoffs;
    } else {
      known = false;
    }
  } else if (section == "seeds") {
    if (name == "init") {
      c.seeds.init = parse_u64(key, value);
    } else if (name == "sampler") {
      c.seeds.sampler = parse_u64(key, value);
    } else if (name == "negatives") {
      c.seeds.negatives = parse_u64(key, value);
    } else {
      known = false;
    }
  } else if (section == "output") {
    if (name == "dir") {
      c.output_dir = std::string(trim(value));
    } else if (name == "checkpoint") {
      c.checkpoint_path = std::string(trim(value));
    } else if (name == "run_id") {
      c.run_id = std::string(trim(value));
    } else {
      known = false;
    }
  } else if (section == "run") {
    if (name == "workers") {
      c.workers = parse_int(key, value);
    } else {
      known = false;
    }
  } else {
    known = false;
  }
  if (!known) {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
  c.sync();
}

void RunConfig::sync() {
  model.sampler_seed = seeds.sampler;
  train.negative_seed = seeds.negatives;
  eval.seed = seeds.negatives;
  const int w = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  train.workers = w;
  eval.workers = w;
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  if (workers < 0) throw std::invalid_argument("run.workers must be >= 0");
  if (validate_every < 0) throw std::invalid_argument("train.validate_every must be >= 0");
  if (split.train <= 0.0 || split.valid < 0.0 || split.test <= 0.0 ||
      std::abs(split.train + split.valid + split.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must be positive and sum to 1");
  }
  for (int n : eval.cutoffs) {
    if (n < 1) throw std::invalid_argument("eval.cutoffs must be positive");
  }
  if (ingest.user_column < 0 || ingest.item_column < 0 || ingest.timestamp_column < 0 ||
      ingest.user_column == ingest.item_column || ingest.user_column == ingest.timestamp_column ||
      ingest.item_column == ingest.timestamp_column) {
    throw std::invalid_argument("data columns must be distinct and non-negative");
  }
}

std::string RunConfig::resolved_run_id() const {
  if (!run_id.empty()) return run_id;
  // Worker count and output locations do not change results.
  RunConfig content = *this;
  content.workers = 0;
  content.output_dir.clear();
  content.checkpoint_path.clear();
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%012llx",
                static_cast<unsigned long long>(fnv1a(serialize(content)) & 0xffffffffffffULL));
  return buf;
}

std::filesystem::path RunConfig::resolved_checkpoint() const {
  return checkpoint_path.empty() ? run_dir() / "model.ckpt" : checkpoint_path;
}

RunConfig parse_run_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  return from_ptree(tree);
}

RunConfig parse_run_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path.string() + "'");
  }
  return parse_run_config(in);
}

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  os << "[data]\n";
  if (!c.data_path.empty()) os << "path = " << c.data_path.string() << "\n";
  os << "delimiter = " << delimiter_name(c.ingest.delimiter) << "\n";
  os << "user_column = " << c.ingest.user_column << "\n";
  os << "item_column = " << c.ingest.item_column << "\n";
  os << "timestamp_column = " << c.ingest.timestamp_column << "\n";
  os << "\n[split]\n";
  os << "train = " << fmt_double(c.split.train) << "\n";
  os << "valid = " << fmt_double(c.split.valid) << "\n";
  os << "test = " << fmt_double(c.split.test) << "\n";
  os << "\n[model]\n";
  write_model_keys(os, c.model);
  os << "\n[train]\n";
  os << "loss = " << to_string(c.train.loss) << "\n";
  os << "learning_rate = " << fmt_double(c.train.learning_rate) << "\n";
  os << "l2 = " << fmt_double(c.train.l2) << "\n";
  os << "batch_size = " << c.train.batch_size << "\n";
  os << "epochs = " << c.train.epochs << "\n";
  os << "beta1 = " << fmt_double(c.train.beta1) << "\n";
  os << "beta2 = " << fmt_double(c.train.beta2) << "\n";
  os << "epsilon = " << fmt_double(c.train.epsilon) << "\n";
  os << "resample_per_epoch = " << fmt_bool(c.train.resample_per_epoch) << "\n";
  os << "validate_every = " << c.validate_every << "\n";
  os << "\n[eval]\n";
  os << "mode = " << eval_mode_text(c.eval) << "\n";
  os << "cutoffs = ";
  for (size_t k = 0; k < c.eval.cutoffs.size(); ++k) os << (k ? "," : "") << c.eval.cutoffs[k];
  os << "\n\n[seeds]\n";
  os << "init = " << c.seeds.init << "\n";
  os << "sampler = " << c.seeds.sampler << "\n";
  os << "negatives = " << c.seeds.negatives << "\n";
  os << "\n[output]\n";
  os << "dir = " << c.output_dir.string() << "\n";
  if (!c.checkpoint_path.empty()) os << "checkpoint = " << c.checkpoint_path.string() << "\n";
  if (!c.run_id.empty()) os << "run_id = " << c.run_id << "\n";
  os << "\n[run]\n";
  os << "workers = " << c.workers << "\n";
  if (!c.sweep.empty()) {
    os << "\n[sweep]\n";
    for (const auto& axis : c.sweep) {
      os << axis.key << " = ";
      for (size_t k = 0; k < axis.values.size(); ++k) os << (k ? "," : "") << axis.values[k];
      os << "\n";
    }
  }
  return os.str();
}

std::vector<RunConfig> expand_sweep(const RunConfig& base) {
  RunConfig plain = base;
  plain.sweep.clear();
  if (base.sweep.empty()) return {plain};
  const std::string prefix = base.resolved_run_id();
  size_t total = 1;
  for (const auto& axis : base.sweep) total *= axis.values.size();
  std::vector<RunConfig> out;
  out.reserve(total);
  std::vector<size_t> index(base.sweep.size(), 0);
  for (size_t point = 0; point < total; ++point) {
    RunConfig c = plain;
    for (size_t a = 0; a < base.sweep.size(); ++a) {
      apply_setting(c, base.sweep[a].key, base.sweep[a].values[index[a]]);
    }
    c.run_id = prefix + "-" + std::to_string(point);
    out.push_back(std::move(c));
    for (size_t a = base.sweep.size(); a-- > 0;) {
      if (++index[a] < base.sweep[a].values.size()) break;
      index[a] = 0;
    }
  }
  return out;
}

std::string model_config_text(const ModelConfig& config) {
  std::ostringstream os;
  write_model_keys(os, config);
  os << "time_span_seconds = " << fmt_double(config.time_span_seconds) << "\n";
  os << "sampler_seed = " << config.sampler_seed << "\n";
  return os.str();
}

ModelConfig parse_model_config_text(const std::string& text) {
  ModelConfig m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto view = trim(line);
    if (view.empty()) continue;
    const size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("model config line without '=': " + std::string(view));
    }
    const auto name = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    const std::string key = "model." + std::string(name);
    if (name == "time_span_seconds") {
      m.time_span_seconds = parse_double(key, value);
    } else if (name == "sampler_seed") {
      m.sampler_seed = parse_u64(key, value);
    } else if (!apply_model_setting(m, name, key, value)) {
      throw std::invalid_argument("unknown model key '" + std::string(name) + "'");
    }
  }
  return m;
}

uint64_t fnv1a(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace tgrec
