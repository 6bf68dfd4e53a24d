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

#include "tgrec/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "tgrec/model.hpp"

namespace tgrec::cli {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void require_file(const fs::path& path, const std::string& what) {
  if (path.empty()) throw std::runtime_error(what + " path is not set");
  if (!fs::is_regular_file(path)) {
    throw std::runtime_error(what + " '" + path.string() + "' not found");
  }
}

void require_data(const RunConfig& config) { require_file(config.data_path, "data file"); }

Checkpoint open_checkpoint(const RunConfig& config) {
  const auto path = config.resolved_checkpoint();
  require_file(path, "checkpoint");
  return load_checkpoint(path);
}

std::string id_map_text(const IdMap& ids) {
  std::ostringstream os;
  write_id_map(os, ids);
  return os.str();
}

const char* split_name(EvalSplit s) { return s == EvalSplit::kValid ? "valid" : "test"; }

}  // namespace

Dataset load_for_checkpoint(const RunConfig& config, const Checkpoint& checkpoint) {
  require_data(config);
  IngestOptions options = config.ingest;
  options.normalize_time = false;
  const Dataset raw = ingest(config.data_path, options);
  Dataset ds;
  ds.ids = checkpoint.ids;
  ds.scale = checkpoint.scale;
  ds.lines_read = raw.lines_read;
  ds.interactions.reserve(raw.interactions.size());
  for (const auto& e : raw.interactions) {
    const auto& user = raw.ids.users()[static_cast<size_t>(e.user)];
    const auto& item = raw.ids.items()[static_cast<size_t>(e.item)];
    const int32_t u = checkpoint.ids.find_user(user);
    const int32_t i = checkpoint.ids.find_item(item);
    if (u < 0) throw std::runtime_error("user '" + user + "' is not in the checkpoint");
    if (i < 0) throw std::runtime_error("item '" + item + "' is not in the checkpoint");
    ds.interactions.push_back({u, i, checkpoint.scale.normalize(e.timestamp)});
  }
  return ds;
}

Dataset cmd_ingest(const RunConfig& config, std::ostream& out) {
  require_data(config);
  Dataset ds = ingest(config.data_path, config.ingest);
  const auto dir = config.run_dir();
  write_text(dir / "id_map.tsv", id_map_text(ds.ids));
  std::ostringstream summary;
  summary << "users\titems\tinteractions\ttime_origin\ttime_span\n"
          << ds.ids.num_users() << '\t' << ds.ids.num_items() << '\t' << ds.interactions.size() << '\t'
          << g17(ds.scale.origin) << '\t' << g17(ds.scale.span) << '\n';
  write_text(dir / "dataset.tsv", summary.str());
  out << "users " << ds.ids.num_users() << "  items " << ds.ids.num_items() << "  interactions "
      << ds.interactions.size() << "\n"
      << "wrote " << (dir / "id_map.tsv").string() << "\n";
  return ds;
}

TrainOutcome cmd_train(const RunConfig& config, std::ostream& out) {
  require_data(config);
  const Dataset ds = ingest(config.data_path, config.ingest);
  const auto split = chronological_split(ds.interactions, config.split);
  if (split.train.empty()) throw std::runtime_error("train split is empty");
  const int32_t nu = ds.ids.num_users();
  const int32_t ni = ds.ids.num_items();
  const Ctbg train_graph = build_graph(split.train, nu, ni);

  ModelConfig model = config.model;
  model.time_span_seconds = ds.scale.span;
  model.validate();
  Checkpoint ckpt{init_params(model, nu, ni, config.seeds.init), ds.ids, ds.scale};

  TrainOutcome outcome;
  outcome.run_dir = config.run_dir();
  outcome.checkpoint = config.resolved_checkpoint();
  fs::create_directories(outcome.run_dir);
  write_text(outcome.run_dir / "config.ini", serialize(config));
  write_text(outcome.run_dir / "id_map.tsv", id_map_text(ds.ids));

  out << "train " << split.train.size() << " interactions, " << nu << " users, " << ni
      << " items\n";
  // Validation reads edges strictly before each validation timestamp, so a
  // graph over train + valid exposes exactly the permitted history.
  std::vector<Interaction> seen = split.train;
  seen.insert(seen.end(), split.valid.begin(), split.valid.end());
  const Ctbg valid_graph = build_graph(seen, nu, ni);
  const int cutoff = config.eval.cutoffs.empty() ? 10 : config.eval.cutoffs.front();
  EvalConfig valid_eval = config.eval;
  if (std::find(valid_eval.cutoffs.begin(), valid_eval.cutoffs.end(), cutoff) == valid_eval.cutoffs.end()) {
    valid_eval.cutoffs.push_back(cutoff);
  }

  FitCallbacks callbacks;
  if (config.validate_every > 0 && !split.valid.empty()) {
    callbacks.validate = [&](int epoch, const ModelParams& p) -> std::optional<MetricsReport> {
      if (epoch % config.validate_every != 0) return std::nullopt;
      const ModelScorer scorer(p, valid_graph);
      return evaluate(scorer, valid_graph, split.valid, valid_eval);
    };
  }
  callbacks.on_epoch = [&](const EpochLog& log) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "epoch %3d  loss %.6f", log.epoch, log.mean_loss);
    out << buf;
    if (log.valid) {
      std::snprintf(buf, sizeof(buf), "  valid recall@%d %.4f  ndcg@%d %.4f  mrr %.4f", cutoff,
                    log.valid->recall_at.at(cutoff), cutoff, log.valid->ndcg_at.at(cutoff),
                    log.valid->mrr);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), "  (%.1fs)\n", log.wall_seconds);
    out << buf << std::flush;
  };
  outcome.log = fit(ckpt.params, train_graph, split.train, config.train, callbacks).log;

  std::ostringstream log;
  log << "epoch\tmean_loss\tskipped\tvalid_recall@" << cutoff << "\tvalid_ndcg@" << cutoff
      << "\tvalid_mrr\twall_seconds\n";
  for (const auto& e : outcome.log) {
    log << e.epoch << '\t' << g17(e.mean_loss) << '\t' << e.skipped;
    if (e.valid) {
      log << '\t' << g17(e.valid->recall_at.at(cutoff)) << '\t' << g17(e.valid->ndcg_at.at(cutoff))
          << '\t' << g17(e.valid->mrr);
    } else {
      log << "\t-\t-\t-";
    }
    log << '\t' << g17(e.wall_seconds) << '\n';
  }
  write_text(outcome.run_dir / "train_log.tsv", log.str());
  if (outcome.checkpoint.has_parent_path()) fs::create_directories(outcome.checkpoint.parent_path());
  save_checkpoint(outcome.checkpoint, ckpt);
  out << "wrote " << outcome.checkpoint.string() << "\n";
  return outcome;
}

EvalOutcome cmd_eval(const RunConfig& config, const EvalOptions& options, std::ostream& out) {
  require_data(config);
  Checkpoint ckpt = open_checkpoint(config);
  ckpt.params.config.sampler_seed = config.seeds.sampler;
  const Dataset ds = load_for_checkpoint(config, ckpt);
  const auto split = chronological_split(ds.interactions, config.split);
  const auto& target = options.split == EvalSplit::kValid ? split.valid : split.test;
  if (target.empty()) {
    throw std::runtime_error(std::string(split_name(options.split)) + " split is empty");
  }
  const Ctbg graph = build_graph(ds.interactions, ds.ids.num_users(), ds.ids.num_items());

  EvalOutcome outcome;
  const ModelScorer scorer(ckpt.params, graph);
  outcome.model = evaluate(scorer, graph, target, config.eval);
  if (options.with_popularity) {
    const PopularityScorer pop(split.train, ds.ids.num_items());
    outcome.popularity = evaluate(pop, graph, target, config.eval);
  }

  std::ostringstream tsv;
  tsv << "split\tscorer\t" << outcome.model.tsv_header() << '\n';
  tsv << split_name(options.split) << "\tmodel\t" << outcome.model.tsv_row() << '\n';
  if (outcome.popularity) {
    tsv << split_name(options.split) << "\tpopularity\t" << outcome.popularity->tsv_row() << '\n';
  }
  const auto dir = config.run_dir();
  write_text(dir / "metrics.tsv", tsv.str());
  if (options.top > 0) {
    std::ostringstream ranks;
    ranks << "user\ttimestamp\trank\titem\tscore\tis_truth\n";
    for (const auto& e : target) {
      const auto candidates = candidate_set(graph, e.user, e.timestamp, e.item, config.eval);
      const auto ranked = rank(ckpt.params, graph, e.user, e.timestamp, candidates);
      const auto& user = ds.ids.users()[static_cast<size_t>(e.user)];
      const auto when = g17(ds.scale.to_seconds(e.timestamp));
      const size_t k = std::min(ranked.size(), static_cast<size_t>(options.top));
      for (size_t r = 0; r < k; ++r) {
        ranks << user << '\t' << when << '\t' << (r + 1) << '\t'
              << ds.ids.items()[static_cast<size_t>(ranked[r].item)] << '\t' << g17(ranked[r].score)
              << '\t' << (ranked[r].item == e.item ? 1 : 0) << '\n';
      }
    }
    write_text(dir / "ranks.tsv", ranks.str());
  }
  out << split_name(options.split) << " split, " << eval_mode_text(config.eval)
      << " ranking\n"
      << outcome.model.table();
  if (outcome.popularity) out << "popularity baseline\n" << outcome.popularity->table();
  out << "wrote " << (dir / "metrics.tsv").string() << "\n";
  return outcome;
}

std::vector<KernelProbe> cmd_probe_time(const RunConfig& config,
                                        const std::vector<std::pair<double, double>>& pairs,
                                        const std::optional<std::vector<double>>& omega,
                                        std::ostream& out) {
  if (pairs.empty()) throw std::runtime_error("no time pairs to probe");
  TimeEncoder encoder;
  TimeScale scale;  // identity unless a checkpoint supplies one
  if (omega) {
    if (omega->empty()) throw std::runtime_error("--omega needs at least one frequency");
    encoder = TimeEncoder(Eigen::Map<const Eigen::VectorXd>(omega->data(),
                                                            static_cast<Eigen::Index>(omega->size())));
  } else {
    Checkpoint ckpt = open_checkpoint(config);
    encoder = std::move(ckpt.params.time);
    scale = ckpt.scale;
  }
  std::vector<KernelProbe> probes;
  std::ostringstream tsv;
  tsv << "t1\tt2\tlag\tkernel\n";
  for (const auto& [t1, t2] : pairs) {
    const double v = encoder.kernel(scale.normalize(t1), scale.normalize(t2));
    probes.push_back({t1, t2, v});
    tsv << g17(t1) << '\t' << g17(t2) << '\t' << g17(t1 - t2) << '\t' << g17(v) << '\n';
  }
  const auto path = config.run_dir() / "kernel.tsv";
  write_text(path, tsv.str());
  out << tsv.str() << "wrote " << path.string() << "\n";
  return probes;
}

std::vector<AttentionRow> cmd_export_attention(const RunConfig& config, const std::string& user,
                                               const std::vector<std::string>& offsets,
                                               std::optional<double> base_seconds,
                                               std::ostream& out) {
  require_data(config);
  Checkpoint ckpt = open_checkpoint(config);
  ckpt.params.config.sampler_seed = config.seeds.sampler;
  if (ckpt.params.config.layers < 1) throw std::runtime_error("model has no layers to inspect");
  const Dataset ds = load_for_checkpoint(config, ckpt);
  const int32_t u = ds.ids.find_user(user);
  if (u < 0) throw std::runtime_error("unknown user '" + user + "'");
  const Ctbg graph = build_graph(ds.interactions, ds.ids.num_users(), ds.ids.num_items());
  double base = 0.0;
  if (base_seconds) {
    base = *base_seconds;
  } else {
    const auto history = graph.adjacency(NodeRef::user(u));
    if (history.empty()) throw std::runtime_error("user '" + user + "' has no interactions");
    base = ckpt.scale.to_seconds(history.back().timestamp);
  }

  std::vector<AttentionRow> rows;
  for (const auto& label : offsets) {
    const double offset = parse_duration(label);
    const double query = base + offset;
    const auto record = attention_at(ckpt.params, graph, NodeRef::user(u), ckpt.scale.normalize(query));
    if (record.weights.empty() && !record.neighbors.empty()) {
      throw std::runtime_error("attention export needs model.aggregator = attention or mean");
    }
    for (size_t h = 0; h < record.weights.size(); ++h) {
      for (size_t s = 0; s < record.neighbors.size(); ++s) {
        const auto& n = record.neighbors[s];
        rows.push_back({label, offset, query, static_cast<int>(h),
                        ds.ids.items()[static_cast<size_t>(n.id)],
                        ckpt.scale.to_seconds(n.timestamp), record.weights[h](static_cast<Eigen::Index>(s))});
      }
    }
  }
  std::ostringstream tsv;
  tsv << "offset\toffset_seconds\tquery_seconds\thead\titem\titem_seconds\tweight\n";
  for (const auto& r : rows) {
    tsv << r.offset << '\t' << g17(r.offset_seconds) << '\t' << g17(r.query_seconds) << '\t' << r.head << '\t' << r.item
        << '\t' << g17(r.neighbor_seconds) << '\t' << g17(r.weight) << '\n';
  }
  const auto path = config.run_dir() / "attention.tsv";
  write_text(path, tsv.str());
  out << rows.size() << " attention weights for user '" << user << "' at " << offsets.size()
      << " offsets\nwrote " << path.string() << "\n";
  return rows;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& config, std::ostream& out) {
  if (config.sweep.empty()) throw std::runtime_error("config has no [sweep] section");
  require_data(config);
  const auto points = expand_sweep(config);
  std::vector<SweepRow> rows;
  std::ostringstream quiet;
  for (size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    cmd_train(p, quiet);
    const auto result = cmd_eval(p, {}, quiet);
    SweepRow row{p.resolved_run_id(), {}, result.model};
    // The last axis varies fastest.
    row.values.resize(config.sweep.size());
    size_t rest = k;
    for (size_t a = config.sweep.size(); a-- > 0;) {
      const auto& values = config.sweep[a].values;
      row.values[a] = values[rest % values.size()];
      rest /= values.size();
    }
    out << "[" << (k + 1) << "/" << points.size() << "] " << row.run_id;
    for (size_t a = 0; a < config.sweep.size(); ++a) {
      out << "  " << config.sweep[a].key << "=" << row.values[a];
    }
    char buf[48];
    const int first_cut = config.eval.cutoffs.empty() ? 0 : config.eval.cutoffs.front();
    if (first_cut > 0) {
      std::snprintf(buf, sizeof(buf), "  recall@%d %.4f", first_cut,
                    row.metrics.recall_at.at(first_cut));
      out << buf;
    }
    out << "\n" << std::flush;
    rows.push_back(std::move(row));
  }
  std::ostringstream tsv;
  tsv << "run_id";
  for (const auto& axis : config.sweep) tsv << '\t' << axis.key;
  tsv << '\t' << rows.front().metrics.tsv_header() << '\n';
  for (const auto& r : rows) {
    tsv << r.run_id;
    for (const auto& v : r.values) tsv << '\t' << v;
    tsv << '\t' << r.metrics.tsv_row() << '\n';
  }
  const auto path = config.run_dir() / "sweep.tsv";
  write_text(path, tsv.str());
  out << "wrote " << path.string() << "\n";
  return rows;
}

size_t cmd_generate_synthetic(const SyntheticConfig& config, const fs::path& path,
                              std::ostream& out) {
  const auto data = generate_synthetic(config);
  std::ostringstream text;
  for (const auto& e : data) {
    text << 'u' << e.user << "\ti" << e.item << '\t' << g17(e.timestamp) << '\n';
  }
  write_text(path, text.str());
  out << "wrote " << data.size() << " interactions to " << path.string() << "\n";
  return data.size();
}

double parse_duration(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty duration");
  double unit = 1.0;
  switch (text.back()) {
    case 's':
      text.remove_suffix(1);
      break;
    case 'm':
      unit = 60.0;
      text.remove_suffix(1);
      break;
    case 'h':
      unit = 3600.0;
      text.remove_suffix(1);
      break;
    case 'd':
      unit = 86400.0;
      text.remove_suffix(1);
      break;
    case 'w':
      unit = 7.0 * 86400.0;
      text.remove_suffix(1);
      break;
    default:
      break;
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("bad duration '" + std::string(text) + "'");
  }
  return v * unit;
}

namespace {

struct CommonOptions {
  std::string config;
  std::string data;
  std::string checkpoint;
  std::string output;
  std::string run_id;
  std::optional<uint64_t> seed_init;
  std::optional<uint64_t> seed_sampler;
  std::optional<uint64_t> seed_negatives;
  std::optional<int> workers;
  std::string mode;
  std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "INI run configuration");
  cmd->add_option("--data", o.data, "interaction file (overrides data.path)");
  cmd->add_option("--checkpoint", o.checkpoint, "checkpoint path (default <output>/<run>/model.ckpt)");
  cmd->add_option("--output", o.output, "output directory (overrides output.dir)");
  cmd->add_option("--run-id", o.run_id, "run subdirectory name (default: config digest)");
  cmd->add_option("--seed-init", o.seed_init, "parameter initialization seed");
  cmd->add_option("--seed-sampler", o.seed_sampler, "neighbor sampling seed");
  cmd->add_option("--seed-negatives", o.seed_negatives, "negative sampling seed");
  cmd->add_option("--workers", o.workers, "worker threads (0: all cores)");
  cmd->add_option("--mode", o.mode, "candidate mode: full or sampled:K");
  cmd->add_option("--set", o.settings, "override a config key, e.g. --set model.dim=16");
}

fs::path relative_to(const fs::path& base, const fs::path& p) {
  return p.empty() || p.is_absolute() ? p : base / p;
}

RunConfig build_config(const CommonOptions& o) {
  RunConfig c;
  if (!o.config.empty()) {
    c = load_run_config(o.config);
    // Input paths inside a config file are relative to that file.
    const fs::path dir = fs::path(o.config).parent_path();
    c.data_path = relative_to(dir, c.data_path);
    c.checkpoint_path = relative_to(dir, c.checkpoint_path);
  }
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.data.empty()) c.data_path = o.data;
  if (!o.checkpoint.empty()) c.checkpoint_path = o.checkpoint;
  if (!o.output.empty()) c.output_dir = o.output;
  if (!o.run_id.empty()) c.run_id = o.run_id;
  if (o.seed_init) c.seeds.init = *o.seed_init;
  if (o.seed_sampler) c.seeds.sampler = *o.seed_sampler;
  if (o.seed_negatives) c.seeds.negatives = *o.seed_negatives;
  if (o.workers) c.workers = *o.workers;
  if (!o.mode.empty()) parse_eval_mode(o.mode, c.eval);
  c.sync();
  c.validate();
  return c;
}

std::vector<std::pair<double, double>> read_pairs(const std::vector<std::string>& inline_pairs,
                                                  const std::string& file) {
  std::vector<std::pair<double, double>> pairs;
  auto add = [&](std::string_view a, std::string_view b) {
    pairs.emplace_back(parse_duration(a), parse_duration(b));
  };
  for (const auto& p : inline_pairs) {
    const auto comma = p.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--pair expects T1,T2, got '" + p + "'");
    add(std::string_view(p).substr(0, comma), std::string_view(p).substr(comma + 1));
  }
  if (!file.empty()) {
    require_file(file, "pairs file");
    std::ifstream in(file);
    std::string a;
    std::string b;
    while (in >> a >> b) add(a, b);
  }
  return pairs;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Temporal graph sequential recommender"};
  app.name("tgrec");
  app.require_subcommand(1);
  CommonOptions common;

  auto* ingest_cmd = app.add_subcommand("ingest", "read an interaction file and record its id map");
  add_common(ingest_cmd, common);

  auto* train_cmd = app.add_subcommand("train", "train on the train split and save a checkpoint");
  add_common(train_cmd, common);

  auto* eval_cmd = app.add_subcommand("eval", "rank the test (or validation) split with a checkpoint");
  add_common(eval_cmd, common);
  std::string eval_split = "test";
  bool with_popularity = false;
  eval_cmd->add_option("--split", eval_split, "test or valid")
      ->check(CLI::IsMember({"test", "valid"}));
  eval_cmd->add_flag("--popularity", with_popularity, "also score the popularity baseline");
  int top = 0;
  eval_cmd->add_option("--top", top, "write the top-K ranked items per interaction to ranks.tsv")
      ->check(CLI::NonNegativeNumber);

  auto* probe_cmd = app.add_subcommand("probe-time", "evaluate the time kernel on pairs of times");
  add_common(probe_cmd, common);
  std::vector<std::string> pair_args;
  std::string pairs_file;
  std::vector<double> omega;
  probe_cmd->add_option("--pair", pair_args, "T1,T2 in seconds (units s/m/h/d/w allowed)");
  probe_cmd->add_option("--pairs-file", pairs_file, "whitespace-separated T1 T2 lines");
  auto* omega_opt =
      probe_cmd->add_option("--omega", omega, "frequencies to use instead of a checkpoint")
          ->delimiter(',');

  auto* attention_cmd =
      app.add_subcommand("export-attention", "dump top-layer attention for a user over time");
  add_common(attention_cmd, common);
  std::string user;
  std::vector<std::string> offsets = {"0"};
  std::string base;
  attention_cmd->add_option("--user", user, "raw user id")->required();
  attention_cmd->add_option("--offsets", offsets, "offsets from the base time, e.g. 5d,30d")
      ->delimiter(',');
  attention_cmd->add_option("--at", base, "base time in seconds (default: last interaction)");

  auto* sweep_cmd = app.add_subcommand("sweep", "train and evaluate every point of a config grid");
  add_common(sweep_cmd, common);

  auto* gen_cmd =
      app.add_subcommand("generate-synthetic", "write the planted co-purchase dataset");
  std::string gen_out;
  uint64_t gen_seed = SyntheticConfig{}.seed;
  gen_cmd->add_option("--out", gen_out, "destination file")->required();
  gen_cmd->add_option("--seed", gen_seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (gen_cmd->parsed()) {
      SyntheticConfig sc;
      sc.seed = gen_seed;
      cmd_generate_synthetic(sc, gen_out, out);
      return 0;
    }
    const RunConfig config = build_config(common);
    if (ingest_cmd->parsed()) {
      cmd_ingest(config, out);
    } else if (train_cmd->parsed()) {
      cmd_train(config, out);
    } else if (eval_cmd->parsed()) {
      EvalOptions options;
      options.split = eval_split == "valid" ? EvalSplit::kValid : EvalSplit::kTest;
      options.with_popularity = with_popularity;
      options.top = top;
      cmd_eval(config, options, out);
    } else if (probe_cmd->parsed()) {
      std::optional<std::vector<double>> w;
      if (omega_opt->count() > 0) w = omega;
      cmd_probe_time(config, read_pairs(pair_args, pairs_file), w, out);
    } else if (attention_cmd->parsed()) {
      std::optional<double> at;
      if (!base.empty()) at = parse_duration(base);
      cmd_export_attention(config, user, offsets, at, out);
    } else if (sweep_cmd->parsed()) {
      cmd_sweep(config, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace tgrec::cli
