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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

#include "tgrec/checkpoint.hpp"
#include "tgrec/cli/commands.hpp"
#include "tgrec/synthetic.hpp"

namespace tgrec::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Drops the last tab-separated column of every line (wall-clock fields).
std::string without_last_column(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) out << line.substr(0, line.rfind('\t')) << '\n';
  return out.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("tgrec_cli_" + std::to_string(::getpid()) + "_" +
           ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  int call(std::vector<std::string> args) {
    args.insert(args.begin(), "tgrec");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out.str("");
    err.str("");
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
  }

  // Small planted dataset written in raw form.
  fs::path write_toy() {
    SyntheticConfig sc;
    sc.users = 16;
    sc.cohorts = 2;
    sc.items = 24;
    sc.interactions_per_user = 12;
    sc.span_seconds = 120.0 * 86400.0;
    sc.mean_gap_seconds = 3.0 * 86400.0;
    const auto path = dir / "toy.tsv";
    std::ostringstream quiet;
    cmd_generate_synthetic(sc, path, quiet);
    return path;
  }

  std::vector<std::string> toy_settings(const fs::path& data, const std::string& run_id) {
    return {"--data",  data.string(), "--output", (dir / "runs").string(), "--run-id", run_id,
            "--set",   "model.dim=8", "--set",    "model.time_dim=8",      "--set",    "model.neighbors=5",
            "--set",   "train.epochs=2", "--set", "train.batch_size=32",   "--set",    "train.learning_rate=0.01",
            "--workers", "1"};
  }

  std::vector<std::string> with(std::string command, std::vector<std::string> rest) {
    rest.insert(rest.begin(), std::move(command));
    return rest;
  }

  fs::path dir;
  std::ostringstream out;
  std::ostringstream err;
};

TEST(ParseDuration, UnitsAndSigns) {
  EXPECT_EQ(parse_duration("90"), 90.0);
  EXPECT_EQ(parse_duration("90s"), 90.0);
  EXPECT_EQ(parse_duration("15m"), 900.0);
  EXPECT_EQ(parse_duration("12h"), 43200.0);
  EXPECT_EQ(parse_duration("5d"), 432000.0);
  EXPECT_EQ(parse_duration("+5d"), 432000.0);
  EXPECT_EQ(parse_duration("-5d"), -432000.0);
  EXPECT_EQ(parse_duration("1w"), 604800.0);
  EXPECT_EQ(parse_duration("0.5d"), 43200.0);
  EXPECT_THROW(parse_duration(""), std::invalid_argument);
  EXPECT_THROW(parse_duration("d"), std::invalid_argument);
  EXPECT_THROW(parse_duration("5x"), std::invalid_argument);
}

TEST_F(CliTest, ProbeWithHalfPeriodFrequencyGivesMinusOne) {
  const int rc = call({"probe-time", "--omega", "3.141592653589793", "--pair", "1,0", "--output",
                       dir.string(), "--run-id", "probe"});
  ASSERT_EQ(rc, 0) << err.str();
  const auto text = slurp(dir / "probe" / "kernel.tsv");
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t1\tt2\tlag\tkernel");
  double t1, t2, lag, k;
  in >> t1 >> t2 >> lag >> k;
  EXPECT_EQ(t1, 1.0);
  EXPECT_EQ(t2, 0.0);
  EXPECT_NEAR(k, -1.0, 1e-12);
}

TEST_F(CliTest, EvalWithPerfectModelReportsOnes) {
  // Ten users each buy their own item once. With no layers the score is the
  // embedding product, and one-hot embeddings rank every truth first.
  const auto data = dir / "perfect.tsv";
  {
    std::ofstream f(data);
    for (int k = 0; k < 10; ++k) f << 'u' << k << "\ti" << k << '\t' << 1000 + 10 * k << '\n';
  }
  ModelConfig mc;
  mc.dim = 10;
  mc.time_dim = 2;
  mc.layers = 0;
  mc.heads = 1;
  Checkpoint ck{init_params(mc, 10, 10, 1), {}, TimeScale::from_range(1000.0, 1090.0)};
  ck.params.embeddings.setZero();
  for (int k = 0; k < 10; ++k) {
    ck.ids.add_user("u" + std::to_string(k));
    ck.ids.add_item("i" + std::to_string(k));
    ck.params.embeddings(k, k) = 10.0;
    ck.params.embeddings(10 + k, k) = 1.0;
  }
  save_checkpoint(dir / "perfect.ckpt", ck);
  const int rc = call({"eval", "--data", data.string(), "--checkpoint", (dir / "perfect.ckpt").string(),
                       "--output", dir.string(), "--run-id", "perfect"});
  ASSERT_EQ(rc, 0) << err.str();
  std::istringstream in(slurp(dir / "perfect" / "metrics.tsv"));
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "split\tscorer\tn_evaluated\trecall@10\trecall@20\tndcg@10\tndcg@20\tmrr");
  EXPECT_EQ(row, "test\tmodel\t1\t1.000000\t1.000000\t1.000000\t1.000000\t1.000000");
}

TEST_F(CliTest, MissingInputsExitNonzero) {
  EXPECT_NE(call({"eval", "--data", (dir / "nope.tsv").string(), "--output", dir.string()}), 0);
  EXPECT_NE(err.str().find("not found"), std::string::npos);
  const auto data = write_toy();
  EXPECT_NE(call({"eval", "--data", data.string(), "--checkpoint", (dir / "missing.ckpt").string(),
                  "--output", dir.string()}),
            0);
  EXPECT_NE(err.str().find("checkpoint"), std::string::npos);
  EXPECT_NE(call({"train", "--data", data.string(), "--set", "model.time_dim=3", "--output", dir.string()}), 0);
  EXPECT_NE(call({"train", "--data", data.string(), "--set", "model.colour=red"}), 0);
  EXPECT_NE(call({"bogus"}), 0);
  EXPECT_NE(call({}), 0);
}

TEST_F(CliTest, IngestWritesIdMapAndSummary) {
  const auto data = write_toy();
  ASSERT_EQ(call({"ingest", "--data", data.string(), "--output", dir.string(), "--run-id", "in"}), 0)
      << err.str();
  std::ifstream ids(dir / "in" / "id_map.tsv");
  const auto map = read_id_map(ids);
  EXPECT_EQ(map.num_users(), 16);
  std::istringstream summary(slurp(dir / "in" / "dataset.tsv"));
  std::string header;
  int users = 0, items = 0;
  std::getline(summary, header);
  summary >> users >> items;
  EXPECT_EQ(users, 16);
  EXPECT_EQ(items, map.num_items());
}

TEST_F(CliTest, TrainEvalAttentionEndToEndIsIdempotent) {
  const auto data = write_toy();
  for (const std::string id : {"a", "b"}) {
    ASSERT_EQ(call(with("train", toy_settings(data, id))), 0) << err.str();
    ASSERT_EQ(call(with("eval", toy_settings(data, id))), 0) << err.str();
    auto attention = toy_settings(data, id);
    attention.insert(attention.end(), {"--user", "u3", "--offsets", "+5d,+30d"});
    ASSERT_EQ(call(with("export-attention", attention)), 0) << err.str();
  }
  const auto a = dir / "runs" / "a";
  const auto b = dir / "runs" / "b";
  EXPECT_EQ(slurp(a / "model.ckpt"), slurp(b / "model.ckpt"));
  EXPECT_EQ(without_last_column(slurp(a / "train_log.tsv")), without_last_column(slurp(b / "train_log.tsv")));
  EXPECT_EQ(slurp(a / "metrics.tsv"), slurp(b / "metrics.tsv"));
  EXPECT_EQ(slurp(a / "attention.tsv"), slurp(b / "attention.tsv"));
  EXPECT_EQ(slurp(a / "id_map.tsv"), slurp(b / "id_map.tsv"));
  // Only the run id differs between the two saved configs.
  auto ca = parse_run_config_text(slurp(a / "config.ini"));
  ca.run_id = "b";
  EXPECT_EQ(serialize(ca), slurp(b / "config.ini"));

  // The log has one row per epoch with validation metrics filled in.
  std::istringstream log(slurp(a / "train_log.tsv"));
  std::string line;
  std::getline(log, line);
  EXPECT_EQ(line, "epoch\tmean_loss\tskipped\tvalid_recall@10\tvalid_ndcg@10\tvalid_mrr\twall_seconds");
  int rows = 0;
  while (std::getline(log, line)) {
    ++rows;
    EXPECT_EQ(line.find("\t-\t"), std::string::npos);
  }
  EXPECT_EQ(rows, 2);

  // Weights at the two offsets come from the same history but different
  // query times, so they differ; each offset and head sums to one.
  std::istringstream att(slurp(a / "attention.tsv"));
  std::getline(att, line);
  std::map<std::pair<std::string, int>, std::vector<double>> weights;
  while (std::getline(att, line)) {
    std::istringstream row(line);
    std::string offset, item;
    double offset_s, query_s, item_s, w;
    int head;
    row >> offset >> offset_s >> query_s >> head >> item >> item_s >> w;
    weights[{offset, head}].push_back(w);
  }
  ASSERT_EQ(weights.size(), 4u);  // two offsets, two heads
  for (const auto& [key, ws] : weights) {
    double sum = 0.0;
    for (double w : ws) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  double diff = 0.0;
  const auto& w5 = weights.at({"+5d", 0});
  const auto& w30 = weights.at({"+30d", 0});
  ASSERT_EQ(w5.size(), w30.size());
  for (size_t k = 0; k < w5.size(); ++k) diff += std::abs(w5[k] - w30[k]);
  EXPECT_GT(diff, 1e-6);
}

TEST_F(CliTest, EvalOptionsWritePopularityAndRanks) {
  const auto data = write_toy();
  ASSERT_EQ(call(with("train", toy_settings(data, "r"))), 0) << err.str();
  auto args = toy_settings(data, "r");
  args.insert(args.end(), {"--popularity", "--top", "3", "--split", "valid", "--mode", "sampled:5"});
  ASSERT_EQ(call(with("eval", args)), 0) << err.str();
  const auto metrics = slurp(dir / "runs" / "r" / "metrics.tsv");
  EXPECT_NE(metrics.find("valid\tmodel\t"), std::string::npos);
  EXPECT_NE(metrics.find("valid\tpopularity\t"), std::string::npos);
  std::istringstream ranks(slurp(dir / "runs" / "r" / "ranks.tsv"));
  std::string line;
  std::getline(ranks, line);
  EXPECT_EQ(line, "user\ttimestamp\trank\titem\tscore\tis_truth");
  int rows = 0;
  while (std::getline(ranks, line)) ++rows;
  EXPECT_GT(rows, 0);
  EXPECT_EQ(rows % 3, 0);
}

TEST_F(CliTest, ConfigFilePathsAndSweep) {
  const auto data = write_toy();
  {
    std::ofstream f(dir / "run.ini");
    f << "[data]\npath = toy.tsv\n"
      << "[model]\ndim = 4\ntime_dim = 4\nneighbors = 3\n"
      << "[train]\nepochs = 1\nbatch_size = 64\nvalidate_every = 0\n"
      << "[output]\ndir = " << (dir / "runs").string() << "\nrun_id = grid\n"
      << "[run]\nworkers = 1\n"
      << "[sweep]\nmodel.layers = 0,1\n";
  }
  ASSERT_EQ(call({"sweep", "--config", (dir / "run.ini").string()}), 0) << err.str();
  std::istringstream tsv(slurp(dir / "runs" / "grid" / "sweep.tsv"));
  std::string line;
  std::getline(tsv, line);
  EXPECT_EQ(line.rfind("run_id\tmodel.layers\tn_evaluated", 0), 0u);
  std::getline(tsv, line);
  EXPECT_EQ(line.rfind("grid-0\t0\t", 0), 0u);
  std::getline(tsv, line);
  EXPECT_EQ(line.rfind("grid-1\t1\t", 0), 0u);
  EXPECT_TRUE(fs::exists(dir / "runs" / "grid-1" / "model.ckpt"));
  // validate_every = 0 leaves the validation columns empty.
  const auto log = slurp(dir / "runs" / "grid-0" / "train_log.tsv");
  EXPECT_NE(log.find("\t-\t-\t-\t"), std::string::npos);
}

TEST_F(CliTest, ProbeWithCheckpointUsesItsEncoder) {
  const auto data = write_toy();
  ASSERT_EQ(call(with("train", toy_settings(data, "p"))), 0) << err.str();
  auto args = toy_settings(data, "p");
  args.insert(args.end(), {"--pair", "5d,5d", "--pair", "10d,0"});
  ASSERT_EQ(call(with("probe-time", args)), 0) << err.str();
  std::istringstream tsv(slurp(dir / "runs" / "p" / "kernel.tsv"));
  std::string header;
  std::getline(tsv, header);
  double t1, t2, lag, k;
  tsv >> t1 >> t2 >> lag >> k;
  EXPECT_NEAR(k, 1.0, 1e-12);
  tsv >> t1 >> t2 >> lag >> k;
  EXPECT_EQ(lag, 864000.0);
  EXPECT_LE(std::abs(k), 1.0 + 1e-12);
}

TEST_F(CliTest, GenerateSyntheticMatchesLibrary) {
  ASSERT_EQ(call({"generate-synthetic", "--out", (dir / "syn.tsv").string(), "--seed", "4"}), 0);
  SyntheticConfig sc;
  sc.seed = 4;
  const auto expected = generate_synthetic(sc);
  IngestOptions raw;
  raw.normalize_time = false;
  const auto back = ingest(dir / "syn.tsv", raw);
  EXPECT_EQ(back.interactions.size(), expected.size());
  EXPECT_EQ(back.interactions.front().timestamp, expected.front().timestamp);
}

}  // namespace
}  // namespace tgrec::cli
