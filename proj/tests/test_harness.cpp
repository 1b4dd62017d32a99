// Copyright 2026 The verdictkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "scenario_fixtures.hpp"
#include "test_util.hpp"
#include "vdk/config.hpp"
#include "vdk/manifest.hpp"
#include "vdk/mock_server.hpp"
#include "vdk/model_client.hpp"
#include "vdk/run_store.hpp"
#include "vdk/runner.hpp"

namespace {

namespace fs = std::filesystem;
using vdk::Error;
using vdk::MockServer;
using vdk::RunConfig;
using vdk::RunStore;
using vdk::Sample;
using namespace vdk_test;

std::vector<Sample> same_question_samples(const std::string& img, int n) {
  std::vector<Sample> out;
  for (int i = 1; i <= n; ++i)
    out.push_back(Sample{"s" + std::to_string(i), kQ1, img, "", {"49%"}, ""});
  return out;
}

}  // namespace

TEST_CASE("manifest lines resolve paths and tolerate optional fields") {
  auto dir = fresh_dir("mani1");
  std::string img = write_png(dir, "a.png");
  std::string aux = write_png(dir, "b.png", '\x01');
  vdk::write_file(
      dir / "manifest.jsonl",
      "{\"id\":\"s1\",\"question\":\"How many?\",\"image_path\":\"a.png\","
      "\"gold_answers\":[\"3\"],\"question_type\":\"counting\"}\n"
      "\n"
      "{\"id\":\"s2\",\"question\":\"Which one?\",\"image_path\":\"" +
          img +
          "\",\"aux_image_path\":\"b.png\",\"gold_answers\":[\"left\","
          "\"the left\"]}\n"
          "{\"id\":\"s3\",\"question\":\"What?\",\"image_path\":\"a.png\","
          "\"aux_image_path\":null,\"gold_answers\":[\"x\"]}\n");

  auto samples = vdk::load_manifest((dir / "manifest.jsonl").string());
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].id == "s1");
  CHECK(fs::path(samples[0].image_path) == dir / "a.png");
  CHECK(samples[0].question_type == "counting");
  CHECK(samples[0].aux_image_path.empty());
  CHECK(fs::path(samples[1].image_path) == dir / "a.png");
  CHECK(fs::path(samples[1].aux_image_path) == dir / "b.png");
  CHECK(samples[1].gold_answers ==
        std::vector<std::string>{"left", "the left"});
  CHECK(samples[2].aux_image_path.empty());

  auto index = vdk::sample_index(samples);
  CHECK(index.size() == 3);
  CHECK(index.at("s2").question == "Which one?");

  auto j = vdk::sample_to_json(samples[0]);
  CHECK(j.contains("question_type"));
  CHECK_FALSE(j.contains("aux_image_path"));
}

TEST_CASE("manifest errors carry line numbers and stable codes") {
  auto dir = fresh_dir("mani2");
  std::string img = write_png(dir, "a.png");

  auto expect_throw = [&](const std::string& text, vdk::Errc code,
                          const std::string& fragment) {
    vdk::write_file(dir / "bad.jsonl", text);
    try {
      vdk::load_manifest((dir / "bad.jsonl").string());
      FAIL("expected a throw for: " << text);
    } catch (const Error& e) {
      CHECK(e.code() == code);
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };

  expect_throw("{\"id\":\"a\",\"question\":\"q\",\"image_path\":\"a.png\"}\n",
               vdk::Errc::ParseError, "gold_answers");
  expect_throw("not json\n", vdk::Errc::ParseError, "line 1");
  expect_throw(
      "{\"id\":\"a\",\"question\":\"q\",\"image_path\":\"a.png\","
      "\"gold_answers\":[]}\n",
      vdk::Errc::ParseError, "empty gold_answers");
  expect_throw(
      "{\"id\":\"\",\"question\":\"q\",\"image_path\":\"a.png\","
      "\"gold_answers\":[\"1\"]}\n",
      vdk::Errc::ParseError, "empty id");
  std::string ok =
      "{\"id\":\"a\",\"question\":\"q\",\"image_path\":\"a.png\","
      "\"gold_answers\":[\"1\"]}\n";
  expect_throw(ok + ok, vdk::Errc::DuplicateId, "line 2");
  expect_throw("", vdk::Errc::ParseError, "no samples");

  vdk::write_file(dir / "bad.jsonl",
                  "{\"id\":\"a\",\"question\":\"q\",\"image_path\":"
                  "\"gone.png\",\"gold_answers\":[\"1\"]}\n");
  CHECK_THROWS_AS(vdk::load_manifest((dir / "bad.jsonl").string()),
                  Error);
  auto lax = vdk::load_manifest((dir / "bad.jsonl").string(), false);
  CHECK(lax.size() == 1);
  CHECK(fs::path(lax[0].image_path) == dir / "gone.png");
}

TEST_CASE("verdict-alone answers load as a nullable map") {
  auto dir = fresh_dir("alone");
  vdk::write_file(dir / "alone.jsonl",
                  "{\"id\":\"a\",\"answer\":\"49%\"}\n"
                  "{\"id\":\"b\",\"answer\":null}\n");
  auto alone = vdk::load_alone_answers((dir / "alone.jsonl").string());
  REQUIRE(alone.size() == 2);
  REQUIRE(alone.at("a").has_value());
  CHECK(*alone.at("a") == "49%");
  CHECK_FALSE(alone.at("b").has_value());

  vdk::write_file(dir / "dup.jsonl",
                  "{\"id\":\"a\",\"answer\":\"1\"}\n"
                  "{\"id\":\"a\",\"answer\":\"2\"}\n");
  CHECK_THROWS_AS(vdk::load_alone_answers((dir / "dup.jsonl").string()),
                  Error);
}

TEST_CASE("environment references interpolate with defaults") {
  setenv("VDK_TEST_SET", "hello", 1);
  unsetenv("VDK_TEST_UNSET");
  CHECK(vdk::interpolate_env("x${VDK_TEST_SET}y") == "xhelloy");
  CHECK(vdk::interpolate_env("${VDK_TEST_SET:-other}") == "hello");
  CHECK(vdk::interpolate_env("${VDK_TEST_UNSET:-other}") == "other");
  CHECK(vdk::interpolate_env("${VDK_TEST_UNSET:-}") == "");
  CHECK(vdk::interpolate_env("no refs") == "no refs");
  CHECK_THROWS_AS(vdk::interpolate_env("${VDK_TEST_UNSET}"), Error);
  CHECK_THROWS_AS(vdk::interpolate_env("${unterminated"), Error);
  CHECK_THROWS_AS(vdk::interpolate_env("${}"), Error);
}

TEST_CASE("run configuration round-trips through json") {
  RunConfig cfg = fixture_config("http://127.0.0.1:9", "");
  cfg.strategy = vdk::Strategy::BestReference;
  cfg.best_reference_index = 1;
  cfg.question_type_templates["counting"] = "Count objects. {question}";
  cfg.metrics.anls_threshold = 0.6;

  auto j = vdk::run_config_to_json(cfg);
  RunConfig back = vdk::run_config_from_json(j);
  CHECK(vdk::run_config_to_json(back).dump(2) == j.dump(2));
  CHECK(back.pool.size() == 5);
  CHECK(back.pool[3].name == "draft-d");
  CHECK(back.strategy == vdk::Strategy::BestReference);
  CHECK(back.best_reference_index == 1);
  CHECK(back.metrics.anls_threshold == 0.6);
  CHECK(back.question_type_templates.at("counting") ==
        "Count objects. {question}");

  RunConfig parsed = vdk::parse_run_config_text(j.dump());
  CHECK(vdk::run_config_to_json(parsed).dump() == j.dump());
}

TEST_CASE("config parsing rejects typos and interpolates urls") {
  RunConfig cfg = fixture_config("http://127.0.0.1:9", "");
  auto j = vdk::run_config_to_json(cfg);

  auto typo = j;
  typo["expertz"] = 3;
  try {
    vdk::run_config_from_json(typo);
    FAIL("expected unknown-key rejection");
  } catch (const Error& e) {
    CHECK(e.code() == vdk::Errc::InvalidConfig);
    CHECK(std::string(e.what()).find("expertz") != std::string::npos);
  }

  auto env = j;
  env["verdict"]["base_url"] = "${VDK_TEST_BASE:-http://127.0.0.1:7}";
  setenv("VDK_TEST_BASE", "http://10.0.0.1:8000", 1);
  RunConfig with_env = vdk::parse_run_config_text(env.dump());
  CHECK(with_env.verdict.base_url == "http://10.0.0.1:8000");
  unsetenv("VDK_TEST_BASE");
  RunConfig with_default = vdk::parse_run_config_text(env.dump());
  CHECK(with_default.verdict.base_url == "http://127.0.0.1:7");

  auto broken = j;
  broken["experts"] = 99;
  CHECK_THROWS_AS(vdk::run_config_from_json(broken), Error);
}

TEST_CASE("store resumes a run without repeating finished samples") {
  auto dir = fresh_dir("store1");
  std::string img = write_png(dir, "chart.png");
  MockServer server(fixture1_scenario());
  RunConfig cfg = fixture_config(server.base_url(), img);
  cfg.sample_workers = 2;
  cfg.max_concurrency = 4;
  vdk::HttpModelClient client;
  auto samples = same_question_samples(img, 4);

  // Per sample: 5 drafts + 3 reasoning + 1 verdict chat calls and
  // 5 scorers x 4 distinct answers scoring calls.
  {
    RunStore store(dir / "run", cfg);
    std::vector<Sample> first(samples.begin(), samples.begin() + 2);
    auto batch = vdk::run_batch(client, cfg, first, &store);
    CHECK(batch.ran == 2);
    CHECK(batch.reused == 0);
    CHECK(batch.failed == 0);
    REQUIRE(batch.outcomes.size() == 2);
    CHECK(server.chat_requests() == 18);
    CHECK(server.score_requests() == 40);
  }

  server.reset_counters();
  int done_calls = 0;
  int done_reused = 0;
  {
    RunStore store(dir / "run", cfg);
    auto batch = vdk::run_batch(
        client, cfg, samples, &store, nullptr,
        [&](const vdk::SampleOutcome&, bool reused) {
          ++done_calls;
          if (reused) ++done_reused;
        });
    CHECK(batch.ran == 2);
    CHECK(batch.reused == 2);
    REQUIRE(batch.outcomes.size() == 4);
    for (int i = 0; i < 4; ++i)
      CHECK(batch.outcomes[i].sample_id == "s" + std::to_string(i + 1));
    CHECK(server.chat_requests() == 18);
    CHECK(server.score_requests() == 40);
    CHECK(done_calls == 4);
    CHECK(done_reused == 2);
  }

  // The compacted log lists samples in manifest order.
  std::string log = vdk::read_file(dir / "run" / "outcomes.jsonl");
  std::vector<std::string> ids;
  std::istringstream in(log);
  std::string line;
  while (std::getline(in, line))
    ids.push_back(nlohmann::ordered_json::parse(line)["id"]);
  CHECK(ids == std::vector<std::string>{"s1", "s2", "s3", "s4"});

  RunConfig other = cfg;
  other.experts = 2;
  CHECK_THROWS_AS(RunStore(dir / "run", other), Error);

  std::atomic<bool> cancel{true};
  server.reset_counters();
  RunStore store(dir / "run", cfg);
  auto cancelled = vdk::run_batch(client, cfg, samples, &store, &cancel);
  CHECK(cancelled.ran == 0);
  CHECK(cancelled.reused == 0);
  CHECK(cancelled.outcomes.empty());
  CHECK(server.total_requests() == 0);
}

TEST_CASE("call cache serves repeats and survives reopen") {
  auto dir = fresh_dir("cache1");
  std::string img = write_png(dir, "chart.png");
  MockServer server(fixture1_scenario());
  RunConfig cfg = fixture_config(server.base_url(), img);
  cfg.sample_workers = 1;
  cfg.max_concurrency = 1;
  vdk::HttpModelClient client;
  auto samples = same_question_samples(img, 2);

  vdk::CallCache cache(dir / "cache.jsonl");
  vdk::CachingBroker broker(client, cache);

  // Both samples share one question and image, so the second sample is
  // answered entirely from the cache filled by the first.
  {
    RunStore store(dir / "a", cfg);
    auto batch = vdk::run_batch(broker, cfg, samples, &store);
    CHECK(batch.ran == 2);
    CHECK(batch.failed == 0);
    CHECK(server.chat_requests() == 9);
    CHECK(server.score_requests() == 20);
    REQUIRE(batch.outcomes.size() == 2);
    for (const auto& r : batch.outcomes[0].records) CHECK_FALSE(r.cached);
    for (const auto& r : batch.outcomes[1].records) {
      CHECK(r.cached);
      CHECK(r.latency_ms == 0);
    }
    CHECK(batch.outcomes[1].verdict.extracted.has_value());
    CHECK(batch.outcomes[1].usage_by_model.at("verdict-x") ==
          vdk::TokenUsage{2000, 180});
  }
  CHECK(cache.size() == 29);

  // A fresh store over the same cache replays every call without touching
  // the server.
  server.reset_counters();
  {
    RunStore store(dir / "b", cfg);
    auto batch = vdk::run_batch(broker, cfg, samples, &store);
    CHECK(batch.ran == 2);
    CHECK(batch.failed == 0);
    CHECK(server.total_requests() == 0);
  }

  // Reopening the cache file restores every entry.
  vdk::CallCache reopened(dir / "cache.jsonl");
  CHECK(reopened.size() == 29);
  server.reset_counters();
  {
    vdk::CachingBroker broker2(client, reopened);
    RunStore store(dir / "c", cfg);
    auto batch = vdk::run_batch(broker2, cfg, samples, &store);
    CHECK(batch.failed == 0);
    CHECK(server.total_requests() == 0);
  }

  vdk::write_file(dir / "broken.jsonl", "{\"kind\":\"gen\"\n");
  CHECK_THROWS_AS(vdk::CallCache(dir / "broken.jsonl"), Error);
}

TEST_CASE("failed calls are retried on the next run instead of cached") {
  auto dir = fresh_dir("cache2");
  std::string img = write_png(dir, "x.png");
  Scenario sc;
  ScenarioRule flaky =
      gen_rule("flaky", "hello", "Fine now. \\boxed{49%}", 100, 10);
  flaky.failure_mode = "http_500";
  flaky.fail_times = 3;
  sc.rules.push_back(flaky);
  MockServer server(sc);

  // mock_spec allows two retries, so one call makes three attempts and the
  // failure budget of three is spent by the first call alone.
  vdk::ModelSpec spec = mock_spec("flaky", server.base_url());
  vdk::HttpModelClient client;
  vdk::CallCache cache(dir / "cache.jsonl");
  vdk::CachingBroker broker(client, cache);

  vdk::PromptParts parts{"", "hello there", {img}};
  vdk::GenParams params{0.0, 64};
  CHECK_THROWS_AS(broker.generate(spec, parts, params), Error);
  CHECK(cache.size() == 0);

  auto rec = broker.generate(spec, parts, params);
  CHECK(rec.output_text == "Fine now. \\boxed{49%}");
  CHECK_FALSE(rec.cached);
  CHECK(cache.size() == 1);

  auto before = server.total_requests();
  auto hit = broker.generate(spec, parts, params);
  CHECK(hit.cached);
  CHECK(hit.latency_ms == 0);
  CHECK(server.total_requests() == before);
}

TEST_CASE("stage files are byte-identical across fresh runs") {
  auto dir = fresh_dir("det1");
  std::string img = write_png(dir, "chart.png");
  MockServer server(fixture1_scenario());
  vdk::HttpModelClient client;
  auto samples = same_question_samples(img, 3);

  RunConfig parallel_cfg = fixture_config(server.base_url(), img);
  parallel_cfg.sample_workers = 3;
  parallel_cfg.max_concurrency = 6;
  RunConfig serial_cfg = fixture_config(server.base_url(), img);
  serial_cfg.sample_workers = 1;
  serial_cfg.max_concurrency = 1;

  {
    RunStore store(dir / "a", parallel_cfg);
    auto batch = vdk::run_batch(client, parallel_cfg, samples, &store);
    REQUIRE(batch.failed == 0);
  }
  {
    RunStore store(dir / "b", serial_cfg);
    auto batch = vdk::run_batch(client, serial_cfg, samples, &store);
    REQUIRE(batch.failed == 0);
  }

  for (const char* name : {"outcomes.jsonl", "candidates.jsonl",
                           "scores.jsonl", "selection.jsonl", "paths.jsonl",
                           "verdict.jsonl"}) {
    INFO(name);
    std::string a = vdk::read_file(dir / "a" / name);
    std::string b = vdk::read_file(dir / "b" / name);
    CHECK(a == b);
    CHECK_FALSE(a.empty());
  }
}

TEST_CASE("ablation sweeps experts and strategies over one shared cache") {
  auto dir = fresh_dir("abl1");
  std::string img = write_png(dir, "chart.png");
  MockServer server(fixture1_scenario());
  RunConfig cfg = fixture_config(server.base_url(), img);
  cfg.best_reference_index = 0;
  cfg.sample_workers = 1;
  cfg.max_concurrency = 4;
  vdk::HttpModelClient client;
  auto samples = same_question_samples(img, 2);

  auto result = vdk::run_ablation(client, cfg, samples, dir / "sweep",
                                  vdk::MetricKind::RelaxedAccuracy);
  std::vector<std::string> names;
  for (const auto& row : result.rows) names.push_back(row.name);
  CHECK(names == std::vector<std::string>{"m=1", "m=2", "m=3", "m=4", "m=5",
                                          "strategy=cross-all",
                                          "strategy=divergent",
                                          "strategy=best-reference"});
  for (const auto& row : result.rows) {
    INFO(row.name);
    CHECK(row.failed == 0);
    CHECK(row.metrics.n == 2);
    REQUIRE_FALSE(row.metrics.rows.empty());
    CHECK(row.metrics.rows[0].system == "verdict");
    CHECK(fs::exists(row.dir / "outcomes.jsonl"));
  }
  // The scripted verdict answers 49% regardless of m, so every row scores 1.
  for (const auto& row : result.rows)
    CHECK(row.metrics.rows[0].mean_score == 1.0);
  CHECK(fs::exists(dir / "sweep" / "cache.jsonl"));
}
