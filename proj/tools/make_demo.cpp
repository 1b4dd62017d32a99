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

// Regenerates the self-contained demo dataset: two samples, a scripted
// scenario for five drafters plus a verdict model, a run configuration
// pointing at the mock server, and verdict-alone answers for the
// conditioned recovery grid. Sample one keeps the right answer in the
// expert minority; sample two has no drafter right at all, and the verdict
// recovers both.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vdk/config.hpp"
#include "vdk/scenario.hpp"
#include "vdk/util.hpp"

namespace {

namespace fs = std::filesystem;

constexpr const char* kTinyPngB64 =
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mP8z8BQDwAEhQGAhK"
    "mMIQAAAABJRU5ErkJggg==";

constexpr const char* kQ1 =
    "What percentage of the NFL revenue do the players receive?";
constexpr const char* kQ2 = "Which country won the World Cup in 2010?";

constexpr const char* kModels[5] = {"draft-a", "draft-b", "draft-c",
                                    "draft-d", "draft-e"};

// Drafts for question one: gold is 49%, held by two of five drafters; on
// the reasoning pass one of them flips to 52%, so the experts' majority is
// wrong while the verdict is right.
constexpr const char* kDrafts1[5] = {"52%", "49%", "49%", "47 million",
                                     "38%"};
constexpr const char* kReasoned1[5] = {"52%", "49%", "52%", "47 million",
                                       "38%"};
constexpr const char* kDistinct1[4] = {"52%", "49%", "47 million", "38%"};
constexpr double kNll1[5][4] = {
    {1.0, 1.2, 3.0, 2.5}, {1.0, 0.8, 2.8, 2.2}, {1.1, 0.9, 2.6, 2.4},
    {2.7, 2.6, 1.5, 2.9}, {2.4, 2.3, 3.2, 1.1},
};

// Drafts for question two: gold is Spain and nobody says it.
constexpr const char* kDrafts2[5] = {"Netherlands", "Germany", "Netherlands",
                                     "Brazil", "France"};
constexpr const char* kDistinct2[4] = {"Netherlands", "Germany", "Brazil",
                                       "France"};
constexpr double kNll2[5][4] = {
    {1.0, 1.3, 2.5, 2.8}, {1.15, 0.9, 2.2, 2.6}, {1.05, 1.35, 2.3, 2.7},
    {2.4, 2.5, 1.2, 2.9}, {2.2, 2.3, 2.6, 1.0},
};

vdk::ScenarioRule answer_rule(const std::string& model,
                              const std::string& sub,
                              const std::string& prose,
                              const std::string& answer,
                              long long prompt_tokens,
                              long long completion_tokens) {
  vdk::ScenarioRule r;
  r.model = model;
  r.match_substring = sub;
  r.response_text = prose + " \\boxed{" + answer + "}";
  r.usage = {prompt_tokens, completion_tokens};
  return r;
}

vdk::ScenarioRule score_rule(const std::string& model, const std::string& q,
                             const std::string& answer, double nll) {
  vdk::ScenarioRule r;
  r.model = model;
  r.match_substring = q + "\n" + answer;
  r.has_logprobs = true;
  r.token_logprobs = {-nll};
  return r;
}

vdk::Scenario demo_scenario() {
  vdk::Scenario sc;
  for (int i = 0; i < 5; ++i)
    sc.rules.push_back(answer_rule(
        kModels[i], "receive? Please answer the question",
        "Reading the revenue split off the infographic.", kDrafts1[i], 1000,
        20));
  for (int i = 0; i < 5; ++i)
    sc.rules.push_back(answer_rule(
        kModels[i], "receive? Please think step-by-step",
        "The split favors the players slightly below half.", kReasoned1[i],
        1100, 200));
  for (int j = 0; j < 5; ++j)
    for (int a = 0; a < 4; ++a)
      sc.rules.push_back(
          score_rule(kModels[j], kQ1, kDistinct1[a], kNll1[j][a]));

  for (int i = 0; i < 5; ++i)
    sc.rules.push_back(answer_rule(
        kModels[i], "2010? Please answer the question",
        "The bracket points at the finalist.", kDrafts2[i], 900, 15));
  for (int i = 0; i < 5; ++i)
    sc.rules.push_back(answer_rule(
        kModels[i], "2010? Please think step-by-step",
        "Following the knockout rounds to the final.", kDrafts2[i], 950,
        150));
  for (int j = 0; j < 5; ++j)
    for (int a = 0; a < 4; ++a)
      sc.rules.push_back(
          score_rule(kModels[j], kQ2, kDistinct2[a], kNll2[j][a]));

  sc.rules.push_back(answer_rule(
      "verdict-x", "NFL revenue",
      "Two reasoning paths ground the figure in the infographic.", "49%",
      2000, 180));
  sc.rules.push_back(answer_rule(
      "verdict-x", "World Cup in 2010",
      "The cited final was Spain against the Netherlands.", "Spain", 2000,
      180));
  return sc;
}

nlohmann::ordered_json demo_config() {
  vdk::RunConfig cfg;
  cfg.benchmark = vdk::Benchmark::of(vdk::BenchmarkKind::InfographicVQA);
  for (const char* name : kModels) {
    vdk::ModelSpec s;
    s.name = name;
    s.base_url = "http://127.0.0.1:8099";
    s.api_style = vdk::ApiStyle::Chat;
    s.supports_scoring = vdk::ScoringSupport::ScoreRoute;
    s.pricing = {2.50, 10.00};
    s.request_timeout_s = 10;
    s.max_retries = 2;
    s.retry_backoff_ms = 50;
    cfg.pool.push_back(s);
  }
  vdk::ModelSpec v = cfg.pool[0];
  v.name = "verdict-x";
  v.pricing = {2.50, 10.00};
  cfg.verdict = v;
  cfg.experts = 3;
  cfg.max_concurrency = 4;
  cfg.sample_workers = 2;

  auto j = vdk::run_config_to_json(cfg);
  for (auto& spec : j["pool"])
    spec["base_url"] = "http://127.0.0.1:${VDK_MOCK_PORT:-8099}";
  j["verdict"]["base_url"] = "http://127.0.0.1:${VDK_MOCK_PORT:-8099}";
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regenerate the demo dataset"};
  std::string out = "data/demo";
  app.add_option("--out", out, "demo directory (default data/demo)");
  CLI11_PARSE(app, argc, argv);

  try {
    fs::path root(out);
    fs::create_directories(root / "img");
    std::string png = vdk::base64_decode(kTinyPngB64);
    vdk::write_file(root / "img" / "infographic.png", png);
    vdk::write_file(root / "img" / "bracket.png", png + '\x01');

    vdk::write_file(root / "scenario.json",
                    vdk::scenario_to_json(demo_scenario()).dump(2) + "\n");
    vdk::write_file(root / "config.json", demo_config().dump(2) + "\n");

    nlohmann::ordered_json s1, s2;
    s1["id"] = "s-nfl";
    s1["question"] = kQ1;
    s1["image_path"] = "img/infographic.png";
    s1["gold_answers"] = {"49%"};
    s2["id"] = "s-cup";
    s2["question"] = kQ2;
    s2["image_path"] = "img/bracket.png";
    s2["gold_answers"] = {"Spain"};
    vdk::write_file(root / "manifest.jsonl",
                    s1.dump() + "\n" + s2.dump() + "\n");

    // Scripted single-model baseline answers: wrong on both samples, so the
    // conditioned recovery grid shows what the panel added.
    vdk::write_file(root / "verdict_alone.jsonl",
                    "{\"id\":\"s-nfl\",\"answer\":\"52%\"}\n"
                    "{\"id\":\"s-cup\",\"answer\":null}\n");

    std::cerr << "wrote demo dataset to " << root.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
