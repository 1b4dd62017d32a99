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

// Scripted scenarios shared by the pipeline, harness, and acceptance tests.

#ifndef VDK_TESTS_SCENARIO_FIXTURES_HPP_
#define VDK_TESTS_SCENARIO_FIXTURES_HPP_

#include <string>

#include "test_util.hpp"
#include "vdk/pipeline.hpp"
#include "vdk/scenario.hpp"

namespace vdk_test {

using vdk::RunConfig;
using vdk::Scenario;
using vdk::ScenarioRule;

inline const std::string kQ1 =
    "What percentage of the NFL revenue do the players receive?";
inline const std::string kQ2 = "Which country won the tournament?";

inline ScenarioRule gen_rule(const std::string& model, const std::string& sub,
                             const std::string& text, long long prompt_tokens,
                             long long completion_tokens) {
  ScenarioRule r;
  r.model = model;
  r.match_substring = sub;
  r.response_text = text;
  r.usage = {prompt_tokens, completion_tokens};
  return r;
}

inline ScenarioRule route_score_rule(const std::string& model,
                                     const std::string& q,
                                     const std::string& answer, double nll) {
  ScenarioRule r;
  r.model = model;
  r.match_substring = q + "\n" + answer;
  r.has_logprobs = true;
  r.token_logprobs = {-nll};
  return r;
}

inline ScenarioRule echo_score_rule(const std::string& model,
                                    const std::string& q,
                                    const std::string& answer, double nll) {
  ScenarioRule r;
  r.model = model;
  r.match_substring = "Question: " + q + "\nAnswer: " + answer;
  r.has_logprobs = true;
  r.token_logprobs = {-nll};
  r.answer_span_text = answer;
  return r;
}

// Five drafters disagree: 52% / 49% / 49% / 47 million / 38%, gold is 49%.
// The two 49% drafts plus the 52% draft have the tightest mutual
// likelihoods, so cross-all at m=3 picks indices [1, 2, 0]. On re-reasoning
// the 49%-camp splits (one flips to 52%), leaving the correct answer in the
// expert minority; the scripted verdict still lands on 49%.
inline const char* const kModels1[5] = {"draft-a", "draft-b", "draft-c",
                                        "draft-d", "draft-e"};
inline const char* const kAnswers1[5] = {"52%", "49%", "49%", "47 million",
                                         "38%"};
inline const char* const kDistinct1[4] = {"52%", "49%", "47 million", "38%"};
inline const double kNll1[5][4] = {
    // scorer rows over answers {52%, 49%, 47 million, 38%}
    {1.0, 1.2, 3.0, 2.5},
    {1.0, 0.8, 2.8, 2.2},
    {1.1, 0.9, 2.6, 2.4},
    {2.7, 2.6, 1.5, 2.9},
    {2.4, 2.3, 3.2, 1.1},
};
inline const char* const kReanswers1[5] = {"52%", "49%", "52%", "47 million",
                                           "38%"};

inline void add_draft_rules1(Scenario& sc, bool reasoning_template) {
  const std::string tail = reasoning_template
                               ? "receive? Please think step-by-step"
                               : "receive? Please answer the question";
  const char* const* texts = reasoning_template ? kReanswers1 : kAnswers1;
  for (int i = 0; i < 5; ++i)
    sc.rules.push_back(gen_rule(
        kModels1[i], tail,
        std::string("Looking at the infographic. \\boxed{") + texts[i] + "}",
        1000, 20));
}

inline void add_reasoning_rules1(Scenario& sc) {
  for (int i = 0; i < 5; ++i)
    sc.rules.push_back(gen_rule(
        kModels1[i], "receive? Please think step-by-step",
        std::string("The revenue split favors \\boxed{") + kReanswers1[i] +
            "}",
        1100, 200));
}

inline void add_score_rules1(Scenario& sc) {
  for (int j = 0; j < 5; ++j)
    for (int a = 0; a < 4; ++a)
      sc.rules.push_back(
          route_score_rule(kModels1[j], kQ1, kDistinct1[a], kNll1[j][a]));
}

inline void add_verdict_rule(Scenario& sc, const std::string& answer) {
  sc.rules.push_back(gen_rule("verdict-x", "--- Model 1 ---",
                              "The supported answer is \\boxed{" + answer +
                                  "}.",
                              2000, 180));
}

inline Scenario fixture1_scenario() {
  Scenario sc;
  add_draft_rules1(sc, false);
  add_reasoning_rules1(sc);
  add_score_rules1(sc);
  add_verdict_rule(sc, "49%");
  return sc;
}

inline RunConfig fixture_config(const std::string& base_url,
                                const std::string& img) {
  (void)img;
  RunConfig cfg;
  cfg.benchmark = vdk::Benchmark::of(vdk::BenchmarkKind::InfographicVQA);
  for (const char* name : kModels1)
    cfg.pool.push_back(mock_spec(name, base_url));
  cfg.verdict = mock_spec("verdict-x", base_url);
  cfg.experts = 3;
  return cfg;
}

// Gold is Portugal but no drafter says it: Australia / Spain / Australia /
// Brazil / France. Cross-all picks [0, 2, 1]; every expert is wrong; the
// scripted verdict recovers Portugal anyway. Scoring runs over the echoed
// completions probe instead of the score route.
inline const char* const kModels2[5] = {"path-a", "path-b", "path-c",
                                        "path-d", "path-e"};
inline const char* const kAnswers2[5] = {"Australia", "Spain", "Australia",
                                         "Brazil", "France"};
inline const char* const kDistinct2[4] = {"Australia", "Spain", "Brazil",
                                          "France"};
inline const double kNll2[5][4] = {
    {1.0, 1.3, 2.5, 2.8},
    {1.15, 0.9, 2.2, 2.6},
    {1.05, 1.35, 2.3, 2.7},
    {2.4, 2.5, 1.2, 2.9},
    {2.2, 2.3, 2.6, 1.0},
};
inline const char* const kReanswers2[5] = {"Australia", "Spain", "Australia",
                                           "Brazil", "France"};

inline Scenario fixture2_scenario() {
  Scenario sc;
  for (int i = 0; i < 5; ++i)
    sc.rules.push_back(gen_rule(
        kModels2[i], "tournament? Please answer the question",
        std::string("From the image it is \\boxed{") + kAnswers2[i] + "}",
        900, 15));
  for (int i = 0; i < 5; ++i)
    sc.rules.push_back(gen_rule(
        kModels2[i], "tournament? Please think step-by-step",
        std::string("Tracing the bracket gives \\boxed{") + kReanswers2[i] +
            "}",
        950, 150));
  for (int j = 0; j < 5; ++j)
    for (int a = 0; a < 4; ++a)
      sc.rules.push_back(
          echo_score_rule(kModels2[j], kQ2, kDistinct2[a], kNll2[j][a]));
  add_verdict_rule(sc, "Portugal");
  return sc;
}

}  // namespace vdk_test

#endif  // VDK_TESTS_SCENARIO_FIXTURES_HPP_
