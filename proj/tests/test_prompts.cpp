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

#include <map>
#include <string>

#include "vdk/prompts.hpp"

namespace {

const std::string kGoldenDir = std::string(VDK_SOURCE_DIR) + "/tests/golden/";

std::string golden(const std::string& name) {
  return vdk::read_file(kGoldenDir + name);
}

vdk::Sample nfl_sample() {
  vdk::Sample s;
  s.id = "nfl";
  s.question = "What percentage of the NFL revenue do the players receive?";
  return s;
}

vdk::Sample umbrella_sample() {
  vdk::Sample s;
  s.id = "umbrella";
  s.question =
      "Which option matches the color of the umbrella? (A) red (B) blue (C) "
      "green (D) white";
  return s;
}

vdk::Sample chart_sample() {
  vdk::Sample s;
  s.id = "chart";
  s.question = "In which year did revenue peak?";
  return s;
}

const std::vector<vdk::VerdictBlock> kNflBlocks = {
    {"Looking at the revenue split chart, players take 49%.", "49%"},
    {"The pie chart shows a 52% share next to the players icon.", "52%"},
    {"Reading the split, the players receive 49% of total revenue.", "49%"},
};

}  // namespace

TEST_CASE("reasoning prompts match the golden bytes", "[prompts]") {
  auto info = vdk::Benchmark::of(vdk::BenchmarkKind::InfographicVQA);
  CHECK(vdk::render_reasoning_prompt(info, nfl_sample()) ==
        golden("reasoning_infographicvqa.txt"));

  auto hrb = vdk::Benchmark::of(vdk::BenchmarkKind::HRBench);
  CHECK(vdk::render_reasoning_prompt(hrb, umbrella_sample()) ==
        golden("reasoning_hrbench.txt"));

  auto cm = vdk::Benchmark::of(vdk::BenchmarkKind::ChartMuseum);
  CHECK(vdk::render_reasoning_prompt(cm, chart_sample()) ==
        golden("reasoning_chartmuseum.txt"));
}

TEST_CASE("chartqapro reasoning uses per-question-type templates",
          "[prompts]") {
  auto cqp = vdk::Benchmark::of(vdk::BenchmarkKind::ChartQAPro);
  vdk::Sample s;
  s.question = "Is the overall trend increasing?";
  s.question_type = "trend";
  std::map<std::string, std::string> tpl = {
      {"trend",
       "The question below asks about a trend in the chart. Question: "
       "{QUESTION}"},
  };
  CHECK(vdk::render_reasoning_prompt(cqp, s, tpl) ==
        golden("reasoning_chartqapro.txt"));
}

TEST_CASE("chartqapro falls back to a bare question lead", "[prompts]") {
  auto cqp = vdk::Benchmark::of(vdk::BenchmarkKind::ChartQAPro);
  vdk::Sample s;
  s.question = "How many bars are shown?";
  s.question_type = "counting";
  std::string p = vdk::render_reasoning_prompt(cqp, s, {});
  CHECK(p.rfind("Question: How many bars are shown?", 0) == 0);
}

TEST_CASE("draft prompts match the golden bytes", "[prompts]") {
  auto info = vdk::Benchmark::of(vdk::BenchmarkKind::InfographicVQA);
  CHECK(vdk::render_draft_prompt(info, nfl_sample()) ==
        golden("draft_infographicvqa.txt"));

  auto hrb = vdk::Benchmark::of(vdk::BenchmarkKind::HRBench);
  CHECK(vdk::render_draft_prompt(hrb, umbrella_sample()) ==
        golden("draft_hrbench.txt"));

  auto cm = vdk::Benchmark::of(vdk::BenchmarkKind::ChartMuseum);
  CHECK(vdk::render_draft_prompt(cm, chart_sample()) ==
        golden("draft_chartmuseum.txt"));

  auto cqp = vdk::Benchmark::of(vdk::BenchmarkKind::ChartQAPro);
  vdk::Sample s;
  s.question = "Is the overall trend increasing?";
  s.question_type = "trend";
  std::map<std::string, std::string> tpl = {
      {"trend",
       "The question below asks about a trend in the chart. Question: "
       "{QUESTION}"},
  };
  CHECK(vdk::render_draft_prompt(cqp, s, tpl) ==
        golden("draft_chartqapro.txt"));
}

TEST_CASE("verdict system prompt matches the golden bytes", "[prompts]") {
  CHECK(std::string(vdk::kVerdictSystemPrompt) == golden("verdict_system.txt"));
}

TEST_CASE("verdict user prompts match the golden bytes", "[prompts]") {
  auto info = vdk::Benchmark::of(vdk::BenchmarkKind::InfographicVQA);
  CHECK(vdk::render_verdict_user(info, nfl_sample().question, kNflBlocks,
                                 false, 2) ==
        golden("verdict_user_infographicvqa.txt"));

  auto cm = vdk::Benchmark::of(vdk::BenchmarkKind::ChartMuseum);
  std::vector<vdk::VerdictBlock> cm_blocks = {
      {"The line tops out at the 2019 tick.", "2019"},
      {"Peak appears mid-series in 2019.", "2019"},
      {"Highest point is 2020 on my reading.", "2020"},
  };
  CHECK(vdk::render_verdict_user(cm, chart_sample().question, cm_blocks,
                                 false, 2) ==
        golden("verdict_user_chartmuseum.txt"));

  auto cqp = vdk::Benchmark::of(vdk::BenchmarkKind::ChartQAPro);
  std::vector<vdk::VerdictBlock> cqp_blocks = {
      {"Values rise across all years.", "Yes"},
      {"Each bar is taller than the last.", "Yes"},
      {"The final two bars dip slightly.", "No"},
  };
  CHECK(vdk::render_verdict_user(cqp, "Is the overall trend increasing?",
                                 cqp_blocks, false, 2) ==
        golden("verdict_user_chartqapro.txt"));

  auto hrb = vdk::Benchmark::of(vdk::BenchmarkKind::HRBench);
  std::vector<vdk::VerdictBlock> hrb_blocks = {
      {"The umbrella in the crop is blue.", "B"},
      {"Zooming in, the canopy is blue.", "B"},
      {"The small patch looks green to me.", "C"},
  };
  CHECK(vdk::render_verdict_user(hrb, umbrella_sample().question, hrb_blocks,
                                 false, 1) ==
        golden("verdict_user_hrbench.txt"));
}

TEST_CASE("verdict ablation variants match the golden bytes", "[prompts]") {
  auto info = vdk::Benchmark::of(vdk::BenchmarkKind::InfographicVQA);
  CHECK(vdk::render_verdict_user(info, nfl_sample().question, kNflBlocks, true,
                                 2) == golden("verdict_user_answers_only.txt"));
  CHECK(vdk::render_verdict_user(info, nfl_sample().question, kNflBlocks,
                                 false, 0) ==
        golden("verdict_user_no_image.txt"));

  std::vector<vdk::VerdictBlock> two(kNflBlocks.begin(),
                                     kNflBlocks.begin() + 2);
  CHECK(vdk::render_verdict_user(info, nfl_sample().question, two, false, 2) ==
        golden("verdict_user_two_models.txt"));
}

TEST_CASE("verdict phrasing tracks the expert count", "[prompts]") {
  auto info = vdk::Benchmark::of(vdk::BenchmarkKind::InfographicVQA);
  std::vector<vdk::VerdictBlock> one = {kNflBlocks[0]};
  std::string p = vdk::render_verdict_user(info, "q", one, false, 2);
  CHECK(p.find("the reasoning from one model,") != std::string::npos);
  CHECK(p.find("models") == std::string::npos);

  std::vector<vdk::VerdictBlock> five(5, kNflBlocks[0]);
  CHECK(vdk::render_verdict_user(info, "q", five, false, 2)
            .find("from five models") != std::string::npos);

  std::vector<vdk::VerdictBlock> six(6, kNflBlocks[0]);
  CHECK(vdk::render_verdict_user(info, "q", six, false, 2)
            .find("from 6 models") != std::string::npos);
}

TEST_CASE("single-image phrasing follows the benchmark", "[prompts]") {
  auto info = vdk::Benchmark::of(vdk::BenchmarkKind::InfographicVQA);
  std::string p = vdk::render_verdict_user(info, "q", kNflBlocks, false, 1);
  CHECK(p.find("Given the raw image, the question,") != std::string::npos);

  auto custom = vdk::Benchmark::custom(vdk::MetricKind::Anls,
                                       vdk::AnswerFormat::Boxed);
  std::string c = vdk::render_verdict_user(custom, "q", kNflBlocks, false, 1);
  CHECK(c.find("Given the image, the question,") != std::string::npos);
}

TEST_CASE("custom letter benchmarks ask for an option letter", "[prompts]") {
  auto custom = vdk::Benchmark::custom(vdk::MetricKind::LetterMatch,
                                       vdk::AnswerFormat::Letter);
  std::string p = vdk::render_verdict_user(custom, "q", kNflBlocks, false, 1);
  CHECK(p.find("option's letter") != std::string::npos);
}
