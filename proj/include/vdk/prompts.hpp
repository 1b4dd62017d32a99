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

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vdk/core.hpp"

// Prompt text is contract, not style: downstream runs are only comparable
// when every byte of these templates is stable. Change nothing here without
// updating the golden files.

namespace vdk {

inline constexpr std::string_view kVerdictSystemPrompt =
    "You are a vision-and-language judge. Follow the instructions strictly.";

namespace prompts {

// Trailing spaces inside the think/answer scaffold are intentional.
inline constexpr std::string_view kThinkAnswerScaffold =
    "Please first generate your reasoning process and then provide the user "
    "with the answer. Use the following format:\n"
    "\n"
    "<think>\n"
    "... your thinking process here ... \n"
    "</think> \n"
    "<answer> \n"
    "... your final answer (entity(s) or number) ...\n"
    "</answer>";

inline constexpr std::string_view kDirectAnswerScaffold =
    "Please provide your final answer directly without reasoning. Use the "
    "following format:\n"
    "\n"
    "<answer> \n"
    "... your final answer (entity(s) or number) ...\n"
    "</answer>";

inline std::string question_lead(const Benchmark& b, const Sample& s,
                                 const std::map<std::string, std::string>&
                                     question_type_templates) {
  if (b.kind == BenchmarkKind::ChartQAPro) {
    auto it = question_type_templates.find(s.question_type);
    if (it != question_type_templates.end())
      return replace_all(it->second, "{QUESTION}", s.question);
    return "Question: " + s.question;
  }
  if (b.kind == BenchmarkKind::ChartMuseum)
    return "Please answer the question using the chart image.\n\nQuestion: " +
           s.question;
  return "Question: " + s.question;
}

inline std::string number_word(std::size_t n) {
  switch (n) {
    case 1: return "one";
    case 2: return "two";
    case 3: return "three";
    case 4: return "four";
    case 5: return "five";
    default: return std::to_string(n);
  }
}

}  // namespace prompts

// ---------------------------------------------------------------------------
// Round 1: short draft answers.

inline std::string render_draft_prompt(
    const Benchmark& b, const Sample& s,
    const std::map<std::string, std::string>& question_type_templates = {}) {
  switch (b.draft_format) {
    case AnswerFormat::Boxed:
      return prompts::question_lead(b, s, question_type_templates) +
             " Please answer the question using a single word or phrase "
             "enclosed within \\boxed{}.";
    case AnswerFormat::Letter:
      return prompts::question_lead(b, s, question_type_templates) +
             " Please answer the question with the option's letter enclosed "
             "within \\boxed{}.";
    case AnswerFormat::Tagged:
      return prompts::question_lead(b, s, question_type_templates) + "\n\n" +
             std::string(prompts::kDirectAnswerScaffold);
  }
  return s.question;
}

// ---------------------------------------------------------------------------
// Round 2: step-by-step reasoning paths.

inline std::string render_reasoning_prompt(
    const Benchmark& b, const Sample& s,
    const std::map<std::string, std::string>& question_type_templates = {}) {
  switch (b.draft_format) {
    case AnswerFormat::Boxed:
    case AnswerFormat::Letter:
      return prompts::question_lead(b, s, question_type_templates) +
             " Please think step-by-step about the image to answer the "
             "question using a single word or phrase enclosed within "
             "\\boxed{}.";
    case AnswerFormat::Tagged:
      return prompts::question_lead(b, s, question_type_templates) + "\n\n" +
             std::string(prompts::kThinkAnswerScaffold);
  }
  return s.question;
}

// ---------------------------------------------------------------------------
// Verdict synthesis.

struct VerdictBlock {
  std::string reasoning;
  std::string answer;
};

// image_count is the number of images actually attached to the verdict call:
// 2 means raw plus layout-annotated aux, 1 means raw only, 0 means text only.
inline std::string render_verdict_user(const Benchmark& b,
                                       const std::string& question,
                                       const std::vector<VerdictBlock>& blocks,
                                       bool answers_only, int image_count) {
  std::string out = "Question: \n" + question + "\n";
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out += "--- Model " + std::to_string(i + 1) + " ---\n";
    if (!answers_only) out += "Reasoning: \n" + blocks[i].reasoning + "\n";
    out += "Proposed Answer: " + blocks[i].answer + "\n";
  }

  std::string given;
  if (image_count >= 2) {
    given = "Given the raw image, the layout-annotated image, the question, "
            "and ";
  } else if (image_count == 1) {
    bool plain = b.kind == BenchmarkKind::HRBench ||
                 b.kind == BenchmarkKind::Custom;
    given = plain ? "Given the image, the question, and "
                  : "Given the raw image, the question, and ";
  } else {
    given = "Given the question and ";
  }

  std::string source = answers_only ? "the answers from " : "the reasoning from ";
  source += prompts::number_word(blocks.size());
  source += blocks.size() == 1 ? " model" : " models";

  std::string ask;
  switch (b.kind) {
    case BenchmarkKind::InfographicVQA:
    case BenchmarkKind::ChartMuseum:
      ask = ", please give the final answer using a single word or phrase "
            "enclosed within \\boxed{}.";
      break;
    case BenchmarkKind::ChartQAPro:
      ask = ", please directly give the final answer enclosed within "
            "\\boxed{}.";
      break;
    case BenchmarkKind::HRBench:
      ask = ", please directly give the final answer with the option's "
            "letter enclosed within \\boxed{}.";
      break;
    case BenchmarkKind::Custom:
      ask = b.verdict_format == AnswerFormat::Letter
                ? ", please directly give the final answer with the option's "
                  "letter enclosed within \\boxed{}."
                : ", please give the final answer using a single word or "
                  "phrase enclosed within \\boxed{}.";
      break;
  }

  out += given + source + ask;
  return out;
}

}  // namespace vdk
