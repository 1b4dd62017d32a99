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

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vdk/model_types.hpp"

namespace vdk {

// One deterministic stub: which model and prompt it answers for, and what
// comes back. Rules are tried in file order; the first match wins.
struct ScenarioRule {
  std::string model;
  std::string match_substring;  // matched against the readable prompt text
  std::string match_digest;     // matched against the endpoint's prompt digest
  std::string response_text;
  TokenUsage usage;
  std::vector<double> token_logprobs;  // scoring endpoints only
  bool has_logprobs = false;
  std::string answer_span_text;  // echo scoring: where the answer sits
  std::string finish_reason = "stop";
  int latency_ms = 0;
  std::string failure_mode;  // "", "timeout", "http_429", "http_500", "malformed"
  int fail_times = -1;       // -1 keeps failing forever
};

struct Scenario {
  std::vector<ScenarioRule> rules;

  static Scenario parse(const nlohmann::ordered_json& j) {
    Scenario sc;
    if (!j.is_object() || !j.contains("rules") || !j["rules"].is_array())
      throw Error(Errc::ParseError, "scenario needs a top-level rules array");
    for (std::size_t n = 0; n < j["rules"].size(); ++n) {
      const auto& r = j["rules"][n];
      auto where = [n] { return " (rule " + std::to_string(n) + ")"; };
      if (!r.is_object())
        throw Error(Errc::ParseError, "rule must be an object" + where());
      ScenarioRule rule;
      rule.model = r.value("model", std::string{});
      if (rule.model.empty())
        throw Error(Errc::ParseError, "rule needs a model" + where());
      rule.match_substring = r.value("substring", std::string{});
      rule.match_digest = r.value("digest", std::string{});
      if (rule.match_substring.empty() == rule.match_digest.empty())
        throw Error(Errc::ParseError,
                    "rule needs exactly one of substring or digest" + where());
      rule.response_text = r.value("response_text", std::string{});
      if (r.contains("usage")) {
        rule.usage.prompt_tokens = r["usage"].value("prompt_tokens", 0ll);
        rule.usage.completion_tokens =
            r["usage"].value("completion_tokens", 0ll);
      }
      if (r.contains("token_logprobs")) {
        if (!r["token_logprobs"].is_array())
          throw Error(Errc::ParseError,
                      "token_logprobs must be an array" + where());
        for (const auto& v : r["token_logprobs"])
          rule.token_logprobs.push_back(v.get<double>());
        rule.has_logprobs = true;
      }
      rule.answer_span_text = r.value("answer_span_text", std::string{});
      rule.finish_reason = r.value("finish_reason", std::string{"stop"});
      rule.latency_ms = r.value("latency_ms", 0);
      rule.failure_mode = r.value("failure_mode", std::string{});
      if (!rule.failure_mode.empty() && rule.failure_mode != "timeout" &&
          rule.failure_mode != "http_429" && rule.failure_mode != "http_500" &&
          rule.failure_mode != "malformed")
        throw Error(Errc::ParseError,
                    "unknown failure_mode: " + rule.failure_mode + where());
      rule.fail_times = r.value("fail_times", -1);
      sc.rules.push_back(std::move(rule));
    }
    return sc;
  }

  static Scenario parse_text(const std::string& text) {
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(text);
    } catch (const std::exception& e) {
      throw Error(Errc::ParseError,
                  std::string("scenario is not valid JSON: ") + e.what());
    }
    return parse(j);
  }

  static Scenario load(const std::filesystem::path& p) {
    return parse_text(read_file(p));
  }
};

inline nlohmann::ordered_json scenario_to_json(const Scenario& sc) {
  auto rules = nlohmann::ordered_json::array();
  for (const auto& r : sc.rules) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    if (!r.match_substring.empty()) j["substring"] = r.match_substring;
    if (!r.match_digest.empty()) j["digest"] = r.match_digest;
    if (!r.response_text.empty()) j["response_text"] = r.response_text;
    if (r.usage.prompt_tokens != 0 || r.usage.completion_tokens != 0)
      j["usage"] = {{"prompt_tokens", r.usage.prompt_tokens},
                    {"completion_tokens", r.usage.completion_tokens}};
    if (r.has_logprobs) j["token_logprobs"] = r.token_logprobs;
    if (!r.answer_span_text.empty())
      j["answer_span_text"] = r.answer_span_text;
    if (r.finish_reason != "stop") j["finish_reason"] = r.finish_reason;
    if (r.latency_ms != 0) j["latency_ms"] = r.latency_ms;
    if (!r.failure_mode.empty()) {
      j["failure_mode"] = r.failure_mode;
      if (r.fail_times >= 0) j["fail_times"] = r.fail_times;
    }
    rules.push_back(std::move(j));
  }
  return nlohmann::ordered_json{{"rules", std::move(rules)}};
}

}  // namespace vdk
