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

// Run configuration as JSON. String values may reference environment
// variables as ${VAR} or ${VAR:-default}; a reference without a default to a
// variable that is not set is an error, so configs fail loudly instead of
// silently pointing at nothing.

#ifndef VDK_CONFIG_HPP_
#define VDK_CONFIG_HPP_

#include <cstdlib>
#include <set>
#include <string>

#include "json.hpp"
#include "vdk/pipeline.hpp"
#include "vdk/util.hpp"

namespace vdk {

inline std::string interpolate_env(const std::string& in) {
  std::string out;
  std::size_t pos = 0;
  while (pos < in.size()) {
    std::size_t open = in.find("${", pos);
    if (open == std::string::npos) {
      out.append(in, pos, std::string::npos);
      break;
    }
    out.append(in, pos, open - pos);
    std::size_t close = in.find('}', open + 2);
    if (close == std::string::npos)
      throw Error(Errc::InvalidConfig,
                  "unterminated ${...} reference in: " + in);
    std::string ref = in.substr(open + 2, close - open - 2);
    std::string name = ref;
    std::string fallback;
    bool has_fallback = false;
    std::size_t sep = ref.find(":-");
    if (sep != std::string::npos) {
      name = ref.substr(0, sep);
      fallback = ref.substr(sep + 2);
      has_fallback = true;
    }
    if (name.empty())
      throw Error(Errc::InvalidConfig,
                  "empty environment reference in: " + in);
    const char* value = std::getenv(name.c_str());
    if (value != nullptr) {
      out += value;
    } else if (has_fallback) {
      out += fallback;
    } else {
      throw Error(Errc::InvalidConfig,
                  "environment variable " + name +
                      " is not set and has no default");
    }
    pos = close + 1;
  }
  return out;
}

inline void interpolate_env_tree(nlohmann::ordered_json& j) {
  if (j.is_string())
    j = interpolate_env(j.get<std::string>());
  else if (j.is_object() || j.is_array())
    for (auto& child : j) interpolate_env_tree(child);
}

inline nlohmann::ordered_json model_spec_to_json(const ModelSpec& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["base_url"] = s.base_url;
  j["api_style"] = api_style_name(s.api_style);
  j["scoring"] = scoring_support_name(s.supports_scoring);
  j["pricing"] = {{"input_per_million", s.pricing.input_per_million},
                  {"output_per_million", s.pricing.output_per_million}};
  j["request_timeout_s"] = s.request_timeout_s;
  j["max_retries"] = s.max_retries;
  j["retry_backoff_ms"] = s.retry_backoff_ms;
  if (!s.api_key_env.empty()) j["api_key_env"] = s.api_key_env;
  return j;
}

inline ModelSpec model_spec_from_json(const nlohmann::ordered_json& j) {
  ModelSpec s;
  try {
    s.name = j.at("name").get<std::string>();
    s.base_url = j.at("base_url").get<std::string>();
    if (j.contains("api_style"))
      s.api_style = parse_api_style(j.at("api_style").get<std::string>());
    if (j.contains("scoring"))
      s.supports_scoring =
          parse_scoring_support(j.at("scoring").get<std::string>());
    if (j.contains("pricing")) {
      s.pricing.input_per_million =
          j.at("pricing").at("input_per_million").get<double>();
      s.pricing.output_per_million =
          j.at("pricing").at("output_per_million").get<double>();
    }
    if (j.contains("request_timeout_s"))
      s.request_timeout_s = j.at("request_timeout_s").get<double>();
    if (j.contains("max_retries"))
      s.max_retries = j.at("max_retries").get<int>();
    if (j.contains("retry_backoff_ms"))
      s.retry_backoff_ms = j.at("retry_backoff_ms").get<int>();
    if (j.contains("api_key_env"))
      s.api_key_env = j.at("api_key_env").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig,
                std::string("bad model spec: ") + e.what());
  }
  if (s.name.empty())
    throw Error(Errc::InvalidConfig, "model spec without a name");
  if (s.base_url.empty())
    throw Error(Errc::InvalidConfig,
                "model " + s.name + " has no base_url");
  return s;
}

inline nlohmann::ordered_json run_config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["benchmark"] = benchmark_name(cfg.benchmark);
  j["strategy"] = strategy_name(cfg.strategy);
  j["experts"] = cfg.experts;
  if (cfg.best_reference_index >= 0)
    j["best_reference_index"] = cfg.best_reference_index;
  j["verdict_input"] = verdict_input_name(cfg.verdict_input);
  j["verdict_visual"] = verdict_visual_name(cfg.verdict_visual);
  j["reuse_draft_cot"] = cfg.reuse_draft_cot;
  j["temperature"] = cfg.temperature;
  j["max_answer_tokens"] = cfg.max_answer_tokens;
  j["max_reasoning_tokens"] = cfg.max_reasoning_tokens;
  j["max_verdict_tokens"] = cfg.max_verdict_tokens;
  j["max_concurrency"] = cfg.max_concurrency;
  j["sample_workers"] = cfg.sample_workers;
  j["max_image_side"] = cfg.max_image_side;
  j["metrics"] = {{"anls_threshold", cfg.metrics.anls_threshold},
                  {"rel_tol", cfg.metrics.rel_tol},
                  {"strict", cfg.metrics.strict}};
  if (!cfg.question_type_templates.empty()) {
    auto t = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.question_type_templates) t[k] = v;
    j["question_type_templates"] = std::move(t);
  }
  auto pool = nlohmann::ordered_json::array();
  for (const auto& spec : cfg.pool) pool.push_back(model_spec_to_json(spec));
  j["pool"] = std::move(pool);
  j["verdict"] = model_spec_to_json(cfg.verdict);
  return j;
}

// Parses an already env-interpolated tree. Unknown keys are rejected so a
// typo cannot silently fall back to a default.
inline RunConfig run_config_from_json(const nlohmann::ordered_json& j) {
  static const std::set<std::string> known{
      "benchmark",        "strategy",
      "experts",          "best_reference_index",
      "verdict_input",    "verdict_visual",
      "reuse_draft_cot",  "temperature",
      "max_answer_tokens", "max_reasoning_tokens",
      "max_verdict_tokens", "max_concurrency",
      "sample_workers",   "max_image_side",
      "metrics",          "question_type_templates",
      "pool",             "verdict"};
  if (!j.is_object())
    throw Error(Errc::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (known.find(key) == known.end())
      throw Error(Errc::InvalidConfig, "unknown config key: " + key);
  }

  RunConfig cfg;
  try {
    cfg.benchmark = parse_benchmark(j.at("benchmark").get<std::string>());
    if (j.contains("strategy"))
      cfg.strategy = parse_strategy(j.at("strategy").get<std::string>());
    if (j.contains("experts")) cfg.experts = j.at("experts").get<int>();
    if (j.contains("best_reference_index"))
      cfg.best_reference_index = j.at("best_reference_index").get<int>();
    if (j.contains("verdict_input"))
      cfg.verdict_input =
          parse_verdict_input(j.at("verdict_input").get<std::string>());
    if (j.contains("verdict_visual"))
      cfg.verdict_visual =
          parse_verdict_visual(j.at("verdict_visual").get<std::string>());
    if (j.contains("reuse_draft_cot"))
      cfg.reuse_draft_cot = j.at("reuse_draft_cot").get<bool>();
    if (j.contains("temperature"))
      cfg.temperature = j.at("temperature").get<double>();
    if (j.contains("max_answer_tokens"))
      cfg.max_answer_tokens = j.at("max_answer_tokens").get<int>();
    if (j.contains("max_reasoning_tokens"))
      cfg.max_reasoning_tokens = j.at("max_reasoning_tokens").get<int>();
    if (j.contains("max_verdict_tokens"))
      cfg.max_verdict_tokens = j.at("max_verdict_tokens").get<int>();
    if (j.contains("max_concurrency"))
      cfg.max_concurrency = j.at("max_concurrency").get<int>();
    if (j.contains("sample_workers"))
      cfg.sample_workers = j.at("sample_workers").get<int>();
    if (j.contains("max_image_side"))
      cfg.max_image_side = j.at("max_image_side").get<int>();
    if (j.contains("metrics")) {
      const auto& m = j.at("metrics");
      if (m.contains("anls_threshold"))
        cfg.metrics.anls_threshold = m.at("anls_threshold").get<double>();
      if (m.contains("rel_tol"))
        cfg.metrics.rel_tol = m.at("rel_tol").get<double>();
      if (m.contains("strict"))
        cfg.metrics.strict = m.at("strict").get<bool>();
    }
    if (j.contains("question_type_templates"))
      for (const auto& [k, v] : j.at("question_type_templates").items())
        cfg.question_type_templates[k] = v.get<std::string>();
    for (const auto& spec : j.at("pool"))
      cfg.pool.push_back(model_spec_from_json(spec));
    cfg.verdict = model_spec_from_json(j.at("verdict"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("bad config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

inline RunConfig parse_run_config_text(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError,
                std::string("config is not valid JSON: ") + e.what());
  }
  interpolate_env_tree(j);
  return run_config_from_json(j);
}

inline RunConfig load_run_config(const std::string& path) {
  return parse_run_config_text(read_file(path));
}

}  // namespace vdk

#endif  // VDK_CONFIG_HPP_
