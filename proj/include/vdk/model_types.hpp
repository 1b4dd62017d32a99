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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vdk/core.hpp"

namespace vdk {

enum class ApiStyle { Chat, Completions };
enum class ScoringSupport { EchoLogprobs, ScoreRoute, None };

inline const char* api_style_name(ApiStyle s) {
  return s == ApiStyle::Chat ? "chat" : "completions";
}

inline ApiStyle parse_api_style(std::string_view s) {
  if (s == "chat") return ApiStyle::Chat;
  if (s == "completions") return ApiStyle::Completions;
  throw Error(Errc::InvalidConfig, "unknown api style: " + std::string(s));
}

inline const char* scoring_support_name(ScoringSupport s) {
  switch (s) {
    case ScoringSupport::EchoLogprobs: return "echo_logprobs";
    case ScoringSupport::ScoreRoute: return "score_route";
    case ScoringSupport::None: return "none";
  }
  return "none";
}

inline ScoringSupport parse_scoring_support(std::string_view s) {
  if (s == "echo_logprobs") return ScoringSupport::EchoLogprobs;
  if (s == "score_route") return ScoringSupport::ScoreRoute;
  if (s == "none") return ScoringSupport::None;
  throw Error(Errc::InvalidConfig, "unknown scoring support: " + std::string(s));
}

struct Pricing {
  double input_per_million = 0.0;
  double output_per_million = 0.0;
};

struct ModelSpec {
  std::string name;
  std::string base_url;
  ApiStyle api_style = ApiStyle::Chat;
  ScoringSupport supports_scoring = ScoringSupport::None;
  Pricing pricing;
  double request_timeout_s = 30.0;
  int max_retries = 2;
  int retry_backoff_ms = 200;
  std::string api_key_env;
};

enum class FinishReason { Stop, Length, Error };

inline const char* finish_reason_name(FinishReason f) {
  switch (f) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Error: return "error";
  }
  return "error";
}

inline FinishReason parse_finish_reason(std::string_view s) {
  if (s == "length") return FinishReason::Length;
  if (s == "error") return FinishReason::Error;
  return FinishReason::Stop;
}

struct GenerationRecord {
  std::string model;
  std::string prompt_digest;
  std::string output_text;
  TokenUsage usage;
  long long latency_ms = 0;
  FinishReason finish_reason = FinishReason::Stop;
  bool cached = false;
};

struct NllScore {
  int scorer_index = -1;
  int candidate_index = -1;
  double mean_nll = 0.0;  // mean negative log-likelihood, nats per token
  long long token_count = 0;
};

struct PromptParts {
  std::string system;
  std::string user;
  std::vector<std::string> image_paths;
};

struct GenParams {
  double temperature = 0.0;
  int max_tokens = 512;
};

// ---------------------------------------------------------------------------
// Cost accounting

inline double estimate_cost(const TokenUsage& usage, const Pricing& p) {
  double dollars =
      static_cast<double>(usage.prompt_tokens) * p.input_per_million / 1e6 +
      static_cast<double>(usage.completion_tokens) * p.output_per_million / 1e6;
  return round_to(dollars, 6);
}

// ---------------------------------------------------------------------------
// Request identity. Digests are content-addressed: they cover exactly the
// bytes a request would send, so equal digests mean an interchangeable call.

inline std::string generation_digest(const PromptParts& parts,
                                     const std::vector<std::string>& image_digests) {
  std::string buf = "gen";
  buf += '\x1f';
  buf += parts.system;
  buf += '\x1f';
  buf += parts.user;
  buf += '\x1f';
  for (const auto& d : image_digests) {
    buf += d;
    buf += ';';
  }
  return digest_hex(buf);
}

inline std::string score_digest(std::string_view question,
                                std::string_view answer,
                                std::string_view image_digest) {
  std::string buf = "score";
  buf += '\x1f';
  buf += question;
  buf += '\x1f';
  buf += answer;
  buf += '\x1f';
  buf += image_digest;
  return digest_hex(buf);
}

inline std::string params_digest(const GenParams& g) {
  return digest_hex("t=" + format_g6(g.temperature) +
                    ";mt=" + std::to_string(g.max_tokens));
}

inline std::string score_params_digest() { return digest_hex("nll-echo-v1"); }

// ---------------------------------------------------------------------------
// Call transport seam. The pipeline talks to endpoints only through this
// interface; the HTTP client and the caching layer both implement it.

class CallBroker {
 public:
  virtual ~CallBroker() = default;

  virtual GenerationRecord generate(const ModelSpec& spec,
                                    const PromptParts& parts,
                                    const GenParams& params) = 0;

  // Returns mean_nll and token_count; scorer/candidate indices are the
  // caller's business.
  virtual NllScore score_answer_nll(const ModelSpec& spec,
                                    const std::string& image_path,
                                    const std::string& question,
                                    const std::string& answer) = 0;
};

}  // namespace vdk
