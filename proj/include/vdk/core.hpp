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

#include "vdk/util.hpp"

namespace vdk {

// ---------------------------------------------------------------------------
// Benchmarks

enum class BenchmarkKind {
  InfographicVQA,
  ChartMuseum,
  ChartQAPro,
  HRBench,
  Custom,
};

enum class MetricKind { Anls, RelaxedAccuracy, LetterMatch };

// How a final answer is delimited inside raw model output.
enum class AnswerFormat { Boxed, Tagged, Letter };

struct Benchmark {
  BenchmarkKind kind = BenchmarkKind::Custom;
  MetricKind metric = MetricKind::Anls;
  AnswerFormat draft_format = AnswerFormat::Boxed;
  AnswerFormat verdict_format = AnswerFormat::Boxed;

  static Benchmark of(BenchmarkKind k) {
    switch (k) {
      case BenchmarkKind::InfographicVQA:
        return {k, MetricKind::Anls, AnswerFormat::Boxed, AnswerFormat::Boxed};
      case BenchmarkKind::ChartMuseum:
        return {k, MetricKind::RelaxedAccuracy, AnswerFormat::Tagged,
                AnswerFormat::Boxed};
      case BenchmarkKind::ChartQAPro:
        return {k, MetricKind::RelaxedAccuracy, AnswerFormat::Tagged,
                AnswerFormat::Boxed};
      case BenchmarkKind::HRBench:
        return {k, MetricKind::LetterMatch, AnswerFormat::Letter,
                AnswerFormat::Letter};
      case BenchmarkKind::Custom:
        break;
    }
    return {BenchmarkKind::Custom, MetricKind::Anls, AnswerFormat::Boxed,
            AnswerFormat::Boxed};
  }

  static Benchmark custom(MetricKind metric, AnswerFormat draft) {
    Benchmark b;
    b.kind = BenchmarkKind::Custom;
    b.metric = metric;
    b.draft_format = draft;
    b.verdict_format = metric == MetricKind::LetterMatch ? AnswerFormat::Letter
                                                         : AnswerFormat::Boxed;
    return b;
  }
};

inline const char* benchmark_kind_name(BenchmarkKind k) {
  switch (k) {
    case BenchmarkKind::InfographicVQA: return "infographicvqa";
    case BenchmarkKind::ChartMuseum: return "chartmuseum";
    case BenchmarkKind::ChartQAPro: return "chartqapro";
    case BenchmarkKind::HRBench: return "hrbench";
    case BenchmarkKind::Custom: return "custom";
  }
  return "custom";
}

inline const char* metric_name(MetricKind m) {
  switch (m) {
    case MetricKind::Anls: return "anls";
    case MetricKind::RelaxedAccuracy: return "relaxed";
    case MetricKind::LetterMatch: return "letter";
  }
  return "anls";
}

inline MetricKind parse_metric(const std::string& name) {
  if (name == "anls") return MetricKind::Anls;
  if (name == "relaxed") return MetricKind::RelaxedAccuracy;
  if (name == "letter") return MetricKind::LetterMatch;
  throw Error(Errc::InvalidConfig, "unknown metric: " + name);
}

inline const char* answer_format_name(AnswerFormat f) {
  switch (f) {
    case AnswerFormat::Boxed: return "boxed";
    case AnswerFormat::Tagged: return "tagged";
    case AnswerFormat::Letter: return "letter";
  }
  return "boxed";
}

// Accepts "infographicvqa", "chartmuseum", "chartqapro", "hrbench" (dashes,
// underscores, and case are ignored) or "custom:<metric>[:<draft-format>]".
inline Benchmark parse_benchmark(std::string_view name) {
  std::string n = to_lower_ascii(trim(name));
  std::string compact;
  for (char c : n)
    if (c != '-' && c != '_' && c != ' ') compact.push_back(c);

  if (compact == "infographicvqa")
    return Benchmark::of(BenchmarkKind::InfographicVQA);
  if (compact == "chartmuseum") return Benchmark::of(BenchmarkKind::ChartMuseum);
  if (compact == "chartqapro") return Benchmark::of(BenchmarkKind::ChartQAPro);
  if (compact == "hrbench" || compact == "hrbench4k")
    return Benchmark::of(BenchmarkKind::HRBench);

  if (compact.rfind("custom:", 0) == 0) {
    auto parts = split_view(compact, ':');
    MetricKind metric;
    std::string_view m = parts.size() > 1 ? parts[1] : std::string_view{};
    if (m == "anls") metric = MetricKind::Anls;
    else if (m == "relaxed") metric = MetricKind::RelaxedAccuracy;
    else if (m == "letter") metric = MetricKind::LetterMatch;
    else
      throw Error(Errc::InvalidConfig,
                  "unknown custom metric in benchmark name: " + n);
    Benchmark b = Benchmark::custom(metric, AnswerFormat::Boxed);
    if (parts.size() > 2) {
      std::string_view f = parts[2];
      if (f == "boxed") b.draft_format = AnswerFormat::Boxed;
      else if (f == "tagged") b.draft_format = AnswerFormat::Tagged;
      else if (f == "letter") b.draft_format = AnswerFormat::Letter;
      else
        throw Error(Errc::InvalidConfig,
                    "unknown draft format in benchmark name: " + n);
    }
    return b;
  }
  throw Error(Errc::InvalidConfig, "unknown benchmark: " + std::string(name));
}

inline std::string benchmark_name(const Benchmark& b) {
  if (b.kind != BenchmarkKind::Custom) return benchmark_kind_name(b.kind);
  return std::string("custom:") + metric_name(b.metric) + ":" +
         answer_format_name(b.draft_format);
}

// ---------------------------------------------------------------------------
// Data records

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& o) {
    prompt_tokens += o.prompt_tokens;
    completion_tokens += o.completion_tokens;
    return *this;
  }
  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct Sample {
  std::string id;
  std::string question;
  std::string image_path;
  std::string aux_image_path;  // empty when the benchmark has no aux image
  std::vector<std::string> gold_answers;
  std::string question_type;  // only meaningful for chartqapro-style sets
};

struct CandidateAnswer {
  int model_index = -1;
  std::string raw_text;
  std::optional<std::string> extracted;
  bool valid = false;
};

struct ReasoningPath {
  int expert_index = -1;
  std::string cot_text;
  std::optional<std::string> extracted;
  TokenUsage usage;
  bool ok = false;
};

// ---------------------------------------------------------------------------
// Answer extraction

namespace detail {

inline std::optional<std::string> extract_boxed(std::string_view text) {
  constexpr std::string_view marker = "\\boxed{";
  std::optional<std::string> last_complete;
  std::size_t last_open = std::string_view::npos;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = text.find(marker, pos);
    if (hit == std::string_view::npos) break;
    std::size_t body = hit + marker.size();
    last_open = body;
    int depth = 1;
    std::size_t i = body;
    for (; i < text.size(); ++i) {
      if (text[i] == '{') ++depth;
      else if (text[i] == '}' && --depth == 0) break;
    }
    if (i < text.size())
      last_complete = std::string(text.substr(body, i - body));
    pos = body;
  }

  std::string content;
  if (last_complete) content = *last_complete;
  else if (last_open != std::string_view::npos)
    content = std::string(text.substr(last_open));
  else
    return std::nullopt;

  // Unwrap accidental double boxing.
  for (;;) {
    std::string t = trim(content);
    if (t.size() > marker.size() && t.rfind(marker, 0) == 0 &&
        t.back() == '}') {
      int depth = 1;
      std::size_t i = marker.size();
      for (; i < t.size(); ++i) {
        if (t[i] == '{') ++depth;
        else if (t[i] == '}' && --depth == 0) break;
      }
      if (i == t.size() - 1) {
        content = t.substr(marker.size(), i - marker.size());
        continue;
      }
    }
    content = std::move(t);
    break;
  }
  if (content.empty()) return std::nullopt;
  return content;
}

inline std::optional<std::string> extract_tagged(std::string_view text) {
  constexpr std::string_view open = "<answer>";
  constexpr std::string_view close = "</answer>";
  std::optional<std::string> last_complete;
  std::size_t last_open = std::string_view::npos;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = text.find(open, pos);
    if (hit == std::string_view::npos) break;
    std::size_t body = hit + open.size();
    last_open = body;
    std::size_t end = text.find(close, body);
    if (end != std::string_view::npos)
      last_complete = std::string(text.substr(body, end - body));
    pos = body;
  }

  std::string content;
  if (last_complete) content = *last_complete;
  else if (last_open != std::string_view::npos)
    content = std::string(text.substr(last_open));
  else
    return std::nullopt;

  content = trim(content);
  if (content.empty()) return std::nullopt;
  return content;
}

inline std::optional<std::string> extract_letter(std::string_view text) {
  auto is_alnum = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  };
  auto lines = split_view(text, '\n');
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::string_view line = *it;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (c < 'A' || c > 'E') continue;
      bool left_ok = i == 0 || !is_alnum(line[i - 1]);
      bool right_ok = i + 1 >= line.size() || !is_alnum(line[i + 1]);
      if (left_ok && right_ok) return std::string(1, c);
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Pulls the final answer out of raw model output. Boxed keeps the last
// complete \boxed{...} span (balanced braces); tagged keeps the last complete
// <answer>...</answer> block. Either salvages text after a final unclosed
// marker so truncated generations still count. Letter takes the first
// standalone A-E scanning lines bottom-up. Returns nullopt when nothing
// usable is present.
inline std::optional<std::string> extract_answer(std::string_view raw,
                                                 AnswerFormat format) {
  switch (format) {
    case AnswerFormat::Boxed: return detail::extract_boxed(raw);
    case AnswerFormat::Tagged: return detail::extract_tagged(raw);
    case AnswerFormat::Letter: return detail::extract_letter(raw);
  }
  return std::nullopt;
}

// Canonical comparison form: trim, strip matching outer quote pairs,
// collapse internal whitespace runs to one space, lowercase ASCII.
// Idempotent.
inline std::string normalize_answer(std::string_view raw) {
  std::string s = trim(raw);
  while (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                           (s.front() == '\'' && s.back() == '\''))) {
    s = trim(std::string_view(s).substr(1, s.size() - 2));
  }
  s = collapse_ws(s);
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace vdk
