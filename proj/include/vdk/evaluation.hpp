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

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vdk/core.hpp"

namespace vdk {

// ---------------------------------------------------------------------------
// Edit distance and ANLS

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

// Similarity over already-normalized strings.
inline double anls_similarity(std::string_view pred, std::string_view gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  std::size_t d = levenshtein(pred, gold);
  std::size_t m = std::max(pred.size(), gold.size());
  return 1.0 - static_cast<double>(d) / static_cast<double>(m);
}

// Max over golds of normalized Levenshtein similarity; similarities below
// the threshold contribute zero.
inline double anls(std::string_view pred, const std::vector<std::string>& golds,
                   double threshold = 0.5) {
  std::string p = normalize_answer(pred);
  double best = 0.0;
  for (const auto& g : golds) {
    double s = anls_similarity(p, normalize_answer(g));
    if (s >= threshold && s > best) best = s;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Relaxed accuracy

namespace detail {

// Parses "49%", "$1,234.50", "1 234" and friends. Returns nullopt unless the
// whole cleaned string is one number.
inline std::optional<double> parse_numeric(std::string_view raw) {
  static const std::string_view symbols[] = {
      ",", "%", "$", "\xe2\x82\xac" /* euro */, "\xc2\xa3" /* pound */,
      "\xc2\xa5" /* yen */, " ", "\t",
  };
  std::string s = trim(raw);
  std::string cleaned;
  cleaned.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    bool skipped = false;
    for (std::string_view sym : symbols) {
      if (s.compare(i, sym.size(), sym) == 0) {
        i += sym.size();
        skipped = true;
        break;
      }
    }
    if (!skipped) cleaned.push_back(s[i++]);
  }
  if (cleaned.empty()) return std::nullopt;
  const char* begin = cleaned.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + cleaned.size()) return std::nullopt;
  return v;
}

}  // namespace detail

// Numeric values match within a relative tolerance (exact match required for
// a zero gold); non-numeric values fall back to normalized string equality.
// Strict mode is string equality only.
inline bool relaxed_accuracy(std::string_view pred, std::string_view gold,
                             double rel_tol = 0.05, bool strict = false) {
  std::string np = normalize_answer(pred);
  std::string ng = normalize_answer(gold);
  if (strict) return np == ng;
  auto p = detail::parse_numeric(np);
  auto g = detail::parse_numeric(ng);
  if (p && g) {
    if (*g == 0.0) return *p == 0.0;
    return std::fabs(*p - *g) <= rel_tol * std::fabs(*g);
  }
  return np == ng;
}

inline bool relaxed_accuracy(std::string_view pred,
                             const std::vector<std::string>& golds,
                             double rel_tol = 0.05, bool strict = false) {
  for (const auto& g : golds)
    if (relaxed_accuracy(pred, g, rel_tol, strict)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Multiple-choice letter match

inline bool letter_match(std::string_view pred, std::string_view gold) {
  auto upper = [](std::string_view s) {
    std::string out(s);
    for (char& c : out)
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  };
  auto lp = detail::extract_letter(upper(pred));
  auto lg = detail::extract_letter(upper(gold));
  return lp && lg && *lp == *lg;
}

// ---------------------------------------------------------------------------
// Per-sample scoring

struct MetricOptions {
  double anls_threshold = 0.5;
  double rel_tol = 0.05;
  bool strict = false;
};

inline double metric_score(const std::optional<std::string>& pred,
                           const std::vector<std::string>& golds,
                           MetricKind metric, const MetricOptions& opt = {}) {
  if (!pred) return 0.0;
  switch (metric) {
    case MetricKind::Anls:
      return anls(*pred, golds, opt.anls_threshold);
    case MetricKind::RelaxedAccuracy:
      return relaxed_accuracy(*pred, golds, opt.rel_tol, opt.strict) ? 1.0
                                                                     : 0.0;
    case MetricKind::LetterMatch:
      for (const auto& g : golds)
        if (letter_match(*pred, g)) return 1.0;
      return 0.0;
  }
  return 0.0;
}

inline bool metric_correct(const std::optional<std::string>& pred,
                           const std::vector<std::string>& golds,
                           MetricKind metric, const MetricOptions& opt = {}) {
  double s = metric_score(pred, golds, metric, opt);
  if (metric == MetricKind::Anls) return s >= opt.anls_threshold;
  return s == 1.0;
}

}  // namespace vdk
