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

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vdk/model_types.hpp"

namespace vdk {

enum class Strategy { CrossAll, BestReference, Divergent };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::CrossAll: return "cross-all";
    case Strategy::BestReference: return "best-reference";
    case Strategy::Divergent: return "divergent";
  }
  return "cross-all";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "cross-all" || s == "cross_all") return Strategy::CrossAll;
  if (s == "best-reference" || s == "best_reference")
    return Strategy::BestReference;
  if (s == "divergent") return Strategy::Divergent;
  throw Error(Errc::InvalidConfig, "unknown strategy: " + std::string(s));
}

// Pairwise disagreement matrix. relative[j*k+i] holds how far scorer j's
// likelihood of candidate i's answer sits from scorer j's likelihood of its
// own answer. Rows of invalid scorers are zero so they drop out of column
// sums; off-diagonal cells of invalid candidates are +inf so they sort last.
struct ConsensusMatrix {
  int k = 0;
  std::vector<double> relative;
  std::vector<char> valid;

  double at(int scorer, int candidate) const {
    return relative[static_cast<std::size_t>(scorer) * k + candidate];
  }
};

struct SelectionResult {
  Strategy strategy = Strategy::CrossAll;
  std::vector<int> chosen;
  std::vector<double> global_scores;
  bool short_selection = false;
};

inline ConsensusMatrix build_matrix(int k, const std::vector<NllScore>& scores,
                                    const std::vector<char>& valid) {
  if (k <= 0 || static_cast<int>(valid.size()) != k)
    throw Error(Errc::InvalidConfig, "matrix size does not match validity mask");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> nll(static_cast<std::size_t>(k) * k, 0.0);
  std::vector<char> have(static_cast<std::size_t>(k) * k, 0);
  for (const auto& s : scores) {
    if (s.scorer_index < 0 || s.scorer_index >= k || s.candidate_index < 0 ||
        s.candidate_index >= k)
      throw Error(Errc::InvalidConfig, "score index out of range");
    if (s.mean_nll < 0.0 || s.token_count < 1)
      throw Error(Errc::MalformedResponse,
                  "score must have non-negative mean and at least one token");
    std::size_t idx =
        static_cast<std::size_t>(s.scorer_index) * k + s.candidate_index;
    nll[idx] = s.mean_nll;
    have[idx] = 1;
  }

  ConsensusMatrix m;
  m.k = k;
  m.valid = valid;
  m.relative.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) {
      std::size_t idx = static_cast<std::size_t>(j) * k + i;
      if (!valid[i]) {
        m.relative[idx] = i == j ? 0.0 : kInf;
        continue;
      }
      if (!valid[j]) continue;
      if (i == j) continue;
      std::size_t own = static_cast<std::size_t>(j) * k + j;
      if (!have[idx] || !have[own])
        throw Error(Errc::MissingScore,
                    "no score for scorer " + std::to_string(j) +
                        " on candidate " + std::to_string(i));
      m.relative[idx] = std::abs(nll[idx] - nll[own]);
    }
  }
  return m;
}

// Column sums excluding the diagonal, ascending scorer order. Invalid
// candidates score +inf.
inline std::vector<double> global_scores(const ConsensusMatrix& m) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> out(m.k, kInf);
  for (int i = 0; i < m.k; ++i) {
    if (!m.valid[i]) continue;
    double s = 0.0;
    for (int j = 0; j < m.k; ++j)
      if (j != i) s += m.at(j, i);
    out[i] = s;
  }
  return out;
}

inline SelectionResult select_experts(const ConsensusMatrix& m,
                                      Strategy strategy, int want,
                                      std::optional<int> reference = {}) {
  if (want < 1)
    throw Error(Errc::InvalidConfig, "expert count must be at least 1");

  std::vector<int> valid_idx;
  for (int i = 0; i < m.k; ++i)
    if (m.valid[i]) valid_idx.push_back(i);
  if (valid_idx.empty())
    throw Error(Errc::NoValidCandidates, "no valid candidates to select from");

  SelectionResult r;
  r.strategy = strategy;
  r.global_scores = global_scores(m);

  std::size_t take = std::min<std::size_t>(want, valid_idx.size());
  if (strategy == Strategy::CrossAll || strategy == Strategy::Divergent) {
    std::vector<int> order = valid_idx;
    const auto& g = r.global_scores;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (g[a] != g[b])
        return strategy == Strategy::CrossAll ? g[a] < g[b] : g[a] > g[b];
      return a < b;
    });
    r.chosen.assign(order.begin(), order.begin() + take);
  } else {
    if (!reference)
      throw Error(Errc::MissingReference, "best-reference needs a reference");
    int ref = *reference;
    if (ref < 0 || ref >= m.k || !m.valid[ref])
      throw Error(Errc::MissingReference,
                  "reference candidate " + std::to_string(ref) +
                      " is invalid or out of range");
    std::vector<int> peers;
    for (int p : valid_idx)
      if (p != ref) peers.push_back(p);
    std::sort(peers.begin(), peers.end(), [&](int a, int b) {
      double fa = m.at(ref, a) + m.at(a, ref);
      double fb = m.at(ref, b) + m.at(b, ref);
      if (fa != fb) return fa < fb;
      return a < b;
    });
    r.chosen.push_back(ref);
    for (std::size_t i = 0; i + 1 < take && i < peers.size(); ++i)
      r.chosen.push_back(peers[i]);
  }
  r.short_selection = static_cast<int>(r.chosen.size()) < want;
  return r;
}

// Plurality over normalized answers; absent entries abstain. Ties go to the
// answer whose earliest backing model has the lowest index.
inline std::string majority_vote(
    const std::vector<std::optional<std::string>>& answers) {
  struct Tally {
    int count = 0;
    int first_index = std::numeric_limits<int>::max();
  };
  std::map<std::string, Tally> tallies;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (!answers[i]) continue;
    auto& t = tallies[normalize_answer(*answers[i])];
    ++t.count;
    t.first_index = std::min(t.first_index, static_cast<int>(i));
  }
  if (tallies.empty())
    throw Error(Errc::NoValidCandidates, "no answers to vote over");

  const std::string* winner = nullptr;
  Tally best;
  for (const auto& [answer, t] : tallies) {
    if (t.count > best.count ||
        (t.count == best.count && t.first_index < best.first_index)) {
      best = t;
      winner = &answer;
    }
  }
  return *winner;
}

}  // namespace vdk
