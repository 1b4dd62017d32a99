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

// Run-level aggregation: metric tables over a batch of outcomes, the
// recovery breakdown of where the verdict rescued the experts, and the
// dollar ledger. Failed samples count as wrong in metric rows and are
// excluded (but counted) everywhere else.

#ifndef VDK_REPORTING_HPP_
#define VDK_REPORTING_HPP_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vdk/evaluation.hpp"
#include "vdk/pipeline.hpp"

namespace vdk {

// ---------------------------------------------------------------------------
// Metric table

struct MetricsRow {
  std::string system;
  double mean_score = 0;  // in [0, 1]
  int correct = 0;
  int n = 0;

  // Headline number, percent scale.
  double primary() const { return mean_score * 100.0; }
};

struct MetricsReport {
  MetricKind metric = MetricKind::Anls;
  int n = 0;
  int failed = 0;
  std::vector<MetricsRow> rows;
};

namespace detail {

inline const Sample& sample_for(const std::map<std::string, Sample>& samples,
                                const std::string& id) {
  auto it = samples.find(id);
  if (it == samples.end())
    throw Error(Errc::InvalidConfig,
                "outcome references sample '" + id +
                    "' that the manifest does not contain");
  return it->second;
}

inline std::optional<std::string> drafts_majority(const SampleOutcome& o) {
  std::vector<std::optional<std::string>> answers;
  for (const auto& c : o.candidates)
    answers.push_back(c.valid ? c.extracted : std::nullopt);
  try {
    return majority_vote(answers);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Scores the protocol verdict against three reference systems: majority over
// the chosen experts, majority over all k drafts, and the single pool slot
// whose drafts score best on their own.
inline MetricsReport score_run(const std::vector<SampleOutcome>& outcomes,
                               const std::map<std::string, Sample>& samples,
                               MetricKind metric,
                               const MetricOptions& opt = {}) {
  if (outcomes.empty())
    throw Error(Errc::EmptyRun, "no outcomes to score");

  MetricsReport rep;
  rep.metric = metric;
  rep.n = static_cast<int>(outcomes.size());

  MetricsRow verdict{"verdict", 0, 0, rep.n};
  MetricsRow experts{"majority_experts", 0, 0, rep.n};
  MetricsRow drafts{"majority_drafts", 0, 0, rep.n};

  std::size_t k = 0;
  for (const auto& o : outcomes) k = std::max(k, o.candidates.size());
  std::vector<MetricsRow> singles(
      k, MetricsRow{"best_single_draft", 0, 0, rep.n});

  auto tally = [&](MetricsRow& row, const std::optional<std::string>& pred,
                   const std::vector<std::string>& golds) {
    row.mean_score += metric_score(pred, golds, metric, opt);
    if (metric_correct(pred, golds, metric, opt)) ++row.correct;
  };

  for (const auto& o : outcomes) {
    const Sample& s = detail::sample_for(samples, o.sample_id);
    if (o.failed) {
      ++rep.failed;
      continue;
    }
    tally(verdict, o.verdict.extracted, s.gold_answers);
    tally(experts, o.majority_expert, s.gold_answers);
    tally(drafts, detail::drafts_majority(o), s.gold_answers);
    for (std::size_t i = 0; i < o.candidates.size(); ++i)
      tally(singles[i],
            o.candidates[i].valid ? o.candidates[i].extracted : std::nullopt,
            s.gold_answers);
  }

  for (MetricsRow* row : {&verdict, &experts, &drafts})
    row->mean_score /= rep.n;
  MetricsRow best = MetricsRow{"best_single_draft", 0, 0, rep.n};
  int best_index = -1;
  for (std::size_t i = 0; i < singles.size(); ++i) {
    singles[i].mean_score /= rep.n;
    if (best_index < 0 || singles[i].mean_score > best.mean_score) {
      best = singles[i];
      best_index = static_cast<int>(i);
    }
  }
  if (best_index >= 0)
    best.system = "best_single_draft[" + std::to_string(best_index) + "]";

  rep.rows = {verdict, experts, drafts};
  if (best_index >= 0) rep.rows.push_back(best);
  return rep;
}

// ---------------------------------------------------------------------------
// Recovery breakdown

enum class ExpertStatus { MajorityCorrect, MinorityCorrect, ZeroCorrect };

inline const char* expert_status_name(ExpertStatus s) {
  switch (s) {
    case ExpertStatus::MajorityCorrect: return "majority_correct";
    case ExpertStatus::MinorityCorrect: return "minority_correct";
    case ExpertStatus::ZeroCorrect: return "zero_correct";
  }
  return "zero_correct";
}

struct RecoveryBucket {
  int count = 0;
  int verdict_correct = 0;
};

struct RecoveryReport {
  int n = 0;       // analyzed samples
  int failed = 0;  // excluded samples
  // Indexed by ExpertStatus.
  std::array<RecoveryBucket, 3> by_status;
  // grid[0] = verdict model alone was wrong, grid[1] = it was right.
  bool has_alone = false;
  std::array<std::array<RecoveryBucket, 3>, 2> grid;
};

inline ExpertStatus expert_status(const SampleOutcome& o,
                                  const std::vector<std::string>& golds,
                                  MetricKind metric,
                                  const MetricOptions& opt) {
  int total = static_cast<int>(o.paths.size());
  int correct = 0;
  for (const auto& p : o.paths)
    if (p.ok && metric_correct(p.extracted, golds, metric, opt)) ++correct;
  if (correct == 0) return ExpertStatus::ZeroCorrect;
  if (2 * correct > total) return ExpertStatus::MajorityCorrect;
  return ExpertStatus::MinorityCorrect;
}

// alone_answers maps sample id to what the verdict model said when asked by
// itself, outside the protocol. When given, every analyzed sample must have
// an entry and the report gains the wrong/right conditioned grid.
inline RecoveryReport recovery_analysis(
    const std::vector<SampleOutcome>& outcomes,
    const std::map<std::string, Sample>& samples, MetricKind metric,
    const MetricOptions& opt = {},
    const std::map<std::string, std::optional<std::string>>* alone_answers =
        nullptr) {
  if (outcomes.empty())
    throw Error(Errc::EmptyRun, "no outcomes to analyze");

  RecoveryReport rep;
  rep.has_alone = alone_answers != nullptr;
  for (const auto& o : outcomes) {
    if (o.failed) {
      ++rep.failed;
      continue;
    }
    const Sample& s = detail::sample_for(samples, o.sample_id);
    ExpertStatus status = expert_status(o, s.gold_answers, metric, opt);
    bool verdict_ok =
        metric_correct(o.verdict.extracted, s.gold_answers, metric, opt);
    auto& bucket = rep.by_status[static_cast<std::size_t>(status)];
    ++bucket.count;
    if (verdict_ok) ++bucket.verdict_correct;
    ++rep.n;

    if (alone_answers != nullptr) {
      auto it = alone_answers->find(o.sample_id);
      if (it == alone_answers->end())
        throw Error(Errc::InvalidConfig,
                    "no verdict-alone answer for sample '" + o.sample_id +
                        "'");
      bool alone_ok = metric_correct(it->second, s.gold_answers, metric, opt);
      auto& cell =
          rep.grid[alone_ok ? 1 : 0][static_cast<std::size_t>(status)];
      ++cell.count;
      if (verdict_ok) ++cell.verdict_correct;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Dollar ledger

struct ModelCost {
  long long calls = 0;
  TokenUsage usage;
  double dollars = 0;
};

struct CostReport {
  int n = 0;       // samples with any spend counted
  int cached_calls = 0;
  std::map<std::string, ModelCost> by_model;
  double total = 0;
  double verdict_dollars = 0;
  double verdict_per_sample = 0;
};

// Per-call dollar estimates summed over the run. Calls that failed carry no
// usage and cost nothing; cached calls are counted separately but priced
// like live ones so reruns report the spend the run represents.
inline CostReport report_costs(const std::vector<SampleOutcome>& outcomes,
                               const std::map<std::string, Pricing>& pricing,
                               const std::string& verdict_model) {
  if (outcomes.empty())
    throw Error(Errc::EmptyRun, "no outcomes to price");

  CostReport rep;
  rep.n = static_cast<int>(outcomes.size());
  for (const auto& o : outcomes) {
    for (const auto& r : o.records) {
      if (r.finish_reason == FinishReason::Error) continue;
      auto it = pricing.find(r.model);
      if (it == pricing.end())
        throw Error(Errc::InvalidConfig,
                    "no pricing for model '" + r.model + "'");
      double dollars = estimate_cost(r.usage, it->second);
      auto& slot = rep.by_model[r.model];
      ++slot.calls;
      slot.usage += r.usage;
      slot.dollars += dollars;
      rep.total += dollars;
      if (r.cached) ++rep.cached_calls;
      if (r.model == verdict_model) rep.verdict_dollars += dollars;
    }
  }
  rep.verdict_per_sample = rep.n > 0 ? rep.verdict_dollars / rep.n : 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization and plain-text rendering

inline nlohmann::ordered_json metrics_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["metric"] = metric_name(r.metric);
  j["n"] = r.n;
  j["failed"] = r.failed;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"system", row.system},
                    {"score", row.primary()},
                    {"correct", row.correct},
                    {"n", row.n}});
  j["rows"] = std::move(rows);
  return j;
}

inline nlohmann::ordered_json recovery_to_json(const RecoveryReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["failed"] = r.failed;
  auto status = nlohmann::ordered_json::object();
  for (int s = 0; s < 3; ++s) {
    const auto& b = r.by_status[static_cast<std::size_t>(s)];
    status[expert_status_name(static_cast<ExpertStatus>(s))] = {
        {"count", b.count}, {"verdict_correct", b.verdict_correct}};
  }
  j["by_status"] = std::move(status);
  if (r.has_alone) {
    auto grid = nlohmann::ordered_json::object();
    const char* alone_names[2] = {"alone_wrong", "alone_right"};
    for (int a = 0; a < 2; ++a) {
      auto row = nlohmann::ordered_json::object();
      for (int s = 0; s < 3; ++s) {
        const auto& b =
            r.grid[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)];
        row[expert_status_name(static_cast<ExpertStatus>(s))] = {
            {"count", b.count}, {"verdict_correct", b.verdict_correct}};
      }
      grid[alone_names[a]] = std::move(row);
    }
    j["conditioned_on_alone"] = std::move(grid);
  }
  return j;
}

inline nlohmann::ordered_json costs_to_json(const CostReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["cached_calls"] = r.cached_calls;
  auto models = nlohmann::ordered_json::object();
  for (const auto& [name, c] : r.by_model)
    models[name] = {{"calls", c.calls},
                    {"prompt_tokens", c.usage.prompt_tokens},
                    {"completion_tokens", c.usage.completion_tokens},
                    {"dollars", round_to(c.dollars, 6)}};
  j["by_model"] = std::move(models);
  j["total_dollars"] = round_to(r.total, 6);
  j["verdict_dollars"] = round_to(r.verdict_dollars, 6);
  j["verdict_per_sample"] = round_to(r.verdict_per_sample, 6);
  return j;
}

inline std::string render_metrics_text(const MetricsReport& r) {
  std::string out = "metric: " + std::string(metric_name(r.metric)) +
                    "  n=" + std::to_string(r.n) +
                    "  failed=" + std::to_string(r.failed) + "\n";
  for (const auto& row : r.rows)
    out += "  " + row.system + ": " + format_fixed(row.primary(), 2) + " (" +
           std::to_string(row.correct) + "/" + std::to_string(row.n) +
           " correct)\n";
  return out;
}

inline std::string render_recovery_text(const RecoveryReport& r) {
  std::string out = "recovery over " + std::to_string(r.n) + " samples (" +
                    std::to_string(r.failed) + " failed excluded)\n";
  for (int s = 0; s < 3; ++s) {
    const auto& b = r.by_status[static_cast<std::size_t>(s)];
    out += std::string("  ") +
           expert_status_name(static_cast<ExpertStatus>(s)) + ": " +
           std::to_string(b.count) + " samples, verdict right on " +
           std::to_string(b.verdict_correct) + "\n";
  }
  if (r.has_alone) {
    const char* alone_names[2] = {"alone wrong", "alone right"};
    for (int a = 0; a < 2; ++a)
      for (int s = 0; s < 3; ++s) {
        const auto& b =
            r.grid[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)];
        out += std::string("  [") + alone_names[a] + " x " +
               expert_status_name(static_cast<ExpertStatus>(s)) + "] " +
               std::to_string(b.count) + " samples, verdict right on " +
               std::to_string(b.verdict_correct) + "\n";
      }
  }
  return out;
}

inline std::string render_costs_text(const CostReport& r) {
  std::string out = "cost over " + std::to_string(r.n) + " samples\n";
  for (const auto& [name, c] : r.by_model)
    out += "  " + name + ": " + std::to_string(c.calls) + " calls, $" +
           format_fixed(c.dollars, 6) + "\n";
  out += "  total: $" + format_fixed(r.total, 6) + "\n";
  out += "  verdict per sample: $" + format_fixed(r.verdict_per_sample, 6) +
         "\n";
  return out;
}

}  // namespace vdk

#endif  // VDK_REPORTING_HPP_
