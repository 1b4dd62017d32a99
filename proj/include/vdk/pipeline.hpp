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

// One sample end to end: k draft answers, pairwise answer scoring, expert
// selection, expert reasoning, and a single verdict call that produces the
// final answer. Talks to models only through CallBroker so tests and caching
// layers can slot in without touching this file.

#ifndef VDK_PIPELINE_HPP_
#define VDK_PIPELINE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vdk/consensus.hpp"
#include "vdk/core.hpp"
#include "vdk/evaluation.hpp"
#include "vdk/model_types.hpp"
#include "vdk/prompts.hpp"
#include "vdk/util.hpp"

namespace vdk {

// What the verdict call gets to read from the experts.
enum class VerdictInput { ReasoningPaths, AnswersOnly };

// Which images ride along with the verdict call.
enum class VerdictVisual { ImagePlusAux, ImageOnly, None };

inline const char* verdict_input_name(VerdictInput v) {
  switch (v) {
    case VerdictInput::ReasoningPaths: return "paths";
    case VerdictInput::AnswersOnly: return "answers";
  }
  return "paths";
}

inline VerdictInput parse_verdict_input(std::string_view s) {
  if (s == "paths") return VerdictInput::ReasoningPaths;
  if (s == "answers") return VerdictInput::AnswersOnly;
  throw Error(Errc::InvalidConfig,
              "unknown verdict input '" + std::string(s) +
                  "', expected paths or answers");
}

inline const char* verdict_visual_name(VerdictVisual v) {
  switch (v) {
    case VerdictVisual::ImagePlusAux: return "aux";
    case VerdictVisual::ImageOnly: return "image";
    case VerdictVisual::None: return "none";
  }
  return "image";
}

inline VerdictVisual parse_verdict_visual(std::string_view s) {
  if (s == "aux") return VerdictVisual::ImagePlusAux;
  if (s == "image") return VerdictVisual::ImageOnly;
  if (s == "none") return VerdictVisual::None;
  throw Error(Errc::InvalidConfig,
              "unknown verdict visual '" + std::string(s) +
                  "', expected aux, image, or none");
}

struct RunConfig {
  Benchmark benchmark = Benchmark::of(BenchmarkKind::InfographicVQA);
  std::vector<ModelSpec> pool;
  ModelSpec verdict;
  int experts = 3;
  Strategy strategy = Strategy::CrossAll;
  int best_reference_index = -1;
  VerdictInput verdict_input = VerdictInput::ReasoningPaths;
  VerdictVisual verdict_visual = VerdictVisual::ImageOnly;
  bool reuse_draft_cot = false;
  double temperature = 0.0;
  int max_answer_tokens = 128;
  int max_reasoning_tokens = 1024;
  int max_verdict_tokens = 512;
  int max_concurrency = 8;
  int sample_workers = 2;
  MetricOptions metrics;
  std::map<std::string, std::string> question_type_templates;
  int max_image_side = 0;
};

inline void validate_config(const RunConfig& cfg) {
  int k = static_cast<int>(cfg.pool.size());
  if (k < 2)
    throw Error(Errc::InvalidConfig, "draft pool needs at least two models");
  if (cfg.experts < 1 || cfg.experts > k)
    throw Error(Errc::InvalidConfig,
                "expert count must be between 1 and the pool size");
  for (const auto& spec : cfg.pool) {
    if (spec.name.empty())
      throw Error(Errc::InvalidConfig, "draft model with empty name");
    if (spec.supports_scoring == ScoringSupport::None)
      throw Error(Errc::InvalidConfig,
                  "draft model " + spec.name +
                      " cannot score answers; every pool model must");
  }
  if (cfg.verdict.name.empty())
    throw Error(Errc::InvalidConfig, "verdict model with empty name");
  if (cfg.strategy == Strategy::BestReference &&
      (cfg.best_reference_index < 0 || cfg.best_reference_index >= k))
    throw Error(Errc::InvalidConfig,
                "best-reference strategy needs a reference index inside the "
                "pool");
  if (cfg.verdict.api_style == ApiStyle::Completions &&
      cfg.verdict_visual != VerdictVisual::None)
    throw Error(Errc::InvalidConfig,
                "a completions-style verdict model cannot receive images; "
                "set the verdict visual to none");
  if (cfg.temperature < 0)
    throw Error(Errc::InvalidConfig, "temperature must be non-negative");
  if (cfg.max_answer_tokens < 1 || cfg.max_reasoning_tokens < 1 ||
      cfg.max_verdict_tokens < 1)
    throw Error(Errc::InvalidConfig, "token limits must be positive");
  if (cfg.max_concurrency < 1 || cfg.sample_workers < 1)
    throw Error(Errc::InvalidConfig, "worker counts must be positive");
}

struct VerdictResult {
  std::string raw_text;
  std::optional<std::string> extracted;
  TokenUsage usage;
  bool ok = false;
  std::string error;
};

struct SampleOutcome {
  std::string sample_id;
  bool failed = false;
  std::string error;
  std::vector<CandidateAnswer> candidates;
  std::vector<std::string> candidate_errors;
  std::vector<NllScore> scores;
  ConsensusMatrix matrix;
  SelectionResult selection;
  std::vector<ReasoningPath> paths;
  std::vector<std::string> path_errors;
  std::optional<std::string> majority_expert;
  VerdictResult verdict;
  std::vector<GenerationRecord> records;
  std::map<std::string, TokenUsage> usage_by_model;
  long long total_latency_ms = 0;  // in-memory only, never serialized
};

namespace detail {

// Runs fn(0..n-1) on the pool when one is given, inline otherwise. Results
// come back in index order regardless of completion order.
template <class Fn>
auto parallel_map(ThreadPool* pool, std::size_t n, Fn fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out;
  out.reserve(n);
  if (pool == nullptr || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<R>> futs;
  futs.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    futs.push_back(pool->submit([&fn, i] { return fn(i); }));
  for (auto& f : futs) out.push_back(f.get());
  return out;
}

struct CallResult {
  GenerationRecord record;
  bool ok = false;
  Errc code = Errc::EndpointUnavailable;
  std::string error;
};

inline CallResult guarded_generate(CallBroker& broker, const ModelSpec& spec,
                                   const PromptParts& parts,
                                   const GenParams& params) {
  CallResult out;
  try {
    out.record = broker.generate(spec, parts, params);
    out.ok = true;
  } catch (const Error& e) {
    out.record.model = spec.name;
    out.record.finish_reason = FinishReason::Error;
    out.code = e.code();
    out.error = e.what();
  }
  return out;
}

}  // namespace detail

struct DraftStage {
  std::vector<CandidateAnswer> candidates;
  std::vector<GenerationRecord> records;
  std::vector<std::string> errors;
};

// Round one: every pool model answers the question from the raw image. With
// reuse_draft_cot the round-one prompt is the reasoning prompt so the
// generations double as expert reasoning later.
inline DraftStage draft_answers(CallBroker& broker, const RunConfig& cfg,
                                const Sample& sample, ThreadPool* pool) {
  const std::size_t k = cfg.pool.size();
  const std::string prompt =
      cfg.reuse_draft_cot
          ? render_reasoning_prompt(cfg.benchmark, sample,
                                             cfg.question_type_templates)
          : render_draft_prompt(cfg.benchmark, sample,
                                         cfg.question_type_templates);
  PromptParts parts{"", prompt, {sample.image_path}};
  GenParams params{cfg.temperature, cfg.reuse_draft_cot
                                        ? cfg.max_reasoning_tokens
                                        : cfg.max_answer_tokens};

  auto results = detail::parallel_map(pool, k, [&](std::size_t i) {
    return detail::guarded_generate(broker, cfg.pool[i], parts, params);
  });

  DraftStage out;
  out.candidates.resize(k);
  out.records.resize(k);
  out.errors.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto& r = results[i];
    out.records[i] = std::move(r.record);
    out.errors[i] = std::move(r.error);
    auto& c = out.candidates[i];
    c.model_index = static_cast<int>(i);
    c.raw_text = out.records[i].output_text;
    if (r.ok) {
      c.extracted = extract_answer(c.raw_text, cfg.benchmark.draft_format);
      c.valid = c.extracted.has_value();
    }
  }
  return out;
}

struct ScoreStage {
  std::vector<NllScore> scores;
  ConsensusMatrix matrix;
  SelectionResult selection;
};

// Round two: every valid drafter scores every distinct valid answer, the
// relative matrix is built from those likelihoods, and the strategy picks the
// experts. Identical answer strings are scored once per scorer and fanned out
// so equal answers always land on equal cells.
inline ScoreStage consensus_select(CallBroker& broker, const RunConfig& cfg,
                                   const Sample& sample,
                                   const std::vector<CandidateAnswer>& cands,
                                   ThreadPool* pool) {
  const int k = static_cast<int>(cands.size());
  std::vector<char> valid(cands.size());
  for (int i = 0; i < k; ++i) valid[i] = cands[i].valid ? 1 : 0;

  std::vector<std::string> answers;
  std::vector<int> answer_of(cands.size(), -1);
  for (int i = 0; i < k; ++i) {
    if (!cands[i].valid) continue;
    const std::string& a = *cands[i].extracted;
    auto it = std::find(answers.begin(), answers.end(), a);
    if (it == answers.end()) {
      answer_of[i] = static_cast<int>(answers.size());
      answers.push_back(a);
    } else {
      answer_of[i] = static_cast<int>(it - answers.begin());
    }
  }

  struct Probe {
    int scorer = 0;
    int answer = 0;
  };
  std::vector<Probe> probes;
  for (int j = 0; j < k; ++j) {
    if (!cands[j].valid) continue;
    for (std::size_t a = 0; a < answers.size(); ++a)
      probes.push_back({j, static_cast<int>(a)});
  }

  struct ProbeResult {
    double mean_nll = 0;
    int token_count = 0;
    bool ok = false;
    Errc code = Errc::MissingScore;
    std::string error;
  };
  auto results = detail::parallel_map(pool, probes.size(), [&](std::size_t p) {
    ProbeResult out;
    try {
      NllScore s = broker.score_answer_nll(cfg.pool[probes[p].scorer],
                                           sample.image_path, sample.question,
                                           answers[probes[p].answer]);
      out.mean_nll = s.mean_nll;
      out.token_count = s.token_count;
      out.ok = true;
    } catch (const Error& e) {
      out.code = e.code();
      out.error = e.what();
    }
    return out;
  });

  std::vector<std::vector<const ProbeResult*>> by_scorer(
      cands.size(), std::vector<const ProbeResult*>(answers.size(), nullptr));
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& r = results[p];
    if (!r.ok)
      throw Error(r.code, "scoring call failed for model " +
                              cfg.pool[probes[p].scorer].name + " on answer '" +
                              answers[probes[p].answer] + "': " + r.error);
    by_scorer[probes[p].scorer][probes[p].answer] = &r;
  }

  ScoreStage out;
  for (int j = 0; j < k; ++j) {
    if (!cands[j].valid) continue;
    for (int i = 0; i < k; ++i) {
      if (!cands[i].valid) continue;
      const ProbeResult* r = by_scorer[j][answer_of[i]];
      out.scores.push_back(NllScore{j, i, r->mean_nll, r->token_count});
    }
  }

  out.matrix = build_matrix(k, out.scores, valid);
  std::optional<int> reference;
  if (cfg.strategy == Strategy::BestReference)
    reference = cfg.best_reference_index;
  out.selection = select_experts(out.matrix, cfg.strategy, cfg.experts,
                                 reference);
  return out;
}

struct ReasoningStage {
  std::vector<ReasoningPath> paths;
  std::vector<GenerationRecord> records;
  std::vector<std::string> errors;
};

// Round three: each chosen expert reasons step by step over the raw image.
// With reuse_draft_cot the round-one generations are reused verbatim and no
// calls go out.
inline ReasoningStage draft_reasoning(CallBroker& broker, const RunConfig& cfg,
                                      const Sample& sample,
                                      const std::vector<CandidateAnswer>& cands,
                                      const SelectionResult& selection,
                                      ThreadPool* pool) {
  ReasoningStage out;
  const auto& chosen = selection.chosen;
  out.paths.resize(chosen.size());
  out.errors.resize(chosen.size());

  if (cfg.reuse_draft_cot) {
    for (std::size_t s = 0; s < chosen.size(); ++s) {
      const auto& c = cands[static_cast<std::size_t>(chosen[s])];
      auto& p = out.paths[s];
      p.expert_index = chosen[s];
      p.cot_text = c.raw_text;
      p.extracted = c.extracted;
      p.ok = c.valid;
    }
    return out;
  }

  const std::string prompt = render_reasoning_prompt(
      cfg.benchmark, sample, cfg.question_type_templates);
  PromptParts parts{"", prompt, {sample.image_path}};
  GenParams params{cfg.temperature, cfg.max_reasoning_tokens};

  auto results = detail::parallel_map(pool, chosen.size(), [&](std::size_t s) {
    return detail::guarded_generate(
        broker, cfg.pool[static_cast<std::size_t>(chosen[s])], parts, params);
  });

  out.records.resize(chosen.size());
  for (std::size_t s = 0; s < chosen.size(); ++s) {
    auto& r = results[s];
    out.records[s] = std::move(r.record);
    out.errors[s] = std::move(r.error);
    auto& p = out.paths[s];
    p.expert_index = chosen[s];
    p.usage = out.records[s].usage;
    if (r.ok) {
      p.cot_text = out.records[s].output_text;
      p.extracted = extract_answer(p.cot_text, cfg.benchmark.draft_format);
      p.ok = p.extracted.has_value();
    }
  }
  return out;
}

// Builds the single verdict call from the usable paths. Paths without an
// extractable answer are dropped; an empty block list is an error.
inline PromptParts assemble_verdict_prompt(const RunConfig& cfg,
                                           const Sample& sample,
                                           const std::vector<ReasoningPath>&
                                               paths) {
  const bool answers_only = cfg.verdict_input == VerdictInput::AnswersOnly;
  std::vector<VerdictBlock> blocks;
  for (const auto& p : paths) {
    if (!p.ok || !p.extracted) continue;
    blocks.push_back({answers_only ? std::string() : p.cot_text,
                      *p.extracted});
  }
  if (blocks.empty())
    throw Error(Errc::NoPaths,
                "no usable expert output to put in front of the verdict "
                "model for sample " + sample.id);

  std::vector<std::string> images;
  switch (cfg.verdict_visual) {
    case VerdictVisual::ImagePlusAux:
      images.push_back(sample.image_path);
      if (!sample.aux_image_path.empty())
        images.push_back(sample.aux_image_path);
      break;
    case VerdictVisual::ImageOnly:
      images.push_back(sample.image_path);
      break;
    case VerdictVisual::None:
      break;
  }

  std::string user = render_verdict_user(
      cfg.benchmark, sample.question, blocks, answers_only,
      static_cast<int>(images.size()));
  return PromptParts{std::string(kVerdictSystemPrompt),
                     std::move(user), std::move(images)};
}

// The full protocol for one sample. Per-call failures inside a stage degrade
// gracefully where the protocol allows it; anything that leaves no way to
// reach a verdict marks the outcome failed instead of throwing.
inline SampleOutcome run_sample(CallBroker& broker, const RunConfig& cfg,
                                const Sample& sample,
                                ThreadPool* pool = nullptr) {
  SampleOutcome out;
  out.sample_id = sample.id;
  long long started = now_ms();
  try {
    DraftStage drafts = draft_answers(broker, cfg, sample, pool);
    out.candidates = std::move(drafts.candidates);
    out.candidate_errors = std::move(drafts.errors);
    for (auto& r : drafts.records) out.records.push_back(std::move(r));
    if (std::none_of(out.candidates.begin(), out.candidates.end(),
                     [](const CandidateAnswer& c) { return c.valid; }))
      throw Error(Errc::AllDraftsFailed,
                  "no draft produced an extractable answer for sample " +
                      sample.id);

    ScoreStage scored =
        consensus_select(broker, cfg, sample, out.candidates, pool);
    out.scores = std::move(scored.scores);
    out.matrix = std::move(scored.matrix);
    out.selection = std::move(scored.selection);

    if (cfg.verdict_input == VerdictInput::AnswersOnly) {
      out.paths.resize(out.selection.chosen.size());
      out.path_errors.resize(out.selection.chosen.size());
      for (std::size_t s = 0; s < out.selection.chosen.size(); ++s) {
        const auto& c =
            out.candidates[static_cast<std::size_t>(out.selection.chosen[s])];
        auto& p = out.paths[s];
        p.expert_index = out.selection.chosen[s];
        p.extracted = c.extracted;
        p.ok = c.valid;
      }
    } else {
      ReasoningStage reasoning = draft_reasoning(
          broker, cfg, sample, out.candidates, out.selection, pool);
      out.paths = std::move(reasoning.paths);
      out.path_errors = std::move(reasoning.errors);
      for (auto& r : reasoning.records) out.records.push_back(std::move(r));
      if (std::none_of(out.paths.begin(), out.paths.end(),
                       [](const ReasoningPath& p) { return p.ok; }))
        throw Error(Errc::AllExpertsFailed,
                    "no expert produced a usable reasoning path for sample " +
                        sample.id);
    }

    std::vector<std::optional<std::string>> expert_answers;
    for (const auto& p : out.paths)
      expert_answers.push_back(p.ok ? p.extracted : std::nullopt);
    try {
      out.majority_expert = majority_vote(expert_answers);
    } catch (const Error&) {
      out.majority_expert = std::nullopt;
    }

    PromptParts verdict_parts = assemble_verdict_prompt(cfg, sample,
                                                        out.paths);
    GenParams verdict_params{cfg.temperature, cfg.max_verdict_tokens};
    detail::CallResult v = detail::guarded_generate(
        broker, cfg.verdict, verdict_parts, verdict_params);
    if (!v.ok)
      throw Error(v.code, "verdict call failed: " + v.error);
    out.verdict.raw_text = v.record.output_text;
    out.verdict.extracted =
        extract_answer(out.verdict.raw_text, cfg.benchmark.verdict_format);
    out.verdict.usage = v.record.usage;
    out.verdict.ok = true;
    out.records.push_back(std::move(v.record));
  } catch (const Error& e) {
    out.failed = true;
    out.error = std::string(errc_name(e.code())) + ": " + e.what();
  }

  for (const auto& r : out.records)
    if (r.finish_reason != FinishReason::Error)
      out.usage_by_model[r.model] += r.usage;
  out.total_latency_ms = now_ms() - started;
  return out;
}

// ---------------------------------------------------------------------------
// Outcome serialization. Stage files must be byte-stable across reruns, so
// latency never goes in and key order is fixed. Infinities map to null.

namespace detail {

inline nlohmann::ordered_json json_real(double v) {
  if (std::isinf(v) || std::isnan(v)) return nullptr;
  return v;
}

inline double real_from(const nlohmann::ordered_json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json usage_to_json(const TokenUsage& u) {
  return {{"prompt_tokens", u.prompt_tokens},
          {"completion_tokens", u.completion_tokens}};
}

inline TokenUsage usage_from_json(const nlohmann::ordered_json& j) {
  return TokenUsage{j.at("prompt_tokens").get<long long>(),
                    j.at("completion_tokens").get<long long>()};
}

inline nlohmann::ordered_json outcome_to_json(const SampleOutcome& o) {
  nlohmann::ordered_json j;
  j["id"] = o.sample_id;
  j["failed"] = o.failed;
  j["error"] = o.error;

  auto cands = nlohmann::ordered_json::array();
  for (const auto& c : o.candidates) {
    nlohmann::ordered_json cj;
    cj["model_index"] = c.model_index;
    cj["raw_text"] = c.raw_text;
    cj["extracted"] =
        c.extracted ? nlohmann::ordered_json(*c.extracted) : nullptr;
    cj["valid"] = c.valid;
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  j["candidate_errors"] = o.candidate_errors;

  auto scores = nlohmann::ordered_json::array();
  for (const auto& s : o.scores)
    scores.push_back({{"scorer", s.scorer_index},
                      {"candidate", s.candidate_index},
                      {"mean_nll", s.mean_nll},
                      {"token_count", s.token_count}});
  j["scores"] = std::move(scores);

  nlohmann::ordered_json mj;
  mj["k"] = o.matrix.k;
  auto mvalid = nlohmann::ordered_json::array();
  for (char v : o.matrix.valid) mvalid.push_back(v != 0);
  mj["valid"] = std::move(mvalid);
  auto rows = nlohmann::ordered_json::array();
  for (int r = 0; r < o.matrix.k; ++r) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 0; c < o.matrix.k; ++c)
      row.push_back(detail::json_real(o.matrix.at(r, c)));
    rows.push_back(std::move(row));
  }
  mj["relative"] = std::move(rows);
  j["matrix"] = std::move(mj);

  nlohmann::ordered_json sj;
  sj["strategy"] = strategy_name(o.selection.strategy);
  sj["chosen"] = o.selection.chosen;
  auto globals = nlohmann::ordered_json::array();
  for (double g : o.selection.global_scores)
    globals.push_back(detail::json_real(g));
  sj["global_scores"] = std::move(globals);
  sj["short_selection"] = o.selection.short_selection;
  j["selection"] = std::move(sj);

  auto paths = nlohmann::ordered_json::array();
  for (const auto& p : o.paths) {
    nlohmann::ordered_json pj;
    pj["expert_index"] = p.expert_index;
    pj["cot_text"] = p.cot_text;
    pj["extracted"] =
        p.extracted ? nlohmann::ordered_json(*p.extracted) : nullptr;
    pj["usage"] = usage_to_json(p.usage);
    pj["ok"] = p.ok;
    paths.push_back(std::move(pj));
  }
  j["paths"] = std::move(paths);
  j["path_errors"] = o.path_errors;

  j["majority_expert"] = o.majority_expert
                             ? nlohmann::ordered_json(*o.majority_expert)
                             : nullptr;

  nlohmann::ordered_json vj;
  vj["raw_text"] = o.verdict.raw_text;
  vj["extracted"] = o.verdict.extracted
                        ? nlohmann::ordered_json(*o.verdict.extracted)
                        : nullptr;
  vj["usage"] = usage_to_json(o.verdict.usage);
  vj["ok"] = o.verdict.ok;
  vj["error"] = o.verdict.error;
  j["verdict"] = std::move(vj);

  auto records = nlohmann::ordered_json::array();
  for (const auto& r : o.records)
    records.push_back({{"model", r.model},
                       {"prompt_digest", r.prompt_digest},
                       {"usage", usage_to_json(r.usage)},
                       {"finish_reason", finish_reason_name(r.finish_reason)},
                       {"cached", r.cached}});
  j["records"] = std::move(records);

  nlohmann::ordered_json uj = nlohmann::ordered_json::object();
  for (const auto& [model, usage] : o.usage_by_model)
    uj[model] = usage_to_json(usage);
  j["usage_by_model"] = std::move(uj);
  return j;
}

inline SampleOutcome outcome_from_json(const nlohmann::ordered_json& j) {
  SampleOutcome o;
  o.sample_id = j.at("id").get<std::string>();
  o.failed = j.at("failed").get<bool>();
  o.error = j.at("error").get<std::string>();

  for (const auto& cj : j.at("candidates")) {
    CandidateAnswer c;
    c.model_index = cj.at("model_index").get<int>();
    c.raw_text = cj.at("raw_text").get<std::string>();
    if (!cj.at("extracted").is_null())
      c.extracted = cj.at("extracted").get<std::string>();
    c.valid = cj.at("valid").get<bool>();
    o.candidates.push_back(std::move(c));
  }
  o.candidate_errors =
      j.at("candidate_errors").get<std::vector<std::string>>();

  for (const auto& sj : j.at("scores"))
    o.scores.push_back(NllScore{sj.at("scorer").get<int>(),
                                sj.at("candidate").get<int>(),
                                sj.at("mean_nll").get<double>(),
                                sj.at("token_count").get<int>()});

  const auto& mj = j.at("matrix");
  o.matrix.k = mj.at("k").get<int>();
  for (const auto& v : mj.at("valid"))
    o.matrix.valid.push_back(v.get<bool>() ? 1 : 0);
  for (const auto& row : mj.at("relative"))
    for (const auto& cell : row)
      o.matrix.relative.push_back(detail::real_from(cell));

  const auto& sj = j.at("selection");
  o.selection.strategy = parse_strategy(sj.at("strategy").get<std::string>());
  o.selection.chosen = sj.at("chosen").get<std::vector<int>>();
  for (const auto& g : sj.at("global_scores"))
    o.selection.global_scores.push_back(detail::real_from(g));
  o.selection.short_selection = sj.at("short_selection").get<bool>();

  for (const auto& pj : j.at("paths")) {
    ReasoningPath p;
    p.expert_index = pj.at("expert_index").get<int>();
    p.cot_text = pj.at("cot_text").get<std::string>();
    if (!pj.at("extracted").is_null())
      p.extracted = pj.at("extracted").get<std::string>();
    p.usage = usage_from_json(pj.at("usage"));
    p.ok = pj.at("ok").get<bool>();
    o.paths.push_back(std::move(p));
  }
  o.path_errors = j.at("path_errors").get<std::vector<std::string>>();

  if (!j.at("majority_expert").is_null())
    o.majority_expert = j.at("majority_expert").get<std::string>();

  const auto& vj = j.at("verdict");
  o.verdict.raw_text = vj.at("raw_text").get<std::string>();
  if (!vj.at("extracted").is_null())
    o.verdict.extracted = vj.at("extracted").get<std::string>();
  o.verdict.usage = usage_from_json(vj.at("usage"));
  o.verdict.ok = vj.at("ok").get<bool>();
  o.verdict.error = vj.at("error").get<std::string>();

  for (const auto& rj : j.at("records")) {
    GenerationRecord r;
    r.model = rj.at("model").get<std::string>();
    r.prompt_digest = rj.at("prompt_digest").get<std::string>();
    r.usage = usage_from_json(rj.at("usage"));
    r.finish_reason =
        parse_finish_reason(rj.at("finish_reason").get<std::string>());
    r.cached = rj.at("cached").get<bool>();
    o.records.push_back(std::move(r));
  }

  for (const auto& [model, usage] : j.at("usage_by_model").items())
    o.usage_by_model[model] = usage_from_json(usage);
  return o;
}

}  // namespace vdk

#endif  // VDK_PIPELINE_HPP_
