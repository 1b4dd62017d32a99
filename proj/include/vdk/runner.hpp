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

// Batch execution over a sample manifest, with resume, cancellation, and
// configuration sweeps that share one call cache.

#ifndef VDK_RUNNER_HPP_
#define VDK_RUNNER_HPP_

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vdk/manifest.hpp"
#include "vdk/pipeline.hpp"
#include "vdk/reporting.hpp"
#include "vdk/run_store.hpp"
#include "vdk/util.hpp"

namespace vdk {

struct BatchResult {
  // Outcomes in manifest order for every sample that was processed this
  // invocation or reused from the store; cancelled samples are absent.
  std::vector<SampleOutcome> outcomes;
  int ran = 0;
  int reused = 0;
  int failed = 0;
};

// Runs the protocol over all samples. Model calls within a sample fan out
// over one pool sized by max_concurrency while samples themselves fan out
// over another sized by sample_workers. With a store, previously completed
// samples are reused instead of re-run, every fresh outcome is appended as
// it finishes, and the store is compacted into manifest order at the end.
// A set cancel flag stops new samples from starting; samples already in
// flight run to completion.
inline BatchResult run_batch(
    CallBroker& broker, const RunConfig& cfg,
    const std::vector<Sample>& samples, RunStore* store = nullptr,
    const std::atomic<bool>* cancel = nullptr,
    const std::function<void(const SampleOutcome&, bool reused)>& on_done =
        {}) {
  validate_config(cfg);

  std::unique_ptr<ThreadPool> call_pool;
  if (cfg.max_concurrency > 1)
    call_pool = std::make_unique<ThreadPool>(
        static_cast<std::size_t>(cfg.max_concurrency));

  BatchResult result;
  std::vector<std::optional<SampleOutcome>> slots(samples.size());
  std::vector<bool> was_reused(samples.size(), false);
  std::atomic<int> ran{0}, reused{0};
  std::mutex done_mu;

  auto process = [&](std::size_t i) {
    if (cancel && cancel->load()) return;
    const Sample& sample = samples[i];
    if (store) {
      if (auto prior = store->completed(sample.id)) {
        slots[i] = std::move(*prior);
        was_reused[i] = true;
        ++reused;
        if (on_done) {
          std::lock_guard<std::mutex> lk(done_mu);
          on_done(*slots[i], true);
        }
        return;
      }
    }
    SampleOutcome out = run_sample(broker, cfg, sample, call_pool.get());
    if (store) store->record(out);
    if (on_done) {
      std::lock_guard<std::mutex> lk(done_mu);
      on_done(out, false);
    }
    slots[i] = std::move(out);
    ++ran;
  };

  if (cfg.sample_workers > 1 && samples.size() > 1) {
    ThreadPool sample_pool(static_cast<std::size_t>(cfg.sample_workers));
    std::vector<std::future<void>> futs;
    futs.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      futs.push_back(sample_pool.submit([&process, i] { process(i); }));
    for (auto& f : futs) f.get();
  } else {
    for (std::size_t i = 0; i < samples.size(); ++i) process(i);
  }

  std::vector<std::string> ids;
  ids.reserve(samples.size());
  for (const auto& s : samples) ids.push_back(s.id);
  if (store) store->finalize(ids);

  for (auto& slot : slots) {
    if (!slot) continue;
    if (slot->failed) ++result.failed;
    result.outcomes.push_back(std::move(*slot));
  }
  result.ran = ran.load();
  result.reused = reused.load();
  return result;
}

struct AblationRow {
  std::string name;
  RunConfig config;
  std::filesystem::path dir;
  MetricsReport metrics;
  int failed = 0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
};

// Sweeps expert count from 1 to min(5, k) under the base strategy, then
// each selection strategy at the base expert count. Every row runs
// in its own store under out_root while sharing one call cache, so repeated
// prompts and scoring requests are paid for once across the whole sweep.
inline AblationResult run_ablation(
    HttpModelClient& client, const RunConfig& base,
    const std::vector<Sample>& samples,
    const std::filesystem::path& out_root, MetricKind metric,
    const MetricOptions& opt = {},
    const std::atomic<bool>* cancel = nullptr,
    const std::function<void(const AblationRow&)>& on_row = {}) {
  validate_config(base);
  std::filesystem::create_directories(out_root);
  CallCache cache(out_root / "cache.jsonl");
  CachingBroker broker(client, cache);
  auto index = sample_index(samples);

  std::vector<std::pair<std::string, RunConfig>> plan;
  int max_m = std::min(5, static_cast<int>(base.pool.size()));
  for (int m = 1; m <= max_m; ++m) {
    RunConfig cfg = base;
    cfg.experts = m;
    plan.emplace_back("m=" + std::to_string(m), cfg);
  }
  for (Strategy s : {Strategy::CrossAll, Strategy::Divergent,
                     Strategy::BestReference}) {
    if (s == Strategy::BestReference && base.best_reference_index < 0)
      continue;
    RunConfig cfg = base;
    cfg.strategy = s;
    plan.emplace_back(std::string("strategy=") + strategy_name(s), cfg);
  }

  AblationResult result;
  for (auto& [name, cfg] : plan) {
    if (cancel && cancel->load()) break;
    AblationRow row;
    row.name = name;
    row.config = cfg;
    row.dir = out_root / name;
    RunStore store(row.dir, cfg);
    BatchResult batch = run_batch(broker, cfg, samples, &store, cancel);
    row.metrics = score_run(batch.outcomes, index, metric, opt);
    row.failed = batch.failed;
    if (on_row) on_row(row);
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace vdk

#endif  // VDK_RUNNER_HPP_
