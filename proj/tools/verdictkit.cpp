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

// Command line front end: run a batch against live or mock endpoints, score
// and report finished runs, serve scripted mock endpoints, and sweep
// configurations. Exit code 0 means success, 1 means the run finished with
// per-sample failures (or was interrupted), 2 means a fatal error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "vdk/config.hpp"
#include "vdk/manifest.hpp"
#include "vdk/mock_server.hpp"
#include "vdk/model_client.hpp"
#include "vdk/reporting.hpp"
#include "vdk/run_store.hpp"
#include "vdk/runner.hpp"

namespace {

namespace fs = std::filesystem;

std::atomic<bool> g_cancel{false};

void handle_sigint(int) { g_cancel.store(true); }

struct RunArgs {
  std::string config;
  std::string manifest;
  std::string out;
  bool resume = false;
  bool no_cache = false;
  bool no_image_check = false;
  bool reuse_draft_cot = false;
  int limit = 0;
  int experts = 0;
  int max_concurrency = 0;
  int sample_workers = 0;
  int reference = -1;
  std::string strategy;
  std::string verdict_input;
  std::string verdict_visual;
};

struct ReportArgs {
  std::string run_dir;
  std::string manifest;
  std::string metric;
  std::string alone;
  bool json = false;
};

struct MockArgs {
  std::string scenario;
  int port = 8099;
};

struct AblateArgs {
  std::string config;
  std::string manifest;
  std::string out;
  std::string metric;
  int limit = 0;
  int reference = -1;
};

vdk::RunConfig load_config_with_overrides(const RunArgs& a) {
  vdk::RunConfig cfg = vdk::load_run_config(a.config);
  if (a.experts > 0) cfg.experts = a.experts;
  if (a.max_concurrency > 0) cfg.max_concurrency = a.max_concurrency;
  if (a.sample_workers > 0) cfg.sample_workers = a.sample_workers;
  if (a.reference >= 0) cfg.best_reference_index = a.reference;
  if (!a.strategy.empty()) cfg.strategy = vdk::parse_strategy(a.strategy);
  if (!a.verdict_input.empty())
    cfg.verdict_input = vdk::parse_verdict_input(a.verdict_input);
  if (!a.verdict_visual.empty())
    cfg.verdict_visual = vdk::parse_verdict_visual(a.verdict_visual);
  if (a.reuse_draft_cot) cfg.reuse_draft_cot = true;
  vdk::validate_config(cfg);
  return cfg;
}

std::vector<vdk::Sample> load_samples(const std::string& manifest,
                                      bool check_images, int limit) {
  auto samples = vdk::load_manifest(manifest, check_images);
  if (limit > 0 && static_cast<int>(samples.size()) > limit)
    samples.resize(static_cast<std::size_t>(limit));
  return samples;
}

int cmd_run(const RunArgs& a) {
  vdk::RunConfig cfg = load_config_with_overrides(a);
  auto samples = load_samples(a.manifest, !a.no_image_check, a.limit);

  fs::path out(a.out);
  fs::path log = out / "outcomes.jsonl";
  if (!a.resume && fs::exists(log) && fs::file_size(log) > 0) {
    std::cerr << "error: " << out.string()
              << " already holds results; pass --resume to continue it or "
                 "pick a new directory\n";
    return 2;
  }

  vdk::RunStore store(out, cfg);
  vdk::HttpModelClient client;
  std::unique_ptr<vdk::CallCache> cache;
  std::unique_ptr<vdk::CachingBroker> caching;
  vdk::CallBroker* broker = &client;
  if (!a.no_cache) {
    cache = std::make_unique<vdk::CallCache>(out / "cache.jsonl");
    caching = std::make_unique<vdk::CachingBroker>(client, *cache);
    broker = caching.get();
  }

  std::signal(SIGINT, handle_sigint);
  std::atomic<int> done{0};
  const int total = static_cast<int>(samples.size());
  auto batch = vdk::run_batch(
      *broker, cfg, samples, &store, &g_cancel,
      [&](const vdk::SampleOutcome& o, bool reused) {
        int n = ++done;
        std::cerr << "[" << n << "/" << total << "] " << o.sample_id << " "
                  << (o.failed ? "FAILED" : "ok")
                  << (reused ? " (reused)" : "") << "\n";
        if (o.failed) std::cerr << "    " << o.error << "\n";
      });

  bool interrupted = g_cancel.load();
  std::cerr << "ran " << batch.ran << ", reused " << batch.reused
            << ", failed " << batch.failed << " of " << total
            << "; results in " << out.string() << "\n";
  if (interrupted) {
    std::cerr << "interrupted; rerun with --resume to finish\n";
    return 1;
  }
  return batch.failed > 0 ? 1 : 0;
}

// Loads everything score and report share: outcomes, samples, metric, and
// the options the run was scored with.
struct LoadedRun {
  vdk::RunConfig cfg;
  std::vector<vdk::SampleOutcome> outcomes;
  std::map<std::string, vdk::Sample> samples;
  vdk::MetricKind metric;
};

LoadedRun load_run(const ReportArgs& a) {
  LoadedRun r;
  r.cfg = vdk::load_run_config(
      (fs::path(a.run_dir) / "config.json").string());
  r.outcomes = vdk::load_outcomes(fs::path(a.run_dir) / "outcomes.jsonl");
  r.samples = vdk::sample_index(vdk::load_manifest(a.manifest, false));
  r.metric =
      a.metric.empty() ? r.cfg.benchmark.metric : vdk::parse_metric(a.metric);
  return r;
}

int cmd_score(const ReportArgs& a) {
  LoadedRun r = load_run(a);
  auto report = vdk::score_run(r.outcomes, r.samples, r.metric,
                               r.cfg.metrics);
  if (a.json)
    std::cout << vdk::metrics_to_json(report).dump(2) << "\n";
  else
    std::cout << vdk::render_metrics_text(report);
  return 0;
}

int cmd_report(const ReportArgs& a) {
  LoadedRun r = load_run(a);
  auto metrics = vdk::score_run(r.outcomes, r.samples, r.metric,
                                r.cfg.metrics);

  std::map<std::string, std::optional<std::string>> alone;
  const std::map<std::string, std::optional<std::string>>* alone_ptr =
      nullptr;
  if (!a.alone.empty()) {
    alone = vdk::load_alone_answers(a.alone);
    alone_ptr = &alone;
  }
  auto recovery = vdk::recovery_analysis(r.outcomes, r.samples, r.metric,
                                         r.cfg.metrics, alone_ptr);

  std::map<std::string, vdk::Pricing> pricing;
  for (const auto& spec : r.cfg.pool) pricing[spec.name] = spec.pricing;
  pricing[r.cfg.verdict.name] = r.cfg.verdict.pricing;
  auto costs = vdk::report_costs(r.outcomes, pricing, r.cfg.verdict.name);

  if (a.json) {
    nlohmann::ordered_json j;
    j["metrics"] = vdk::metrics_to_json(metrics);
    j["recovery"] = vdk::recovery_to_json(recovery);
    j["costs"] = vdk::costs_to_json(costs);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << vdk::render_metrics_text(metrics) << "\n"
              << vdk::render_recovery_text(recovery) << "\n"
              << vdk::render_costs_text(costs);
  }
  return 0;
}

int cmd_mock(const MockArgs& a) {
  vdk::Scenario sc = vdk::Scenario::load(a.scenario);
  vdk::MockServer server(sc, a.port);
  std::cerr << "serving " << sc.rules.size() << " rules on "
            << server.base_url() << " (ctrl-c to stop)\n";
  std::signal(SIGINT, handle_sigint);
  while (!g_cancel.load())
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  std::cerr << "served " << server.total_requests() << " requests\n";
  return 0;
}

int cmd_ablate(const AblateArgs& a) {
  vdk::RunConfig cfg = vdk::load_run_config(a.config);
  if (a.reference >= 0) cfg.best_reference_index = a.reference;
  auto samples = load_samples(a.manifest, true, a.limit);
  vdk::MetricKind metric =
      a.metric.empty() ? cfg.benchmark.metric : vdk::parse_metric(a.metric);

  std::signal(SIGINT, handle_sigint);
  vdk::HttpModelClient client;
  auto result = vdk::run_ablation(
      client, cfg, samples, fs::path(a.out), metric, cfg.metrics, &g_cancel,
      [](const vdk::AblationRow& row) {
        std::cerr << row.name << " done ("
                  << (row.metrics.rows.empty()
                          ? 0.0
                          : row.metrics.rows[0].primary())
                  << ")\n";
      });

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::ostringstream table;
  table << std::left << std::setw(26) << "row" << std::right << std::setw(10)
        << "verdict" << std::setw(10) << "experts" << std::setw(10)
        << "drafts" << std::setw(8) << "failed" << "\n";
  int failed = 0;
  for (const auto& row : result.rows) {
    nlohmann::ordered_json rj;
    rj["name"] = row.name;
    rj["dir"] = row.dir.string();
    rj["failed"] = row.failed;
    rj["metrics"] = vdk::metrics_to_json(row.metrics);
    rows.push_back(std::move(rj));
    table << std::left << std::setw(26) << row.name << std::right
          << std::fixed << std::setprecision(2);
    for (std::size_t i = 0; i < 3 && i < row.metrics.rows.size(); ++i)
      table << std::setw(10) << row.metrics.rows[i].primary();
    table << std::setw(8) << row.failed << "\n";
    failed += row.failed;
  }
  nlohmann::ordered_json j;
  j["metric"] = vdk::metric_name(metric);
  j["rows"] = std::move(rows);
  vdk::write_file(fs::path(a.out) / "ablation.json", j.dump(2) + "\n");

  std::cout << table.str();
  std::cerr << "wrote " << (fs::path(a.out) / "ablation.json").string()
            << "\n";
  if (g_cancel.load()) {
    std::cerr << "interrupted before all rows finished\n";
    return 1;
  }
  return failed > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "verdictkit: several vision models draft answers, cross-scored "
      "likelihoods pick an expert panel, and one verdict call decides"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "execute the protocol over a manifest");
  run->add_option("--config", run_args.config, "run configuration JSON")
      ->required();
  run->add_option("--manifest", run_args.manifest, "sample manifest JSONL")
      ->required();
  run->add_option("--out", run_args.out, "run directory for results")
      ->required();
  run->add_flag("--resume", run_args.resume,
                "continue a directory that already holds results");
  run->add_flag("--no-cache", run_args.no_cache,
                "call endpoints directly without the on-disk call cache");
  run->add_flag("--no-image-check", run_args.no_image_check,
                "do not require manifest images to exist");
  run->add_flag("--reuse-draft-cot", run_args.reuse_draft_cot,
                "reuse round-one reasoning instead of a dedicated pass");
  run->add_option("--limit", run_args.limit, "only the first N samples");
  run->add_option("--m", run_args.experts, "experts to select");
  run->add_option("--max-concurrency", run_args.max_concurrency,
                  "parallel calls within a sample");
  run->add_option("--sample-workers", run_args.sample_workers,
                  "samples processed in parallel");
  run->add_option("--reference", run_args.reference,
                  "reference drafter index for best-reference selection");
  run->add_option("--strategy", run_args.strategy,
                  "cross-all | divergent | best-reference");
  run->add_option("--verdict-input", run_args.verdict_input,
                  "paths | answers");
  run->add_option("--verdict-visual", run_args.verdict_visual,
                  "aux | image | none");

  ReportArgs score_args;
  auto* score = app.add_subcommand("score", "accuracy table for a run");
  score->add_option("--run", score_args.run_dir, "run directory")->required();
  score->add_option("--manifest", score_args.manifest, "sample manifest")
      ->required();
  score->add_option("--metric", score_args.metric,
                    "anls | relaxed | letter (default: benchmark's)");
  score->add_flag("--json", score_args.json, "emit JSON");

  ReportArgs report_args;
  auto* report =
      app.add_subcommand("report", "accuracy, recovery, and cost report");
  report->add_option("--run", report_args.run_dir, "run directory")
      ->required();
  report->add_option("--manifest", report_args.manifest, "sample manifest")
      ->required();
  report->add_option("--metric", report_args.metric,
                     "anls | relaxed | letter (default: benchmark's)");
  report->add_option("--alone", report_args.alone,
                     "verdict-alone answers JSONL for the conditioned grid");
  report->add_flag("--json", report_args.json, "emit JSON");

  MockArgs mock_args;
  auto* mock = app.add_subcommand("mock", "serve scripted model endpoints");
  mock->add_option("--scenario", mock_args.scenario, "scenario JSON")
      ->required();
  mock->add_option("--port", mock_args.port, "port to bind (default 8099)");

  AblateArgs ablate_args;
  auto* ablate = app.add_subcommand(
      "ablate", "sweep expert count and selection strategy");
  ablate->add_option("--config", ablate_args.config, "run configuration JSON")
      ->required();
  ablate->add_option("--manifest", ablate_args.manifest, "sample manifest")
      ->required();
  ablate->add_option("--out", ablate_args.out, "sweep output directory")
      ->required();
  ablate->add_option("--metric", ablate_args.metric,
                     "anls | relaxed | letter (default: benchmark's)");
  ablate->add_option("--limit", ablate_args.limit, "only the first N samples");
  ablate->add_option("--reference", ablate_args.reference,
                     "reference drafter index for best-reference selection");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (score->parsed()) return cmd_score(score_args);
    if (report->parsed()) return cmd_report(report_args);
    if (mock->parsed()) return cmd_mock(mock_args);
    if (ablate->parsed()) return cmd_ablate(ablate_args);
  } catch (const vdk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
