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

// On-disk run state. A run directory holds the config it was started with,
// an append-only call cache keyed by content digests, the outcome log, and
// per-stage view files. Outcomes append in completion order during the run
// and are rewritten in manifest order at the end, so finished directories
// are byte-stable regardless of scheduling.

#ifndef VDK_RUN_STORE_HPP_
#define VDK_RUN_STORE_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vdk/config.hpp"
#include "vdk/model_client.hpp"
#include "vdk/pipeline.hpp"
#include "vdk/util.hpp"

namespace vdk {

// Append-only JSONL cache of model calls, keyed by (kind, model, request
// digest, params digest). Reopening replays the log; the last line for a
// key wins. Failures are never cached.
class CallCache {
 public:
  CallCache() = default;

  explicit CallCache(const std::filesystem::path& path) : path_(path) {
    std::filesystem::create_directories(path.parent_path());
    if (std::filesystem::exists(path_)) replay();
    out_.open(path_, std::ios::app);
    if (!out_)
      throw Error(Errc::IoError, "cannot open cache: " + path_.string());
  }

  std::optional<GenerationRecord> lookup_generation(
      const std::string& model, const std::string& prompt_digest,
      const std::string& params) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = gen_.find(key("gen", model, prompt_digest, params));
    if (it == gen_.end()) return std::nullopt;
    GenerationRecord r = it->second;
    r.cached = true;
    r.latency_ms = 0;
    return r;
  }

  void put_generation(const std::string& model,
                      const std::string& prompt_digest,
                      const std::string& params,
                      const GenerationRecord& rec) {
    nlohmann::ordered_json j;
    j["kind"] = "gen";
    j["model"] = model;
    j["digest"] = prompt_digest;
    j["params"] = params;
    j["output_text"] = rec.output_text;
    j["usage"] = usage_to_json(rec.usage);
    j["finish_reason"] = finish_reason_name(rec.finish_reason);
    std::lock_guard<std::mutex> lk(mu_);
    GenerationRecord stored = rec;
    stored.cached = false;
    stored.latency_ms = 0;
    gen_[key("gen", model, prompt_digest, params)] = stored;
    append(j);
  }

  std::optional<NllScore> lookup_score(const std::string& model,
                                       const std::string& request_digest) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = score_.find(key("score", model, request_digest, ""));
    if (it == score_.end()) return std::nullopt;
    return it->second;
  }

  void put_score(const std::string& model, const std::string& request_digest,
                 const NllScore& s) {
    nlohmann::ordered_json j;
    j["kind"] = "score";
    j["model"] = model;
    j["digest"] = request_digest;
    j["mean_nll"] = s.mean_nll;
    j["token_count"] = s.token_count;
    std::lock_guard<std::mutex> lk(mu_);
    score_[key("score", model, request_digest, "")] = s;
    append(j);
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return gen_.size() + score_.size();
  }

 private:
  static std::string key(const std::string& kind, const std::string& model,
                         const std::string& digest,
                         const std::string& params) {
    return kind + "\x1f" + model + "\x1f" + digest + "\x1f" + params;
  }

  void replay() {
    std::string text = read_file(path_);
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      try {
        auto j = nlohmann::ordered_json::parse(line);
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "gen") {
          GenerationRecord r;
          r.model = j.at("model").get<std::string>();
          r.prompt_digest = j.at("digest").get<std::string>();
          r.output_text = j.at("output_text").get<std::string>();
          r.usage = usage_from_json(j.at("usage"));
          r.finish_reason =
              parse_finish_reason(j.at("finish_reason").get<std::string>());
          gen_[key("gen", r.model, r.prompt_digest,
                   j.at("params").get<std::string>())] = r;
        } else if (kind == "score") {
          NllScore s{-1, -1, j.at("mean_nll").get<double>(),
                     j.at("token_count").get<int>()};
          score_[key("score", j.at("model").get<std::string>(),
                     j.at("digest").get<std::string>(), "")] = s;
        } else {
          throw Error(Errc::StoreCorrupt, "unknown cache kind: " + kind);
        }
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::StoreCorrupt,
                    "cache line " + std::to_string(line_no) + ": " +
                        e.what());
      }
    }
  }

  void append(const nlohmann::ordered_json& j) {
    out_ << j.dump() << "\n";
    out_.flush();
    if (!out_)
      throw Error(Errc::IoError, "cannot append to cache: " + path_.string());
  }

  std::filesystem::path path_;
  std::ofstream out_;
  mutable std::mutex mu_;
  std::map<std::string, GenerationRecord> gen_;
  std::map<std::string, NllScore> score_;
};

// Serves generation and scoring calls from the cache, forwarding misses to
// the wrapped client. Cached records come back with cached=true and zero
// latency; only successful calls are stored.
class CachingBroker : public CallBroker {
 public:
  CachingBroker(HttpModelClient& inner, CallCache& cache)
      : inner_(inner), cache_(cache) {}

  GenerationRecord generate(const ModelSpec& spec, const PromptParts& parts,
                            const GenParams& params) override {
    std::string digest = inner_.prompt_digest(parts);
    std::string pdigest = params_digest(params);
    if (auto hit = cache_.lookup_generation(spec.name, digest, pdigest))
      return *hit;
    GenerationRecord rec = inner_.generate(spec, parts, params);
    cache_.put_generation(spec.name, digest, pdigest, rec);
    return rec;
  }

  NllScore score_answer_nll(const ModelSpec& spec,
                            const std::string& image_path,
                            const std::string& question,
                            const std::string& answer) override {
    std::string digest =
        inner_.score_request_digest(spec, image_path, question, answer);
    if (auto hit = cache_.lookup_score(spec.name, digest)) return *hit;
    NllScore s = inner_.score_answer_nll(spec, image_path, question, answer);
    cache_.put_score(spec.name, digest, s);
    return s;
  }

 private:
  HttpModelClient& inner_;
  CallCache& cache_;
};

// Reads a finished outcome log without opening the directory for writing.
inline std::vector<SampleOutcome> load_outcomes(
    const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::vector<SampleOutcome> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(outcome_from_json(nlohmann::ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::StoreCorrupt,
                  "outcome line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return out;
}

// One run directory: config guard, outcome log, stage views.
class RunStore {
 public:
  // Creates the directory on first use; on reuse the stored config must
  // match so a resume cannot silently run with different settings.
  RunStore(const std::filesystem::path& dir, const RunConfig& cfg)
      : dir_(dir) {
    std::filesystem::create_directories(dir_);
    std::string want = run_config_to_json(cfg).dump(2) + "\n";
    auto cfg_path = dir_ / "config.json";
    if (std::filesystem::exists(cfg_path)) {
      std::string have = read_file(cfg_path);
      if (have != want)
        throw Error(Errc::InvalidConfig,
                    "run directory " + dir_.string() +
                        " was created with a different configuration; "
                        "refusing to resume");
    } else {
      write_file(cfg_path, want);
    }
    load_outcomes();
    out_.open(outcomes_path(), std::ios::app);
    if (!out_)
      throw Error(Errc::IoError,
                  "cannot open outcome log in " + dir_.string());
  }

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path outcomes_path() const {
    return dir_ / "outcomes.jsonl";
  }

  // A sample counts as done only if its stored outcome did not fail; failed
  // samples run again on resume.
  bool has_completed(const std::string& id) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = outcomes_.find(id);
    return it != outcomes_.end() && !it->second.failed;
  }

  std::optional<SampleOutcome> completed(const std::string& id) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = outcomes_.find(id);
    if (it == outcomes_.end() || it->second.failed) return std::nullopt;
    return it->second;
  }

  void record(const SampleOutcome& o) {
    std::lock_guard<std::mutex> lk(mu_);
    outcomes_[o.sample_id] = o;
    out_ << outcome_to_json(o).dump() << "\n";
    out_.flush();
    if (!out_)
      throw Error(Errc::IoError,
                  "cannot append outcome in " + dir_.string());
  }

  // Rewrites the outcome log and stage views in the given order. Ids with
  // no outcome (for example a cancelled run) are skipped.
  void finalize(const std::vector<std::string>& ordered_ids) {
    std::lock_guard<std::mutex> lk(mu_);
    std::string outcomes, candidates, scores, selection, paths, verdict;
    for (const auto& id : ordered_ids) {
      auto it = outcomes_.find(id);
      if (it == outcomes_.end()) continue;
      nlohmann::ordered_json oj = outcome_to_json(it->second);
      outcomes += oj.dump() + "\n";
      candidates += nlohmann::ordered_json{
          {"id", id},
          {"candidates", oj["candidates"]},
          {"errors", oj["candidate_errors"]}}.dump() + "\n";
      scores += nlohmann::ordered_json{{"id", id},
                                       {"scores", oj["scores"]},
                                       {"matrix", oj["matrix"]}}
                    .dump() +
                "\n";
      nlohmann::ordered_json sel = {{"id", id}};
      for (const auto& [k, v] : oj["selection"].items()) sel[k] = v;
      selection += sel.dump() + "\n";
      paths += nlohmann::ordered_json{{"id", id},
                                      {"paths", oj["paths"]},
                                      {"errors", oj["path_errors"]}}
                   .dump() +
               "\n";
      verdict += nlohmann::ordered_json{
          {"id", id},
          {"verdict", oj["verdict"]},
          {"majority_expert", oj["majority_expert"]}}.dump() + "\n";
    }
    out_.close();
    replace_file(outcomes_path(), outcomes);
    replace_file(dir_ / "candidates.jsonl", candidates);
    replace_file(dir_ / "scores.jsonl", scores);
    replace_file(dir_ / "selection.jsonl", selection);
    replace_file(dir_ / "paths.jsonl", paths);
    replace_file(dir_ / "verdict.jsonl", verdict);
    out_.open(outcomes_path(), std::ios::app);
  }

  // All stored outcomes in the given order, skipping absent ids.
  std::vector<SampleOutcome> ordered(
      const std::vector<std::string>& ordered_ids) const {
    std::lock_guard<std::mutex> lk(mu_);
    std::vector<SampleOutcome> out;
    for (const auto& id : ordered_ids) {
      auto it = outcomes_.find(id);
      if (it != outcomes_.end()) out.push_back(it->second);
    }
    return out;
  }

  std::size_t stored_count() const {
    std::lock_guard<std::mutex> lk(mu_);
    return outcomes_.size();
  }

 private:
  void load_outcomes() {
    auto p = outcomes_path();
    if (!std::filesystem::exists(p)) return;
    std::string text = read_file(p);
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      try {
        SampleOutcome o =
            outcome_from_json(nlohmann::ordered_json::parse(line));
        outcomes_[o.sample_id] = std::move(o);
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::StoreCorrupt,
                    "outcome line " + std::to_string(line_no) + ": " +
                        e.what());
      }
    }
  }

  static void replace_file(const std::filesystem::path& path,
                           const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    write_file(tmp, content);
    std::filesystem::rename(tmp, path);
  }

  std::filesystem::path dir_;
  std::ofstream out_;
  mutable std::mutex mu_;
  std::map<std::string, SampleOutcome> outcomes_;
};

}  // namespace vdk

#endif  // VDK_RUN_STORE_HPP_
