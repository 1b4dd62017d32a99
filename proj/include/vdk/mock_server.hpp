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

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "vdk/scenario.hpp"

namespace vdk {

// Serves the three endpoint shapes the client speaks, answering purely from a
// scenario. Every response is a pure function of the request, so runs driven
// by this server replay byte-for-byte.
class MockServer {
 public:
  explicit MockServer(Scenario scenario, int port = 0)
      : scenario_(std::move(scenario)), fired_(scenario_.rules.size(), 0) {
    install();
    if (port == 0) {
      port_ = svr_.bind_to_any_port("127.0.0.1");
      if (port_ < 0) throw Error(Errc::PortInUse, "no free port to bind");
    } else {
      if (!svr_.bind_to_port("127.0.0.1", port))
        throw Error(Errc::PortInUse,
                    "cannot bind 127.0.0.1:" + std::to_string(port));
      port_ = port;
    }
    thread_ = std::thread([this] { svr_.listen_after_bind(); });
    svr_.wait_until_ready();
  }

  ~MockServer() { stop(); }
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  void stop() {
    stopping_ = true;
    if (thread_.joinable()) {
      svr_.stop();
      thread_.join();
    }
  }

  int port() const { return port_; }
  std::string base_url() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

  long long total_requests() const { return total_; }
  long long chat_requests() const { return chat_; }
  long long completions_requests() const { return completions_; }
  long long score_requests() const { return score_; }

  void reset_counters() { total_ = chat_ = completions_ = score_ = 0; }

 private:
  using json = nlohmann::ordered_json;

  int find_rule(const std::string& model, const std::string& match_text,
                const std::string& digest) {
    for (std::size_t i = 0; i < scenario_.rules.size(); ++i) {
      const auto& r = scenario_.rules[i];
      if (r.model != model) continue;
      if (!r.match_digest.empty() && r.match_digest == digest)
        return static_cast<int>(i);
      if (!r.match_substring.empty() &&
          match_text.find(r.match_substring) != std::string::npos)
        return static_cast<int>(i);
    }
    return -1;
  }

  void no_rule(httplib::Response& res, const std::string& model,
               const std::string& digest, const std::string& match_text) {
    json body = {
        {"error", "no matching scenario rule"},
        {"model", model},
        {"prompt_digest", digest},
        {"match_text_prefix", match_text.substr(0, 160)},
    };
    res.status = 404;
    res.set_content(body.dump(), "application/json");
  }

  void nap(int ms) {
    int slept = 0;
    while (slept < ms && !stopping_) {
      int chunk = std::min(25, ms - slept);
      std::this_thread::sleep_for(std::chrono::milliseconds(chunk));
      slept += chunk;
    }
  }

  // True when the rule consumed this request with an injected failure.
  bool inject_failure(int idx, httplib::Response& res) {
    auto& rule = scenario_.rules[idx];
    if (rule.failure_mode.empty()) return false;
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (rule.fail_times >= 0 && fired_[idx] >= rule.fail_times) return false;
      ++fired_[idx];
    }
    if (rule.failure_mode == "timeout") {
      nap(rule.latency_ms > 0 ? rule.latency_ms : 2000);
      res.status = 500;
      res.set_content("{\"error\":\"timed out\"}", "application/json");
    } else if (rule.failure_mode == "http_429") {
      res.status = 429;
      res.set_content("{\"error\":\"rate limited\"}", "application/json");
    } else if (rule.failure_mode == "http_500") {
      res.status = 500;
      res.set_content("{\"error\":\"internal\"}", "application/json");
    } else {  // malformed
      res.status = 200;
      res.set_content("{\"unexpected\":true}", "application/json");
    }
    return true;
  }

  void respond(int idx, httplib::Response& res, json body) {
    const auto& rule = scenario_.rules[idx];
    if (rule.latency_ms > 0) nap(rule.latency_ms);
    res.status = 200;
    res.set_content(body.dump(), "application/json");
  }

  void handle_chat(const httplib::Request& req, httplib::Response& res) {
    ++total_;
    ++chat_;
    json j;
    try {
      j = json::parse(req.body);
    } catch (...) {
      res.status = 400;
      res.set_content("{\"error\":\"bad json\"}", "application/json");
      return;
    }
    std::string model = j.value("model", std::string{});
    PromptParts parts;
    std::vector<std::string> image_digests;
    if (j.contains("messages")) {
      for (const auto& m : j["messages"]) {
        std::string role = m.value("role", std::string{});
        if (role == "system" && m["content"].is_string()) {
          parts.system = m["content"].get<std::string>();
        } else if (role == "user") {
          if (m["content"].is_string()) {
            parts.user = m["content"].get<std::string>();
          } else if (m["content"].is_array()) {
            for (const auto& part : m["content"]) {
              std::string type = part.value("type", std::string{});
              if (type == "text") {
                if (!parts.user.empty()) parts.user += "\n";
                parts.user += part.value("text", std::string{});
              } else if (type == "image_url") {
                std::string url = part["image_url"].value("url", std::string{});
                auto comma = url.find(',');
                std::string b64 =
                    comma == std::string::npos ? url : url.substr(comma + 1);
                try {
                  image_digests.push_back(digest_hex(base64_decode(b64)));
                } catch (const Error&) {
                  image_digests.push_back("bad-image-data");
                }
              }
            }
          }
        }
      }
    }
    std::string digest = generation_digest(parts, image_digests);
    std::string match_text = parts.system + "\n" + parts.user;
    int idx = find_rule(model, match_text, digest);
    if (idx < 0) return no_rule(res, model, digest, match_text);
    if (inject_failure(idx, res)) return;
    const auto& rule = scenario_.rules[idx];
    json body = {
        {"id", "mock"},
        {"object", "chat.completion"},
        {"model", model},
        {"choices",
         json::array({json{
             {"index", 0},
             {"message",
              json{{"role", "assistant"}, {"content", rule.response_text}}},
             {"finish_reason", rule.finish_reason},
         }})},
        {"usage",
         json{{"prompt_tokens", rule.usage.prompt_tokens},
              {"completion_tokens", rule.usage.completion_tokens},
              {"total_tokens",
               rule.usage.prompt_tokens + rule.usage.completion_tokens}}},
    };
    respond(idx, res, std::move(body));
  }

  void handle_completions(const httplib::Request& req, httplib::Response& res) {
    ++total_;
    ++completions_;
    json j;
    try {
      j = json::parse(req.body);
    } catch (...) {
      res.status = 400;
      res.set_content("{\"error\":\"bad json\"}", "application/json");
      return;
    }
    std::string model = j.value("model", std::string{});
    std::string prompt = j.value("prompt", std::string{});
    bool echo = j.value("echo", false);
    long long max_tokens = j.value("max_tokens", -1ll);
    std::string digest = digest_hex(prompt);

    if (max_tokens == 0 && !echo) {
      res.status = 400;
      res.set_content("{\"error\":\"max_tokens must be positive\"}",
                      "application/json");
      return;
    }

    int idx = find_rule(model, prompt, digest);
    if (idx < 0) return no_rule(res, model, digest, prompt);
    if (inject_failure(idx, res)) return;
    const auto& rule = scenario_.rules[idx];

    if (echo && max_tokens == 0) {
      // Scoring probe: echo the prompt back with per-token logprobs over the
      // configured answer span.
      if (!rule.has_logprobs || rule.answer_span_text.empty())
        return no_rule(res, model, digest, prompt);
      std::size_t span = prompt.rfind(rule.answer_span_text);
      if (span == std::string::npos)
        return no_rule(res, model, digest, prompt);
      std::size_t len = rule.answer_span_text.size();
      std::size_t n = rule.token_logprobs.size();

      json tokens = json::array();
      json logprobs = json::array();
      json offsets = json::array();
      if (span > 0) {
        tokens.push_back(prompt.substr(0, span));
        logprobs.push_back(nullptr);
        offsets.push_back(0);
      }
      for (std::size_t t = 0; t < n; ++t) {
        std::size_t b = span + t * len / n;
        std::size_t e = span + (t + 1) * len / n;
        tokens.push_back(prompt.substr(b, e - b));
        logprobs.push_back(rule.token_logprobs[t]);
        offsets.push_back(b);
      }
      json body = {
          {"id", "mock"},
          {"object", "text_completion"},
          {"model", model},
          {"choices",
           json::array({json{
               {"index", 0},
               {"text", prompt},
               {"logprobs",
                json{{"tokens", tokens},
                     {"token_logprobs", logprobs},
                     {"text_offset", offsets}}},
               {"finish_reason", "stop"},
           }})},
          {"usage",
           json{{"prompt_tokens", rule.usage.prompt_tokens},
                {"completion_tokens", 0},
                {"total_tokens", rule.usage.prompt_tokens}}},
      };
      return respond(idx, res, std::move(body));
    }

    json body = {
        {"id", "mock"},
        {"object", "text_completion"},
        {"model", model},
        {"choices",
         json::array({json{
             {"index", 0},
             {"text", rule.response_text},
             {"finish_reason", rule.finish_reason},
         }})},
        {"usage",
         json{{"prompt_tokens", rule.usage.prompt_tokens},
              {"completion_tokens", rule.usage.completion_tokens},
              {"total_tokens",
               rule.usage.prompt_tokens + rule.usage.completion_tokens}}},
    };
    respond(idx, res, std::move(body));
  }

  void handle_score(const httplib::Request& req, httplib::Response& res) {
    ++total_;
    ++score_;
    json j;
    try {
      j = json::parse(req.body);
    } catch (...) {
      res.status = 400;
      res.set_content("{\"error\":\"bad json\"}", "application/json");
      return;
    }
    std::string model = j.value("model", std::string{});
    std::string question = j.value("question", std::string{});
    std::string answer = j.value("answer", std::string{});
    if (answer.empty()) {
      res.status = 400;
      res.set_content("{\"error\":\"empty answer\"}", "application/json");
      return;
    }
    std::string image_digest;
    try {
      image_digest = digest_hex(base64_decode(j.value("image_b64", std::string{})));
    } catch (const Error&) {
      image_digest = "bad-image-data";
    }
    std::string digest = score_digest(question, answer, image_digest);
    std::string match_text = question + "\n" + answer;
    int idx = find_rule(model, match_text, digest);
    if (idx < 0 || !scenario_.rules[idx].has_logprobs)
      return no_rule(res, model, digest, match_text);
    if (inject_failure(idx, res)) return;
    json body = {
        {"model", model},
        {"token_logprobs", scenario_.rules[idx].token_logprobs},
    };
    respond(idx, res, std::move(body));
  }

  void install() {
    svr_.Post("/v1/chat/completions",
              [this](const httplib::Request& req, httplib::Response& res) {
                handle_chat(req, res);
              });
    svr_.Post("/v1/completions",
              [this](const httplib::Request& req, httplib::Response& res) {
                handle_completions(req, res);
              });
    svr_.Post("/v1/score",
              [this](const httplib::Request& req, httplib::Response& res) {
                handle_score(req, res);
              });
    svr_.Get("/__stats", [this](const httplib::Request&,
                                httplib::Response& res) {
      json body = {
          {"total", total_.load()},
          {"chat", chat_.load()},
          {"completions", completions_.load()},
          {"score", score_.load()},
      };
      res.set_content(body.dump(), "application/json");
    });
    svr_.Post("/__reset",
              [this](const httplib::Request&, httplib::Response& res) {
                reset_counters();
                res.set_content("{\"ok\":true}", "application/json");
              });
  }

  Scenario scenario_;
  std::vector<int> fired_;
  std::mutex mu_;
  httplib::Server svr_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  std::atomic<long long> total_{0}, chat_{0}, completions_{0}, score_{0};
  int port_ = 0;
};

}  // namespace vdk
