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

#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "vdk/model_types.hpp"

#ifdef VDK_HAVE_OPENCV
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#endif

namespace vdk {

struct LoadedImage {
  std::string bytes;
  std::string digest;
  std::string media_type;
};

// Speaks the OpenAI-compatible wire formats. Shareable across worker threads;
// each request uses its own connection.
class HttpModelClient : public CallBroker {
 public:
  struct Options {
    int max_image_side = 0;  // 0 = send images untouched
  };

  HttpModelClient() = default;
  explicit HttpModelClient(Options opt) : opt_(opt) {}

  // ---- CallBroker -----------------------------------------------------

  GenerationRecord generate(const ModelSpec& spec, const PromptParts& parts,
                            const GenParams& params) override {
    if (spec.api_style == ApiStyle::Completions && !parts.image_paths.empty())
      throw Error(Errc::InvalidConfig,
                  "completions transport cannot carry images; drop the "
                  "images for model " + spec.name);

    std::string digest = prompt_digest(parts);
    nlohmann::ordered_json body;
    std::string path;
    if (spec.api_style == ApiStyle::Chat) {
      path = "/v1/chat/completions";
      nlohmann::ordered_json messages = nlohmann::ordered_json::array();
      if (!parts.system.empty())
        messages.push_back({{"role", "system"}, {"content", parts.system}});
      nlohmann::ordered_json content = nlohmann::ordered_json::array();
      content.push_back({{"type", "text"}, {"text", parts.user}});
      for (const auto& p : parts.image_paths) {
        auto img = load_image(p);
        content.push_back(
            {{"type", "image_url"},
             {"image_url",
              {{"url", "data:" + img->media_type + ";base64," +
                           base64_encode(img->bytes)}}}});
      }
      messages.push_back({{"role", "user"}, {"content", content}});
      body = {{"model", spec.name},
              {"messages", messages},
              {"temperature", params.temperature},
              {"max_tokens", params.max_tokens}};
    } else {
      path = "/v1/completions";
      std::string prompt = parts.system.empty()
                               ? parts.user
                               : parts.system + "\n\n" + parts.user;
      body = {{"model", spec.name},
              {"prompt", prompt},
              {"temperature", params.temperature},
              {"max_tokens", params.max_tokens}};
    }

    auto t0 = now_ms();
    std::string res = post_with_retries(spec, path, body.dump());
    nlohmann::ordered_json j = parse_json(res);

    GenerationRecord rec;
    rec.model = spec.name;
    rec.prompt_digest = digest;
    rec.latency_ms = now_ms() - t0;
    try {
      const auto& choice = j.at("choices").at(0);
      if (spec.api_style == ApiStyle::Chat)
        rec.output_text = choice.at("message").at("content").get<std::string>();
      else
        rec.output_text = choice.at("text").get<std::string>();
      rec.finish_reason = parse_finish_reason(
          choice.value("finish_reason", std::string{"stop"}));
      rec.usage.prompt_tokens = j.at("usage").at("prompt_tokens").get<long long>();
      rec.usage.completion_tokens =
          j.at("usage").at("completion_tokens").get<long long>();
    } catch (const nlohmann::ordered_json::exception& e) {
      throw Error(Errc::MalformedResponse,
                  spec.name + ": missing choices/usage in response: " +
                      e.what());
    }
    return rec;
  }

  NllScore score_answer_nll(const ModelSpec& spec,
                            const std::string& image_path,
                            const std::string& question,
                            const std::string& answer) override {
    if (answer.empty())
      throw Error(Errc::EmptyAnswer, "cannot score an empty answer");
    switch (spec.supports_scoring) {
      case ScoringSupport::None:
        throw Error(Errc::ScoringUnsupported,
                    spec.name + " exposes no scoring interface");
      case ScoringSupport::ScoreRoute:
        return score_via_route(spec, image_path, question, answer);
      case ScoringSupport::EchoLogprobs:
        return score_via_echo(spec, question, answer);
    }
    throw Error(Errc::ScoringUnsupported, spec.name);
  }

  // ---- request identity ------------------------------------------------

  std::string prompt_digest(const PromptParts& parts) {
    std::vector<std::string> image_digests;
    for (const auto& p : parts.image_paths)
      image_digests.push_back(load_image(p)->digest);
    return generation_digest(parts, image_digests);
  }

  std::string score_request_digest(const ModelSpec& spec,
                                   const std::string& image_path,
                                   const std::string& question,
                                   const std::string& answer) {
    if (spec.supports_scoring == ScoringSupport::EchoLogprobs)
      return score_digest(question, answer, "");
    std::string img = image_path.empty() ? "" : load_image(image_path)->digest;
    return score_digest(question, answer, img);
  }

  // Loads, optionally downscales, and caches an image. The digest covers the
  // bytes as they would go on the wire.
  std::shared_ptr<const LoadedImage> load_image(const std::string& path) {
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = images_.find(path);
      if (it != images_.end()) return it->second;
    }
    auto img = std::make_shared<LoadedImage>();
    img->bytes = read_file(path);
    img->media_type = media_type_for(path);
    maybe_downscale(*img);
    img->digest = digest_hex(img->bytes);
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, inserted] = images_.emplace(path, std::move(img));
    (void)inserted;
    return it->second;
  }

 private:
  static std::string media_type_for(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext =
        dot == std::string::npos ? "" : to_lower_ascii(path.substr(dot + 1));
    if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
    if (ext == "webp") return "image/webp";
    if (ext == "gif") return "image/gif";
    return "image/png";
  }

  void maybe_downscale(LoadedImage& img) {
#ifdef VDK_HAVE_OPENCV
    if (opt_.max_image_side <= 0) return;
    std::vector<unsigned char> raw(img.bytes.begin(), img.bytes.end());
    cv::Mat m = cv::imdecode(raw, cv::IMREAD_UNCHANGED);
    if (m.empty()) return;
    int side = std::max(m.cols, m.rows);
    if (side <= opt_.max_image_side) return;
    double scale = static_cast<double>(opt_.max_image_side) / side;
    cv::Mat small;
    cv::resize(m, small, cv::Size(), scale, scale, cv::INTER_AREA);
    std::string ext = img.media_type == "image/jpeg" ? ".jpg" : ".png";
    std::vector<unsigned char> out;
    if (cv::imencode(ext, small, out))
      img.bytes.assign(out.begin(), out.end());
#else
    if (opt_.max_image_side > 0 && !warned_no_downscale_.exchange(true))
      std::fprintf(stderr,
                   "note: built without OpenCV, max_image_side ignored\n");
    (void)img;
#endif
  }

  static void configure(httplib::Client& cli, const ModelSpec& spec) {
    auto timeout = std::chrono::microseconds(
        static_cast<long long>(spec.request_timeout_s * 1e6));
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
  }

  httplib::Headers auth_headers(const ModelSpec& spec) {
    httplib::Headers h;
    if (!spec.api_key_env.empty()) {
      const char* key = std::getenv(spec.api_key_env.c_str());
      if (key && *key) h.emplace("Authorization", std::string("Bearer ") + key);
    }
    return h;
  }

  static nlohmann::ordered_json parse_json(const std::string& body) {
    try {
      return nlohmann::ordered_json::parse(body);
    } catch (const std::exception& e) {
      throw Error(Errc::MalformedResponse,
                  std::string("response is not valid JSON: ") + e.what());
    }
  }

  // Retries timeouts, connection failures, 429 and 5xx with exponential
  // backoff; anything else surfaces immediately.
  std::string post_with_retries(const ModelSpec& spec, const std::string& path,
                                const std::string& body) {
    std::string last;
    for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
      httplib::Client cli(spec.base_url);
      configure(cli, spec);
      auto res = cli.Post(path, auth_headers(spec), body, "application/json");
      if (res) {
        if (res->status == 200) return res->body;
        if (res->status != 429 && res->status < 500)
          throw Error(Errc::MalformedResponse,
                      spec.name + ": http " + std::to_string(res->status) +
                          ": " + res->body.substr(0, 200));
        last = "http " + std::to_string(res->status);
      } else {
        last = "transport error " + httplib::to_string(res.error());
      }
      if (attempt < spec.max_retries) {
        std::this_thread::sleep_for(std::chrono::milliseconds(
            spec.retry_backoff_ms << attempt));
      }
    }
    throw Error(Errc::EndpointUnavailable,
                spec.name + ": gave up after " +
                    std::to_string(spec.max_retries + 1) + " attempts (" +
                    last + ")");
  }

  static NllScore mean_of(const std::vector<double>& logprobs) {
    double sum = 0.0;
    for (double lp : logprobs) sum += -std::min(lp, 0.0);
    NllScore s;
    s.token_count = static_cast<long long>(logprobs.size());
    s.mean_nll = sum / static_cast<double>(logprobs.size());
    return s;
  }

  NllScore score_via_route(const ModelSpec& spec, const std::string& image_path,
                           const std::string& question,
                           const std::string& answer) {
    std::string image_b64;
    if (!image_path.empty()) image_b64 = base64_encode(load_image(image_path)->bytes);
    nlohmann::ordered_json body = {{"model", spec.name},
                                   {"image_b64", image_b64},
                                   {"question", question},
                                   {"answer", answer}};
    std::string res = post_with_retries(spec, "/v1/score", body.dump());
    nlohmann::ordered_json j = parse_json(res);
    if (!j.contains("token_logprobs") || !j["token_logprobs"].is_array() ||
        j["token_logprobs"].empty())
      throw Error(Errc::MalformedResponse,
                  spec.name + ": score response has no token_logprobs");
    std::vector<double> lps;
    for (const auto& v : j["token_logprobs"]) {
      if (!v.is_number())
        throw Error(Errc::MalformedResponse,
                    spec.name + ": non-numeric token logprob");
      lps.push_back(v.get<double>());
    }
    return mean_of(lps);
  }

  NllScore score_via_echo(const ModelSpec& spec, const std::string& question,
                          const std::string& answer) {
    std::string prefix = "Question: " + question + "\nAnswer: ";
    std::string prompt = prefix + answer;
    nlohmann::ordered_json body = {{"model", spec.name}, {"prompt", prompt},
                                   {"echo", true},       {"logprobs", 1},
                                   {"max_tokens", 0},    {"temperature", 0.0}};
    std::string res = post_with_retries(spec, "/v1/completions", body.dump());
    nlohmann::ordered_json j = parse_json(res);

    std::vector<double> lps;
    try {
      const auto& lp = j.at("choices").at(0).at("logprobs");
      const auto& token_logprobs = lp.at("token_logprobs");
      const auto& offsets = lp.at("text_offset");
      if (token_logprobs.size() != offsets.size())
        throw Error(Errc::MalformedResponse,
                    spec.name + ": logprob and offset arrays disagree");
      for (std::size_t i = 0; i < token_logprobs.size(); ++i) {
        if (offsets[i].get<long long>() <
            static_cast<long long>(prefix.size()))
          continue;
        if (token_logprobs[i].is_null())
          throw Error(Errc::MalformedResponse,
                      spec.name + ": null logprob inside the answer span");
        lps.push_back(token_logprobs[i].get<double>());
      }
    } catch (const nlohmann::ordered_json::exception& e) {
      throw Error(Errc::MalformedResponse,
                  spec.name + ": echo response lacks logprobs: " + e.what());
    }
    if (lps.empty())
      throw Error(Errc::MalformedResponse,
                  spec.name + ": no tokens landed in the answer span");
    return mean_of(lps);
  }

  Options opt_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const LoadedImage>> images_;
  std::atomic<bool> warned_no_downscale_{false};
};

}  // namespace vdk
