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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "vdk/model_types.hpp"

namespace vdk_test {

inline std::filesystem::path fresh_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto p = std::filesystem::temp_directory_path() /
           ("vdk_" + tag + "_" + std::to_string(getpid()) + "_" +
            std::to_string(counter++));
  std::filesystem::create_directories(p);
  return p;
}

// 1x1 PNG, enough for wire-format tests.
inline constexpr const char* kTinyPngB64 =
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mP8z8BQDwAEhQGAhK"
    "mMIQAAAABJRU5ErkJggg==";

// tint appends a byte so two calls can produce distinct image content.
inline std::filesystem::path write_png(const std::filesystem::path& dir,
                                       const std::string& name,
                                       char tint = '\0') {
  std::string bytes = vdk::base64_decode(kTinyPngB64);
  if (tint != '\0') bytes.push_back(tint);
  auto p = dir / name;
  vdk::write_file(p, bytes);
  return p;
}

inline vdk::ModelSpec mock_spec(const std::string& name,
                                const std::string& base_url) {
  vdk::ModelSpec s;
  s.name = name;
  s.base_url = base_url;
  s.api_style = vdk::ApiStyle::Chat;
  s.supports_scoring = vdk::ScoringSupport::ScoreRoute;
  s.pricing = {2.50, 10.00};
  s.request_timeout_s = 5.0;
  s.max_retries = 2;
  s.retry_backoff_ms = 10;
  return s;
}

}  // namespace vdk_test
