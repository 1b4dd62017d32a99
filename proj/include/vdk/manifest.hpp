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

// JSONL manifests: one sample per line with id, question, image paths, and
// gold answers. Relative image paths resolve against the manifest's own
// directory so a dataset travels as a folder.

#ifndef VDK_MANIFEST_HPP_
#define VDK_MANIFEST_HPP_

#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vdk/core.hpp"
#include "vdk/util.hpp"

namespace vdk {

namespace detail {

inline std::string resolve_against(const std::filesystem::path& base,
                                   const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return fp.lexically_normal().string();
  return (base / fp).lexically_normal().string();
}

}  // namespace detail

inline Sample parse_sample_line(const std::string& line, int line_no,
                                const std::filesystem::path& base_dir,
                                bool check_images) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, "manifest line " + std::to_string(line_no) +
                                      ": " + e.what());
  }
  auto fail = [&](const std::string& why) -> Error {
    return Error(Errc::ParseError,
                 "manifest line " + std::to_string(line_no) + ": " + why);
  };
  if (!j.is_object()) throw fail("expected a JSON object");
  for (const char* key : {"id", "question", "image_path", "gold_answers"})
    if (!j.contains(key)) throw fail(std::string("missing field ") + key);

  Sample s;
  try {
    s.id = j.at("id").get<std::string>();
    s.question = j.at("question").get<std::string>();
    s.image_path =
        detail::resolve_against(base_dir, j.at("image_path").get<std::string>());
    if (j.contains("aux_image_path") && !j.at("aux_image_path").is_null())
      s.aux_image_path = detail::resolve_against(
          base_dir, j.at("aux_image_path").get<std::string>());
    s.gold_answers = j.at("gold_answers").get<std::vector<std::string>>();
    if (j.contains("question_type") && !j.at("question_type").is_null())
      s.question_type = j.at("question_type").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  if (s.id.empty()) throw fail("empty id");
  if (s.question.empty()) throw fail("empty question");
  if (s.gold_answers.empty()) throw fail("empty gold_answers");
  if (check_images) {
    if (!std::filesystem::exists(s.image_path))
      throw Error(Errc::MissingImage,
                  "sample " + s.id + ": image not found: " + s.image_path);
    if (!s.aux_image_path.empty() &&
        !std::filesystem::exists(s.aux_image_path))
      throw Error(Errc::MissingImage,
                  "sample " + s.id +
                      ": aux image not found: " + s.aux_image_path);
  }
  return s;
}

inline std::vector<Sample> load_manifest(const std::string& path,
                                         bool check_images = true) {
  std::string text = read_file(path);
  std::filesystem::path base =
      std::filesystem::path(path).parent_path();
  std::vector<Sample> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    Sample s = parse_sample_line(line, line_no, base, check_images);
    if (!seen.insert(s.id).second)
      throw Error(Errc::DuplicateId,
                  "manifest line " + std::to_string(line_no) +
                      ": duplicate sample id " + s.id);
    out.push_back(std::move(s));
  }
  if (out.empty())
    throw Error(Errc::ParseError, "manifest has no samples: " + path);
  return out;
}

inline std::map<std::string, Sample> sample_index(
    const std::vector<Sample>& samples) {
  std::map<std::string, Sample> out;
  for (const auto& s : samples) out[s.id] = s;
  return out;
}

inline nlohmann::ordered_json sample_to_json(const Sample& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["question"] = s.question;
  j["image_path"] = s.image_path;
  if (!s.aux_image_path.empty()) j["aux_image_path"] = s.aux_image_path;
  j["gold_answers"] = s.gold_answers;
  if (!s.question_type.empty()) j["question_type"] = s.question_type;
  return j;
}

// The verdict-alone file is JSONL of {"id": ..., "answer": ...} where answer
// may be null for an unusable reply. It feeds the conditioned recovery grid.
inline std::map<std::string, std::optional<std::string>> load_alone_answers(
    const std::string& path) {
  std::string text = read_file(path);
  std::map<std::string, std::optional<std::string>> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
      std::string id = j.at("id").get<std::string>();
      if (!out.emplace(id, j.at("answer").is_null()
                               ? std::optional<std::string>()
                               : std::optional<std::string>(
                                     j.at("answer").get<std::string>()))
               .second)
        throw Error(Errc::DuplicateId,
                    "verdict-alone line " + std::to_string(line_no) +
                        ": duplicate id " + id);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, "verdict-alone line " +
                                        std::to_string(line_no) + ": " +
                                        e.what());
    }
  }
  return out;
}

}  // namespace vdk

#endif  // VDK_MANIFEST_HPP_
