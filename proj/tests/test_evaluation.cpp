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

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "vdk/evaluation.hpp"

namespace {

// Reference implementation straight from the recursive definition, kept
// independent of the production code on purpose.
std::size_t lev_oracle(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[a.size()][b.size()];
}

std::string random_word(std::mt19937& rng, std::size_t max_len,
                        std::string_view alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[pick(rng)]);
  return s;
}

}  // namespace

TEST_CASE("edit distance oracle sanity anchors", "[evaluation]") {
  CHECK(lev_oracle("", "") == 0);
  CHECK(lev_oracle("abc", "") == 3);
  CHECK(lev_oracle("", "abc") == 3);
  CHECK(lev_oracle("kitten", "sitting") == 3);
  CHECK(lev_oracle("flaw", "lawn") == 2);
  CHECK(lev_oracle("picnic", "nfl") == 5);
}

TEST_CASE("levenshtein matches the recursive definition", "[evaluation]") {
  CHECK(vdk::levenshtein("kitten", "sitting") == 3);
  CHECK(vdk::levenshtein("picnic", "nfl") == 5);
  CHECK(vdk::levenshtein("", "xyz") == 3);

  std::mt19937 rng(20260822);
  for (int i = 0; i < 2000; ++i) {
    std::string a = random_word(rng, 8, "abc");
    std::string b = random_word(rng, 8, "abc");
    INFO("a=\"" << a << "\" b=\"" << b << "\"");
    CHECK(vdk::levenshtein(a, b) == lev_oracle(a, b));
    CHECK(vdk::levenshtein(a, b) == vdk::levenshtein(b, a));
  }
}

TEST_CASE("single edits cost one", "[evaluation]") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string a = random_word(rng, 6, "abcd");
    CHECK(vdk::levenshtein(a, a) == 0);
    CHECK(vdk::levenshtein(a, a + "x") == 1);
  }
}

TEST_CASE("anls keeps similarities at or above the threshold", "[evaluation]") {
  CHECK_THAT(vdk::anls("49", {"49%"}),
             Catch::Matchers::WithinAbs(0.666667, 1e-4));
  CHECK(vdk::anls("picnic", {"nfl"}) == 0.0);
  CHECK(vdk::anls("ab", {"ac"}) == 0.5);
  CHECK(vdk::anls("abc", {"axc"}) > 0.5);
}

TEST_CASE("anls normalizes before comparing", "[evaluation]") {
  CHECK(vdk::anls("\"Portugal\"", {"portugal"}) == 1.0);
  CHECK(vdk::anls("  two   words ", {"two words"}) == 1.0);
}

TEST_CASE("anls edge cases", "[evaluation]") {
  CHECK(vdk::anls("", {""}) == 1.0);
  CHECK(vdk::anls("", {"x"}) == 0.0);
  CHECK(vdk::anls("49", {"nfl", "49%", "49"}) == 1.0);
  CHECK(vdk::anls("anything", {}) == 0.0);
}

TEST_CASE("relaxed accuracy accepts five percent numeric slack",
          "[evaluation]") {
  CHECK(vdk::relaxed_accuracy("49%", "49"));
  CHECK(vdk::relaxed_accuracy("1,234", "1234"));
  CHECK(vdk::relaxed_accuracy("$3.30", "3.2"));
  CHECK(vdk::relaxed_accuracy("105", "100"));
  CHECK_FALSE(vdk::relaxed_accuracy("105.1", "100"));
  CHECK_FALSE(vdk::relaxed_accuracy("52", "49"));
}

TEST_CASE("relaxed accuracy requires exact match for zero gold",
          "[evaluation]") {
  CHECK(vdk::relaxed_accuracy("0", "0"));
  CHECK(vdk::relaxed_accuracy("0.0", "0"));
  CHECK_FALSE(vdk::relaxed_accuracy("0.001", "0"));
}

TEST_CASE("relaxed accuracy falls back to string equality", "[evaluation]") {
  CHECK(vdk::relaxed_accuracy("3.2 million", "3.2 Million"));
  CHECK_FALSE(vdk::relaxed_accuracy("3.2 million", "3.3 million"));
  CHECK(vdk::relaxed_accuracy("Paris", "paris"));
  CHECK_FALSE(vdk::relaxed_accuracy("Paris", "London"));
}

TEST_CASE("strict mode disables numeric slack", "[evaluation]") {
  CHECK_FALSE(vdk::relaxed_accuracy("49%", "49", 0.05, true));
  CHECK(vdk::relaxed_accuracy("49", "49", 0.05, true));
  CHECK_FALSE(vdk::relaxed_accuracy("105", "100", 0.05, true));
}

TEST_CASE("currency and percent symbols are stripped before parsing",
          "[evaluation]") {
  CHECK(vdk::relaxed_accuracy("\xe2\x82\xac" "42", "42"));
  CHECK(vdk::relaxed_accuracy("\xc2\xa3" "1,000", "1000"));
  CHECK(vdk::relaxed_accuracy("$5", "5"));
}

TEST_CASE("letter match strips option wrappers", "[evaluation]") {
  CHECK(vdk::letter_match("(C)", "C"));
  CHECK(vdk::letter_match("C.", "c"));
  CHECK(vdk::letter_match("\\boxed{B}", "B"));
  CHECK(vdk::letter_match("The answer is D", "D"));
  CHECK_FALSE(vdk::letter_match("A", "B"));
  CHECK_FALSE(vdk::letter_match("", "C"));
}

TEST_CASE("metric_score dispatches per metric kind", "[evaluation]") {
  using vdk::MetricKind;
  std::vector<std::string> golds = {"49%"};
  CHECK_THAT(vdk::metric_score(std::optional<std::string>("49"), golds,
                               MetricKind::Anls),
             Catch::Matchers::WithinAbs(0.666667, 1e-4));
  CHECK(vdk::metric_score(std::optional<std::string>("49"), golds,
                          MetricKind::RelaxedAccuracy) == 1.0);
  CHECK(vdk::metric_score(std::nullopt, golds, MetricKind::Anls) == 0.0);

  std::vector<std::string> letters = {"C"};
  CHECK(vdk::metric_score(std::optional<std::string>("(C)"), letters,
                          MetricKind::LetterMatch) == 1.0);
}

TEST_CASE("metric_correct applies the anls threshold", "[evaluation]") {
  std::vector<std::string> golds = {"49%"};
  CHECK(vdk::metric_correct(std::optional<std::string>("49"), golds,
                            vdk::MetricKind::Anls));
  CHECK_FALSE(vdk::metric_correct(std::optional<std::string>("picnic"),
                                  {"nfl"}, vdk::MetricKind::Anls));
  CHECK_FALSE(vdk::metric_correct(std::nullopt, golds, vdk::MetricKind::Anls));
}
