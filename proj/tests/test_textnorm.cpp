// Copyright 2022-2024  atcdp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "atcdp/textnorm.hpp"
#include "test_util.hpp"

using namespace atcdp;
using namespace atcdp::textnorm;

TEST_CASE("bundled rules contain the documented mappings") {
  const RuleTable& t = default_rules();
  CHECK(normalize_text("niner", t) == "nine");
  CHECK(normalize_text("take off", t) == "takeoff");
  CHECK(normalize_text("klm", t) == "k_l_m");
  CHECK(normalize_text("k l m", t) == "k_l_m");
  CHECK(normalize_text("air france", t) == "airfrans");
  CHECK(normalize_text("oclock", t) == "o'clock");
  CHECK(normalize_text("xray", t) == "x-ray");
}

TEST_CASE("normalize_text lowercases and reaches a fixed point") {
  const RuleTable& t = default_rules();
  CHECK(normalize_text("NINER Alpha", t) == "nine alfa");
  CHECK(normalize_text("takeoff", t) == "takeoff");
  std::string once = normalize_text("KLM stand by GOODBYE", t);
  CHECK(once == normalize_text(once, t));
}

TEST_CASE("normalize_text idempotence over random rule-table inputs") {
  const RuleTable& t = default_rules();
  const std::vector<std::string> vocab = {"niner", "alpha",   "klm",   "take", "off",
                                          "clear", "for",     "radar", "k",    "l",
                                          "m",     "contact", "2",     "goodday"};
  testutil::Sampler rng(555);
  for (int it = 0; it < 200; ++it) {
    std::string text;
    size_t len = 1 + rng.raw() % 12;
    for (size_t i = 0; i < len; ++i) {
      if (!text.empty()) text += ' ';
      text += vocab[rng.raw() % vocab.size()];
    }
    std::string n1 = normalize_text(text, t);
    CHECK(n1 == normalize_text(n1, t));
  }
}

TEST_CASE("longest pattern wins") {
  RuleTable t;
  t.add({"clear"}, {"clear"}, RuleCategory::CommonExpression);
  t.add({"clear", "for"}, {"cleared", "for"}, RuleCategory::CommonExpression);
  CHECK(normalize_text("clear for", t) == "cleared for");
}

TEST_CASE("duplicate patterns are a load error") {
  std::string doc = "klm\tk_l_m\tairline_designator\nklm\tklm_air\tairline_designator\n";
  CHECK_THROWS_AS(load_rules(doc), ParseError);
}

TEST_CASE("empty replacement is a load error") {
  std::string doc = "klm\t\tairline_designator\n";
  CHECK_THROWS_AS(load_rules(doc), ParseError);
}

TEST_CASE("verbalize_digits expands digit groups digit by digit") {
  const RuleTable& t = default_rules();
  CHECK(verbalize_digits("0", t) == "zero");
  CHECK(verbalize_digits("134", t) == "one three four");
  CHECK(verbalize_digits("runway one four", t) == "runway one four");
  CHECK(verbalize_digits("fl120", t) == "fl one two zero");
}

TEST_CASE("markup tokens pass through normalization untouched") {
  const RuleTable& t = default_rules();
  std::string in = "[unk] [#callsign]Quebec Lima[/#callsign] [#command]clear for ILS[/#command]";
  std::string out = normalize_text(in, t);
  CHECK(out == "[unk] [#callsign]quebec lima[/#callsign] [#command]cleared for ils[/#command]");
}

TEST_CASE("stripping markup commutes with normalization") {
  const RuleTable& t = default_rules();
  // vocabulary restricted to words that only take part in single-token
  // rules, so entity boundaries never cut a multi-token pattern
  const std::vector<std::string> vocab = {"niner", "alpha", "klm",  "zero",  "contact",
                                          "1",     "9",     "golf", "tower", "whisky"};
  testutil::Sampler rng(808);
  for (int it = 0; it < 200; ++it) {
    size_t len = 2 + rng.raw() % 10;
    std::vector<std::string> words;
    for (size_t i = 0; i < len; ++i) words.push_back(vocab[rng.raw() % vocab.size()]);
    size_t a = rng.raw() % len;
    size_t b = a + 1 + rng.raw() % (len - a);
    std::string text;
    for (size_t i = 0; i < len; ++i) {
      if (!text.empty()) text += ' ';
      if (i == a) text += "[#callsign]";
      text += words[i];
      if (i + 1 == b) text += "[/#callsign]";
    }
    CHECK(strip_markup(normalize_text(text, t)) == normalize_text(strip_markup(text), t));
  }
}

TEST_CASE("shipped rule file matches the embedded bundle") {
  std::ifstream in(std::string(ATCDP_DATA_DIR) + "/norm_rules.tsv");
  REQUIRE(in.good());
  RuleTable from_file = load_rules(in);
  const RuleTable& embedded = default_rules();
  REQUIRE(from_file.rules().size() == embedded.rules().size());
  for (size_t i = 0; i < embedded.rules().size(); ++i) {
    CHECK(from_file.rules()[i].pattern == embedded.rules()[i].pattern);
    CHECK(from_file.rules()[i].replacement == embedded.rules()[i].replacement);
    CHECK(from_file.rules()[i].category == embedded.rules()[i].category);
  }
}

TEST_CASE("rule file round trip through the external format") {
  std::string doc = "foo bar\tbaz\tcommon_expression\n# comment\nqux\tquux corge\ticao_alphabet\n";
  RuleTable t = load_rules(doc);
  REQUIRE(t.rules().size() == 2);
  CHECK(t.rules()[0].pattern == std::vector<std::string>{"foo", "bar"});
  CHECK(t.rules()[0].replacement == std::vector<std::string>{"baz"});
  CHECK(t.rules()[1].category == RuleCategory::IcaoAlphabet);
  CHECK(normalize_text("foo bar qux", t) == "baz quux corge");
}
