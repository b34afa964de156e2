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

#include "atcdp/annotation.hpp"
#include "atcdp/tagger.hpp"
#include "atcdp/textnorm.hpp"

using namespace atcdp;
using namespace atcdp::tagger;

namespace {

const callsign::DesignatorTable& table() {
  static const callsign::DesignatorTable t = callsign::load_designators(
      std::string("SWR\tswiss\nDLH\tlufthansa\nRYR\tryanair\nKLM\tk_l_m\n"));
  return t;
}

std::vector<std::string> toks(const std::string& text) {
  return textnorm::detail::split_ws(text);
}

std::string span_text(const std::vector<std::string>& tokens, const EntitySpan& s) {
  std::string out;
  for (size_t i = s.start_token; i < s.end_token; ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

TEST_CASE("tagger reproduces the gold annotation of the pilot segment") {
  auto tokens = toks("[unk] quebec lima confirm cleared for ils [unk]");
  auto spans = tag_entities(tokens, table());
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].label == EntityLabel::Callsign);
  CHECK(span_text(tokens, spans[0]) == "quebec lima");
  CHECK(spans[1].label == EntityLabel::Command);
  CHECK(span_text(tokens, spans[1]) == "confirm cleared for ils");
}

TEST_CASE("tagger reproduces the gold annotation of the controller segment") {
  auto tokens = toks(
      "[unk] quebec lima affirm cleared ils approach runway one four "
      "if you go around runway one four report in localizer established");
  auto spans = tag_entities(tokens, table());
  std::vector<std::string> commands, values, callsigns;
  for (const auto& s : spans) {
    std::string text = span_text(tokens, s);
    if (s.label == EntityLabel::Command) commands.push_back(text);
    else if (s.label == EntityLabel::Value) values.push_back(text);
    else callsigns.push_back(text);
  }
  CHECK(callsigns == std::vector<std::string>{"quebec lima"});
  CHECK(commands == std::vector<std::string>{"affirm cleared ils approach", "if you go around",
                                             "report in localizer established"});
  CHECK(values == std::vector<std::string>{"runway one four", "runway one four"});
}

TEST_CASE("tagger splits callsign, command and value by priority") {
  auto tokens = toks("swiss two six eight nine descend flight level one two zero");
  auto spans = tag_entities(tokens, table());
  REQUIRE(spans.size() == 3);
  CHECK(spans[0] == EntitySpan{EntityLabel::Callsign, 0, 5});
  CHECK(spans[1] == EntitySpan{EntityLabel::Command, 5, 6});
  CHECK(spans[2] == EntitySpan{EntityLabel::Value, 6, 11});
}

TEST_CASE("empty input produces no spans") {
  CHECK(tag_entities({}, table()).empty());
}

TEST_CASE("spans never overlap and are sorted") {
  for (const char* text : {
           "swiss one two contact tower one one eight decimal four",
           "k_l_m nine one golf line up runway two four and hold",
           "lufthansa four charlie foxtrot climb flight level three five zero",
           "descend four thousand feet qnh one zero one eight",
       }) {
    auto tokens = toks(text);
    auto spans = tag_entities(tokens, table());
    for (size_t i = 0; i < spans.size(); ++i) {
      CHECK(spans[i].start_token < spans[i].end_token);
      CHECK(spans[i].end_token <= tokens.size());
      if (i > 0) CHECK(spans[i].start_token >= spans[i - 1].end_token);
    }
  }
}

TEST_CASE("trailing unk tokens do not change the spans") {
  auto base = toks("swiss two six eight nine descend");
  auto spans_a = tag_entities(base, table());
  auto extended = base;
  extended.push_back("[unk]");
  extended.push_back("[unk]");
  auto spans_b = tag_entities(extended, table());
  REQUIRE(spans_a.size() == spans_b.size());
  for (size_t i = 0; i < spans_a.size(); ++i) CHECK(spans_a[i] == spans_b[i]);
}

TEST_CASE("tagger output agrees with the inline markup model") {
  auto tokens = toks("[unk] swiss two six eight nine descend flight level one two zero");
  auto spans = tag_entities(tokens, table());
  std::string markup = formats::spans_to_markup(tokens, spans);
  formats::MarkupText parsed = formats::markup_to_spans(markup);
  CHECK(parsed.tokens == tokens);
  REQUIRE(parsed.spans.size() == spans.size());
  for (size_t i = 0; i < spans.size(); ++i) CHECK(parsed.spans[i] == spans[i]);
}

TEST_CASE("speaker role: controller keywords vote atco") {
  auto tokens = toks(
      "[unk] quebec lima affirm cleared ils approach runway one four "
      "if you go around runway one four report in localizer established");
  CHECK(classify_speaker_role(tokens) == SpeakerRole::Atco);
}

TEST_CASE("speaker role: acknowledgments vote pilot") {
  CHECK(classify_speaker_role(toks("wilco swiss two six eight nine")) == SpeakerRole::Pilot);
  CHECK(classify_speaker_role(toks("roger descending flight level eight zero")) ==
        SpeakerRole::Pilot);
  CHECK(classify_speaker_role(toks("request startup with you runway two seven")) ==
        SpeakerRole::Pilot);
}

TEST_CASE("speaker role: empty or neutral text is unknown") {
  CHECK(classify_speaker_role({}) == SpeakerRole::Unknown);
  CHECK(classify_speaker_role(toks("good morning")) == SpeakerRole::Unknown);
}

TEST_CASE("shipped grammar file matches the embedded default") {
  std::ifstream in(std::string(ATCDP_DATA_DIR) + "/tag_grammar.txt");
  REQUIRE(in.good());
  TagGrammar file = load_tag_grammar(in);
  const TagGrammar& def = default_tag_grammar();
  CHECK(file.command_keywords == def.command_keywords);
  CHECK(file.command_aux == def.command_aux);
  CHECK(file.value_units == def.value_units);
  CHECK(file.value_connectors == def.value_connectors);
  CHECK(file.atco_keywords == def.atco_keywords);
  CHECK(file.pilot_keywords == def.pilot_keywords);
}

TEST_CASE("custom grammar files load by section") {
  std::string doc =
      "[command_keywords]\nbanana\n[command_aux]\nthe\n[value_units]\nrunway\n"
      "[atco_keywords]\nbanana\n[pilot_keywords]\nmango\n";
  TagGrammar g = load_tag_grammar(doc);
  CHECK(g.command_keywords.size() == 1);
  CHECK(g.command_aux.count("the") == 1);
  auto tokens = toks("banana the tower");
  auto spans = tag_entities(tokens, table(), g);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].label == EntityLabel::Command);
  CHECK(spans[0].start_token == 0);
  CHECK(spans[0].end_token == 2);  // "tower" is not aux in this grammar
  CHECK(classify_speaker_role(toks("banana"), g) == SpeakerRole::Atco);
  CHECK(classify_speaker_role(toks("mango"), g) == SpeakerRole::Pilot);
  CHECK_THROWS_AS(load_tag_grammar(std::string("orphan\n")), ParseError);
}
