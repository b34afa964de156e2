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

#ifndef ATCDP_TAGGER_HPP
#define ATCDP_TAGGER_HPP

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "atcdp/callsign.hpp"
#include "atcdp/entity.hpp"
#include "atcdp/error.hpp"
#include "atcdp/icao.hpp"

namespace atcdp::tagger {

enum class SpeakerRole { Atco, Pilot, Unknown };

inline std::string_view role_name(SpeakerRole r) {
  switch (r) {
    case SpeakerRole::Atco: return "atco";
    case SpeakerRole::Pilot: return "pilot";
    case SpeakerRole::Unknown: return "unknown";
  }
  return "";
}

/// Keyword lists driving the grammar tagger and the speaker-role votes.
/// Multi-word entries match as contiguous token phrases.
struct TagGrammar {
  std::vector<std::vector<std::string>> command_keywords;
  std::set<std::string> command_aux;  // words that may extend a command run
  std::vector<std::vector<std::string>> value_units;
  std::set<std::string> value_connectors;  // non-digit words allowed inside a number run
  std::vector<std::vector<std::string>> atco_keywords;
  std::vector<std::vector<std::string>> pilot_keywords;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

/// Loads a grammar file: keyword phrases one per line under section headers
/// [command_keywords], [command_aux], [value_units], [value_connectors],
/// [atco_keywords], [pilot_keywords]. '#' starts a comment line.
inline TagGrammar load_tag_grammar(std::istream& in) {
  TagGrammar g;
  std::string section;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed;
    {
      size_t a = line.find_first_not_of(" \t");
      size_t b = line.find_last_not_of(" \t");
      if (a != std::string::npos) trimmed = line.substr(a, b - a + 1);
    }
    if (trimmed.empty() || trimmed[0] == '#') continue;
    if (trimmed.front() == '[' && trimmed.back() == ']') {
      section = trimmed.substr(1, trimmed.size() - 2);
      continue;
    }
    auto phrase = detail::split_ws(trimmed);
    if (section == "command_keywords") g.command_keywords.push_back(phrase);
    else if (section == "command_aux") g.command_aux.insert(trimmed);
    else if (section == "value_units") g.value_units.push_back(phrase);
    else if (section == "value_connectors") g.value_connectors.insert(trimmed);
    else if (section == "atco_keywords") g.atco_keywords.push_back(phrase);
    else if (section == "pilot_keywords") g.pilot_keywords.push_back(phrase);
    else throw ParseError("keyword outside a known [section]", lineno);
  }
  return g;
}

inline TagGrammar load_tag_grammar(const std::string& text) {
  std::istringstream in(text);
  return load_tag_grammar(in);
}

inline constexpr std::string_view kDefaultTagGrammar = R"([command_keywords]
cleared
descend
climb
turn
contact
report
confirm
affirm
maintain
reduce
expect
squawk
taxi
cross
proceed
follow
hold
line up
go around
pushback
startup
vacate
backtrack
intercept
join
continue
cancel
expedite
orbit
standby
approved
identified
disregard
say again
monitor

[command_aux]
for
to
via
and
then
you
your
if
in
on
at
the
of
with
when
now
again
right
left
direct
short
position
behind
until
further
ils
localizer
approach
final
established
tower
ground
radar
frequency

[value_units]
flight level
runway
heading
altitude
qnh
knots
feet

[value_connectors]
decimal
point
hundred
thousand

[atco_keywords]
cleared
descend
climb
contact
turn
taxi
hold
line up
squawk
expect
approved
report
affirm
maintain
cross
vacate
backtrack
wind
identified
go around
radar contact

[pilot_keywords]
wilco
roger
request
requesting
with you
confirm
established
passing
climbing
descending
leaving
reaching
inbound
fully ready
mayday
pan pan
)";

inline const TagGrammar& default_tag_grammar() {
  static const TagGrammar g = load_tag_grammar(std::string(kDefaultTagGrammar));
  return g;
}

namespace detail {

// Marks tokens covered by any phrase occurrence, longest phrase first at
// each position; skips already-consumed tokens.
inline std::vector<char> cover_phrases(const std::vector<std::string>& tokens,
                                       const std::vector<char>& consumed,
                                       const std::vector<std::vector<std::string>>& phrases) {
  std::vector<char> covered(tokens.size(), 0);
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (consumed[i]) continue;
    size_t best = 0;
    for (const auto& p : phrases) {
      if (p.empty() || p.size() > tokens.size() - i || p.size() <= best) continue;
      bool ok = true;
      for (size_t k = 0; k < p.size(); ++k)
        if (consumed[i + k] || tokens[i + k] != p[k]) {
          ok = false;
          break;
        }
      if (ok) best = p.size();
    }
    for (size_t k = 0; k < best; ++k) covered[i + k] = 1;
  }
  return covered;
}

inline size_t count_phrase_votes(const std::vector<std::string>& tokens,
                                 const std::vector<std::vector<std::string>>& phrases) {
  size_t votes = 0;
  for (const auto& p : phrases) {
    if (p.empty() || p.size() > tokens.size()) continue;
    for (size_t i = 0; i + p.size() <= tokens.size(); ++i) {
      bool ok = true;
      for (size_t k = 0; k < p.size(); ++k)
        if (tokens[i + k] != p[k]) {
          ok = false;
          break;
        }
      if (ok) {
        ++votes;
        i += p.size() - 1;
      }
    }
  }
  return votes;
}

}  // namespace detail

/// Grammar tagger over normalized tokens.
///
/// Callsign spans are maximal runs of (telephony | acronym | alphabet word)
/// followed by at least one digit/alphabet word; value spans are digit-word
/// runs optionally preceded by a unit phrase; command spans are the
/// remaining keyword/auxiliary runs containing at least one command keyword.
/// Overlaps resolve by priority callsign > value > command, so spans never
/// overlap and come out sorted by start.
inline std::vector<EntitySpan> tag_entities(const std::vector<std::string>& tokens,
                                            const callsign::DesignatorTable& table,
                                            const TagGrammar& grammar = default_tag_grammar()) {
  size_t n = tokens.size();
  std::vector<EntitySpan> spans;
  std::vector<char> consumed(n, 0);

  const std::set<std::string> telephony = table.telephony_tokens();
  auto spelled = [](const std::string& t) {
    return icao::is_digit_word(t) || icao::is_letter_word(t);
  };

  // callsign pass
  for (size_t i = 0; i < n; ++i) {
    bool head = telephony.count(tokens[i]) || icao::is_acronym_token(tokens[i]) ||
                icao::is_letter_word(tokens[i]);
    if (!head) continue;
    size_t j = i + 1;
    while (j < n && spelled(tokens[j])) ++j;
    if (j - i >= 2) {
      spans.push_back(EntitySpan{EntityLabel::Callsign, i, j});
      for (size_t k = i; k < j; ++k) consumed[k] = 1;
      i = j - 1;
    }
  }

  // value pass: unit phrase (optional) + number run with at least one digit word
  std::vector<char> unit_covered = detail::cover_phrases(tokens, consumed, grammar.value_units);
  for (size_t i = 0; i < n; ++i) {
    if (consumed[i]) continue;
    size_t start = i;
    size_t j = i;
    while (j < n && !consumed[j] && unit_covered[j]) ++j;
    size_t digits = 0;
    size_t k = j;
    while (k < n && !consumed[k] &&
           (icao::is_digit_word(tokens[k]) || grammar.value_connectors.count(tokens[k]))) {
      if (icao::is_digit_word(tokens[k])) ++digits;
      ++k;
    }
    // trailing connectors stay outside the span
    while (k > j && !icao::is_digit_word(tokens[k - 1])) --k;
    if (digits > 0) {
      spans.push_back(EntitySpan{EntityLabel::Value, start, k});
      for (size_t t = start; t < k; ++t) consumed[t] = 1;
      i = k - 1;
    } else if (j > start) {
      i = j - 1;  // unit words without a number are not a value
    }
  }

  // command pass: keyword/aux runs containing at least one keyword
  std::vector<char> kw_covered = detail::cover_phrases(tokens, consumed, grammar.command_keywords);
  for (size_t i = 0; i < n; ++i) {
    if (consumed[i]) continue;
    bool member = kw_covered[i] || grammar.command_aux.count(tokens[i]);
    if (!member) continue;
    size_t j = i;
    bool has_kw = false;
    while (j < n && !consumed[j] && (kw_covered[j] || grammar.command_aux.count(tokens[j]))) {
      has_kw = has_kw || kw_covered[j];
      ++j;
    }
    if (has_kw) {
      spans.push_back(EntitySpan{EntityLabel::Command, i, j});
      for (size_t t = i; t < j; ++t) consumed[t] = 1;
    }
    i = j - 1;
  }

  std::sort(spans.begin(), spans.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start_token < b.start_token; });
  return spans;
}

/// Keyword-vote heuristic: clearance-issuing keywords vote ATCO,
/// acknowledgment keywords vote pilot; zero or tied votes give unknown.
inline SpeakerRole classify_speaker_role(const std::vector<std::string>& tokens,
                                         const TagGrammar& grammar = default_tag_grammar()) {
  size_t atco = detail::count_phrase_votes(tokens, grammar.atco_keywords);
  size_t pilot = detail::count_phrase_votes(tokens, grammar.pilot_keywords);
  if (atco > pilot) return SpeakerRole::Atco;
  if (pilot > atco) return SpeakerRole::Pilot;
  return SpeakerRole::Unknown;
}

}  // namespace atcdp::tagger

#endif  // ATCDP_TAGGER_HPP
