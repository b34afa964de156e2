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

#ifndef ATCDP_LEXICON_HPP
#define ATCDP_LEXICON_HPP

#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "atcdp/error.hpp"
#include "atcdp/textnorm.hpp"

namespace atcdp::lexicon {

enum class Source { Transcripts = 0, Designators = 1, Waypoints = 2, Manual = 3 };

inline std::string_view source_name(Source s) {
  switch (s) {
    case Source::Transcripts: return "transcripts";
    case Source::Designators: return "designators";
    case Source::Waypoints: return "waypoints";
    case Source::Manual: return "manual";
  }
  return "";
}

inline Source source_from_name(std::string_view n) {
  if (n == "transcripts") return Source::Transcripts;
  if (n == "designators") return Source::Designators;
  if (n == "waypoints") return Source::Waypoints;
  if (n == "manual") return Source::Manual;
  throw InvalidInput("unknown lexicon source: " + std::string(n));
}

struct Entry {
  Source source = Source::Transcripts;
  // Each pronunciation is a phone-symbol sequence; empty when no
  // pronunciation data is available (the lexicon still works as a token
  // inventory for OOV checking and language scoring).
  std::vector<std::vector<std::string>> pronunciations;
};

/// Converts a spelled acronym of 2-4 letters into its single-token form,
/// "KLM" -> "k_l_m". A single letter is a plain alphabet word, not an acronym.
inline std::string acronym_token(std::string_view spelled) {
  if (spelled.size() < 2 || spelled.size() > 4)
    throw InvalidInput("acronym must be 2-4 letters: " + std::string(spelled));
  std::string out;
  for (char c : spelled) {
    if (!std::isalpha(static_cast<unsigned char>(c)))
      throw InvalidInput("acronym must be letters only: " + std::string(spelled));
    if (!out.empty()) out += '_';
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

/// Token inventory with per-entry provenance; immutable in spirit after build.
class Lexicon {
 public:
  /// Inserts a token. When the token already exists the stronger source wins
  /// (transcripts > designators > waypoints > manual), which keeps builds
  /// independent of input order; pronunciations are merged.
  void add(const std::string& token, Source src,
           const std::vector<std::string>& pronunciation = {}) {
    if (token.empty()) return;
    auto [it, inserted] = entries_.try_emplace(token);
    Entry& e = it->second;
    if (inserted || static_cast<int>(src) < static_cast<int>(e.source)) e.source = src;
    if (!pronunciation.empty()) {
      for (const auto& p : e.pronunciations)
        if (p == pronunciation) return;
      e.pronunciations.push_back(pronunciation);
    }
  }

  bool contains(std::string_view token) const {
    return entries_.find(std::string(token)) != entries_.end();
  }

  size_t size() const { return entries_.size(); }

  size_t count(Source src) const {
    size_t n = 0;
    for (const auto& [tok, e] : entries_)
      if (e.source == src) ++n;
    return n;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

struct ResourceLists {
  std::vector<std::string> designators;  // airline designator telephony tokens
  std::vector<std::string> waypoints;    // five-letter waypoint names
  std::vector<std::string> manual;       // hand-added extra words
};

/// Builds the lexicon as the union of all token sources.
///
/// Transcript tokens are expected normalized; uppercase 2-4 letter tokens
/// (spelled acronyms in raw text) are converted via acronym_token, anything
/// else is lowercased. Markup tokens are skipped.
inline Lexicon build_lexicon(const std::vector<std::string>& transcript_tokens,
                             const ResourceLists& extra = {}) {
  Lexicon lex;
  for (const auto& tok : transcript_tokens) {
    if (tok.empty() || tok.front() == '[') continue;
    bool upper_acronym = tok.size() >= 2 && tok.size() <= 4;
    for (char c : tok)
      if (!std::isupper(static_cast<unsigned char>(c))) upper_acronym = false;
    if (upper_acronym) {
      lex.add(acronym_token(tok), Source::Transcripts);
    } else {
      lex.add(textnorm::detail::to_lower(tok), Source::Transcripts);
    }
  }
  for (const auto& t : extra.designators)
    lex.add(textnorm::detail::to_lower(t), Source::Designators);
  for (const auto& t : extra.waypoints)
    lex.add(textnorm::detail::to_lower(t), Source::Waypoints);
  for (const auto& t : extra.manual)
    lex.add(textnorm::detail::to_lower(t), Source::Manual);
  return lex;
}

/// Tokens absent from the lexicon, deduplicated, in first-occurrence order.
inline std::vector<std::string> check_oov(const std::vector<std::string>& tokens,
                                          const Lexicon& lex) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : tokens) {
    if (lex.contains(t)) continue;
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

/// Writes `token<TAB>source[<TAB>phone phone ...]`, one line per
/// pronunciation (or a single line when there is none).
inline void save_lexicon(std::ostream& out, const Lexicon& lex) {
  for (const auto& [tok, e] : lex.entries()) {
    if (e.pronunciations.empty()) {
      out << tok << '\t' << source_name(e.source) << '\n';
      continue;
    }
    for (const auto& pron : e.pronunciations) {
      out << tok << '\t' << source_name(e.source) << '\t';
      for (size_t i = 0; i < pron.size(); ++i) {
        if (i) out << ' ';
        out << pron[i];
      }
      out << '\n';
    }
  }
}

inline Lexicon load_lexicon(std::istream& in) {
  Lexicon lex;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t t1 = line.find('\t');
    if (t1 == std::string::npos) throw ParseError("lexicon line needs token<TAB>source", lineno);
    size_t t2 = line.find('\t', t1 + 1);
    std::string token = line.substr(0, t1);
    std::string src = t2 == std::string::npos ? line.substr(t1 + 1)
                                              : line.substr(t1 + 1, t2 - t1 - 1);
    std::vector<std::string> pron;
    if (t2 != std::string::npos)
      pron = textnorm::detail::split_ws(line.substr(t2 + 1));
    lex.add(token, source_from_name(src), pron);
  }
  return lex;
}

}  // namespace atcdp::lexicon

#endif  // ATCDP_LEXICON_HPP
