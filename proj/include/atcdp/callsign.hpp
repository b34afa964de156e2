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

#ifndef ATCDP_CALLSIGN_HPP
#define ATCDP_CALLSIGN_HPP

#include <algorithm>
#include <cctype>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "atcdp/error.hpp"
#include "atcdp/icao.hpp"
#include "atcdp/lexicon.hpp"

namespace atcdp::callsign {

using TokenSeq = std::vector<std::string>;

/// Airline designator -> spoken telephony token. Multi-word telephony is
/// ligatured by underscore ("BTI" -> "air_baltic"), following the lexicon
/// conventions for designators.
class DesignatorTable {
 public:
  void add(std::string designator, std::string telephony) {
    for (auto& c : designator) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    map_[std::move(designator)] = std::move(telephony);
  }

  const std::string* lookup(std::string_view designator) const {
    std::string key(designator);
    for (auto& c : key) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
  }

  bool is_telephony(std::string_view token) const {
    for (const auto& [d, t] : map_)
      if (t == token) return true;
    return false;
  }

  std::set<std::string> telephony_tokens() const {
    std::set<std::string> out;
    for (const auto& [d, t] : map_) out.insert(t);
    return out;
  }

  size_t size() const { return map_.size(); }

 private:
  std::map<std::string, std::string> map_;
};

/// Loads `icao_3letter<TAB>telephony_token` lines.
inline DesignatorTable load_designators(std::istream& in) {
  DesignatorTable table;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("designator line needs icao<TAB>telephony", lineno);
    table.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return table;
}

inline DesignatorTable load_designators(const std::string& text) {
  std::istringstream in(text);
  return load_designators(in);
}

struct CallsignEntry {
  std::string icao_code;   // compact form, e.g. SWR2689
  std::string designator;  // 3-letter airline code, empty for registrations
  std::string telephony;   // spoken designator word(s), may be empty
  std::string suffix;      // alphanumeric tail spelled character by character
};

/// Builds an entry from a compact code. The first three characters are
/// taken as the airline designator when the table knows them or when the
/// code continues with a digit; otherwise the code is treated as a
/// registration and spelled out whole.
inline CallsignEntry entry_from_code(std::string code, const DesignatorTable& table) {
  for (auto& c : code) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (code.empty()) throw InvalidInput("empty callsign code");
  for (char c : code)
    if (!std::isalnum(static_cast<unsigned char>(c)))
      throw InvalidInput("callsign code must be alphanumeric: " + code);

  CallsignEntry e;
  e.icao_code = code;
  bool three_letters = code.size() > 3 && std::isalpha(static_cast<unsigned char>(code[0])) &&
                       std::isalpha(static_cast<unsigned char>(code[1])) &&
                       std::isalpha(static_cast<unsigned char>(code[2]));
  if (three_letters) {
    std::string head = code.substr(0, 3);
    const std::string* tel = table.lookup(head);
    if (tel != nullptr || std::isdigit(static_cast<unsigned char>(code[3]))) {
      e.designator = head;
      e.telephony = tel ? *tel : "";
      e.suffix = code.substr(3);
      return e;
    }
  }
  e.suffix = code;  // registration: no designator
  return e;
}

/// Spoken expansion of a callsign: telephony word(s) followed by the suffix
/// verbalized character by character (digit words / ICAO alphabet). Returns
/// the primary expansion as the single element of the list.
inline std::vector<TokenSeq> expand_callsign(const CallsignEntry& e, const DesignatorTable& table) {
  if (e.icao_code.empty() && e.designator.empty() && e.suffix.empty())
    throw InvalidInput("expand_callsign: empty callsign");

  TokenSeq tokens;
  if (!e.designator.empty()) {
    if (!e.telephony.empty()) {
      tokens.push_back(e.telephony);
    } else if (const std::string* tel = table.lookup(e.designator)) {
      tokens.push_back(*tel);
    } else {
      tokens.push_back(lexicon::acronym_token(e.designator));
    }
  }
  for (char c : e.suffix) {
    if (auto d = icao::digit_word(c)) {
      tokens.emplace_back(*d);
    } else if (auto l = icao::letter_word(c)) {
      tokens.emplace_back(*l);
    } else {
      throw InvalidInput(std::string("cannot verbalize character: ") + c);
    }
  }
  if (tokens.empty()) throw InvalidInput("expand_callsign: empty expansion");
  return {tokens};
}

namespace detail {

// Longest suffix made of digit words / alphabet words; the part before it
// is the telephony prefix.
inline size_t spelled_tail_start(const TokenSeq& expansion) {
  size_t i = expansion.size();
  while (i > 0 && (icao::is_digit_word(expansion[i - 1]) || icao::is_letter_word(expansion[i - 1])))
    --i;
  return i;
}

inline void push_unique(std::vector<TokenSeq>& out, std::set<std::string>& seen, TokenSeq v) {
  std::string key;
  for (const auto& t : v) {
    key += t;
    key += ' ';
  }
  if (seen.insert(key).second) out.push_back(std::move(v));
}

}  // namespace detail

/// Variants a crew commonly uses in place of the full spoken callsign:
/// the full form, the last 3 and last 2 spelled tokens, and telephony plus
/// the last 2 tokens. Deduplicated, full form first.
inline std::vector<TokenSeq> shorten_variants(const TokenSeq& expansion) {
  std::vector<TokenSeq> out;
  std::set<std::string> seen;
  if (expansion.empty()) return out;
  detail::push_unique(out, seen, expansion);

  size_t tail_start = detail::spelled_tail_start(expansion);
  size_t tail_len = expansion.size() - tail_start;
  for (size_t k : {3u, 2u}) {
    if (tail_len >= k)
      detail::push_unique(out, seen,
                          TokenSeq(expansion.end() - static_cast<long>(k), expansion.end()));
  }
  if (tail_start > 0 && tail_len >= 2) {
    TokenSeq v(expansion.begin(), expansion.begin() + static_cast<long>(tail_start));
    v.insert(v.end(), expansion.end() - 2, expansion.end());
    detail::push_unique(out, seen, std::move(v));
  }
  return out;
}

/// Aircraft known to be near the receiver around the utterance time.
struct SurveillanceContext {
  std::vector<CallsignEntry> callsigns;  // unique by icao_code
  double timestamp = 0.0;                // epoch seconds
};

struct Match {
  std::string icao_code;
  int distance = 0;
  size_t matched_len = 0;  // length of the best-matching variant
};

namespace detail {

inline int token_levenshtein(const TokenSeq& a, const TokenSeq& b) {
  size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace detail

/// Ranks every context entry by the minimum token-level Levenshtein distance
/// between the extracted span and any shortened variant of the entry's
/// expansion. Always returns a full ranking over the provided list; ties are
/// broken by longer matched variant, then by icao_code.
inline std::vector<Match> match_callsign(const TokenSeq& span, const SurveillanceContext& ctx,
                                         const DesignatorTable& table) {
  if (span.empty()) throw InvalidInput("match_callsign: empty span");
  if (ctx.callsigns.empty()) throw InvalidInput("match_callsign: empty surveillance context");

  std::vector<Match> ranked;
  for (const auto& entry : ctx.callsigns) {
    Match m{entry.icao_code, std::numeric_limits<int>::max(), 0};
    for (const auto& expansion : expand_callsign(entry, table)) {
      for (const auto& variant : shorten_variants(expansion)) {
        int d = detail::token_levenshtein(span, variant);
        if (d < m.distance || (d == m.distance && variant.size() > m.matched_len)) {
          m.distance = d;
          m.matched_len = variant.size();
        }
      }
    }
    ranked.push_back(std::move(m));
  }
  std::sort(ranked.begin(), ranked.end(), [](const Match& a, const Match& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.matched_len != b.matched_len) return a.matched_len > b.matched_len;
    return a.icao_code < b.icao_code;
  });
  return ranked;
}

/// Per-utterance boosting list: every expansion variant of every context
/// entry plus all their contiguous sub-sequences of length >= 2,
/// deduplicated in first-occurrence order.
inline std::vector<TokenSeq> context_ngrams(const SurveillanceContext& ctx,
                                            const DesignatorTable& table) {
  std::vector<TokenSeq> out;
  std::set<std::string> seen;
  for (const auto& entry : ctx.callsigns) {
    for (const auto& expansion : expand_callsign(entry, table)) {
      for (const auto& variant : shorten_variants(expansion)) {
        detail::push_unique(out, seen, variant);
        for (size_t start = 0; start < variant.size(); ++start)
          for (size_t len = 2; start + len <= variant.size(); ++len)
            detail::push_unique(out, seen,
                                TokenSeq(variant.begin() + static_cast<long>(start),
                                         variant.begin() + static_cast<long>(start + len)));
      }
    }
  }
  return out;
}

}  // namespace atcdp::callsign

#endif  // ATCDP_CALLSIGN_HPP
