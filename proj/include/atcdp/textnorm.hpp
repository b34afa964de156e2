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

#ifndef ATCDP_TEXTNORM_HPP
#define ATCDP_TEXTNORM_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "atcdp/error.hpp"

namespace atcdp::textnorm {

enum class RuleCategory { IcaoAlphabet, CommonExpression, AirlineDesignator, Digit };

struct Rule {
  std::vector<std::string> pattern;      // whitespace-tokenized word sequence
  std::vector<std::string> replacement;  // lowercase tokens, underscores allowed
  RuleCategory category;
};

inline std::string_view category_name(RuleCategory c) {
  switch (c) {
    case RuleCategory::IcaoAlphabet: return "icao_alphabet";
    case RuleCategory::CommonExpression: return "common_expression";
    case RuleCategory::AirlineDesignator: return "airline_designator";
    case RuleCategory::Digit: return "digit";
  }
  return "";
}

namespace detail {

inline std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool is_open_marker(std::string_view t) {
  return t.size() > 3 && t.substr(0, 2) == "[#" && t.back() == ']';
}
inline bool is_close_marker(std::string_view t) {
  return t.size() > 4 && t.substr(0, 3) == "[/#" && t.back() == ']';
}
inline bool is_markup_token(std::string_view t) {
  return t == "[unk]" || is_open_marker(t) || is_close_marker(t);
}

// Splits a whitespace token into markup markers and plain word parts, so
// that "[#callsign]Quebec" becomes {"[#callsign]", "Quebec"}.
inline void explode_markup(std::string_view tok, std::vector<std::string>& out) {
  size_t i = 0;
  while (i < tok.size()) {
    if (tok[i] == '[') {
      size_t close = tok.find(']', i);
      if (close != std::string_view::npos) {
        out.emplace_back(tok.substr(i, close - i + 1));
        i = close + 1;
        continue;
      }
    }
    size_t j = tok.find('[', i);
    if (j == std::string_view::npos) j = tok.size();
    out.emplace_back(tok.substr(i, j - i));
    i = j;
  }
}

}  // namespace detail

/// Ordered transcript-unification rule set.
///
/// Rules rewrite word sequences into canonical word sequences; matching is
/// longest-pattern-first, left to right, iterated to a fixed point.
class RuleTable {
 public:
  void add(std::vector<std::string> pattern, std::vector<std::string> replacement,
           RuleCategory cat) {
    if (pattern.empty()) throw InvalidInput("rule with empty pattern");
    if (replacement.empty()) throw InvalidInput("rule with empty replacement");
    for (const auto& t : replacement)
      for (char c : t)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-'))
          throw InvalidInput("replacement token not lowercase: " + t);
    std::string key = join(pattern);
    if (by_pattern_.count(key)) throw InvalidInput("duplicate rule pattern: " + key);
    by_pattern_[key] = rules_.size();
    max_pattern_len_ = std::max(max_pattern_len_, pattern.size());
    rules_.push_back(Rule{std::move(pattern), std::move(replacement), cat});
  }

  const std::vector<Rule>& rules() const { return rules_; }
  size_t max_pattern_len() const { return max_pattern_len_; }

  /// Index of the rule matching tokens[pos..pos+len) for the longest len, or -1.
  long match_at(const std::vector<std::string>& tokens, size_t pos) const {
    size_t maxlen = std::min(max_pattern_len_, tokens.size() - pos);
    for (size_t len = maxlen; len >= 1; --len) {
      std::string key = tokens[pos];
      for (size_t k = 1; k < len; ++k) {
        key += ' ';
        key += tokens[pos + k];
      }
      auto it = by_pattern_.find(key);
      if (it != by_pattern_.end()) return static_cast<long>(it->second);
    }
    return -1;
  }

  static std::string join(const std::vector<std::string>& toks) {
    std::string s;
    for (size_t i = 0; i < toks.size(); ++i) {
      if (i) s += ' ';
      s += toks[i];
    }
    return s;
  }

 private:
  std::vector<Rule> rules_;
  std::map<std::string, size_t> by_pattern_;
  size_t max_pattern_len_ = 0;
};

/// Loads a rule table: one rule per line, `pattern<TAB>replacement<TAB>category`.
/// Blank lines and lines starting with '#' are skipped.
inline RuleTable load_rules(std::istream& in) {
  RuleTable table;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw ParseError("rule line needs pattern<TAB>replacement<TAB>category", lineno);
    auto pattern = detail::split_ws(line.substr(0, t1));
    auto replacement = detail::split_ws(line.substr(t1 + 1, t2 - t1 - 1));
    std::string cat = line.substr(t2 + 1);
    while (!cat.empty() && (cat.back() == '\r' || cat.back() == ' ')) cat.pop_back();
    RuleCategory rc;
    if (cat == "icao_alphabet") rc = RuleCategory::IcaoAlphabet;
    else if (cat == "common_expression") rc = RuleCategory::CommonExpression;
    else if (cat == "airline_designator") rc = RuleCategory::AirlineDesignator;
    else if (cat == "digit") rc = RuleCategory::Digit;
    else throw ParseError("unknown rule category: " + cat, lineno);
    try {
      table.add(std::move(pattern), std::move(replacement), rc);
    } catch (const InvalidInput& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return table;
}

inline RuleTable load_rules(const std::string& text) {
  std::istringstream in(text);
  return load_rules(in);
}

// Bundled unification table: radiotelephony-alphabet spellings, digits,
// common expressions and airline designators.
inline constexpr std::string_view kDefaultRulesTsv =
    "alpha\talfa\ticao_alphabet\n"
    "charly\tcharlie\ticao_alphabet\n"
    "juliet\tjuliett\ticao_alphabet\n"
    "oskar\toscar\ticao_alphabet\n"
    "xray\tx-ray\ticao_alphabet\n"
    "zoulou\tzulu\ticao_alphabet\n"
    "whisky\twhiskey\ticao_alphabet\n"
    "tripple\ttriple\ticao_alphabet\n"
    "niner\tnine\ticao_alphabet\n"
    "0\tzero\tdigit\n"
    "1\tone\tdigit\n"
    "2\ttwo\tdigit\n"
    "3\tthree\tdigit\n"
    "4\tfour\tdigit\n"
    "5\tfive\tdigit\n"
    "6\tsix\tdigit\n"
    "7\tseven\tdigit\n"
    "8\teight\tdigit\n"
    "9\tnine\tdigit\n"
    "take off\ttakeoff\tcommon_expression\n"
    "call sign\tcallsign\tcommon_expression\n"
    "readback\tread back\tcommon_expression\n"
    "flightlevel\tflight level\tcommon_expression\n"
    "stand by\tstandby\tcommon_expression\n"
    "start up\tstartup\tcommon_expression\n"
    "goodbye\tgood bye\tcommon_expression\n"
    "clear for\tcleared for\tcommon_expression\n"
    "lineup\tline up\tcommon_expression\n"
    "turnright\tturn right\tcommon_expression\n"
    "oclock\to'clock\tcommon_expression\n"
    "o clock\to'clock\tcommon_expression\n"
    "push back\tpushback\tcommon_expression\n"
    "descent direct\tdescend direct\tcommon_expression\n"
    "goodday\tgood day\tcommon_expression\n"
    "turbulance\tturbulence\tcommon_expression\n"
    "til\ttill\tcommon_expression\n"
    "qatar\tqatari\tairline_designator\n"
    "turkey\tturkish\tairline_designator\n"
    "air france\tairfrans\tairline_designator\n"
    "norshuttle\tnor shuttle\tairline_designator\n"
    "airvan\tair van\tairline_designator\n"
    "rynair\tryanair\tairline_designator\n"
    "airbaltic\tair_baltic\tairline_designator\n"
    "air berlin\tair_berlin\tairline_designator\n"
    "air canada\tair_canada\tairline_designator\n"
    "air china\tair_china\tairline_designator\n"
    "air europe\tair_europe\tairline_designator\n"
    "jet stream\tjet_stream\tairline_designator\n"
    "jetstream\tjet_stream\tairline_designator\n"
    "k l m\tk_l_m\tairline_designator\n"
    "klm\tk_l_m\tairline_designator\n"
    "korean air\tkorean_air\tairline_designator\n"
    "koreanair\tkorean_air\tairline_designator\n"
    "wizzair\twizz_air\tairline_designator\n"
    "top_jet\ttopjet\tairline_designator\n";

inline const RuleTable& default_rules() {
  static const RuleTable table = load_rules(std::string(kDefaultRulesTsv));
  return table;
}

namespace detail {

// Tokenize into word tokens and markup markers; markers glued onto words
// ("[#callsign]quebec") are separated out.
inline std::vector<std::string> tokenize_with_markup(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : split_ws(text)) {
    if (tok.find('[') == std::string::npos) {
      out.push_back(tok);
    } else {
      explode_markup(tok, out);
    }
  }
  return out;
}

// Reassemble tokens into text, re-gluing markup the way the annotation
// format writes it: opening markers stick to the next word, closing markers
// to the previous one, [unk] stands alone.
inline std::string join_with_markup(const std::vector<std::string>& tokens) {
  std::string out;
  bool glue_next = false;
  for (const auto& t : tokens) {
    bool glue_this = glue_next || (is_close_marker(t) && !out.empty() && out.back() != ' ');
    glue_next = false;
    if (!out.empty() && !glue_this) out += ' ';
    out += t;
    if (is_open_marker(t)) glue_next = true;
  }
  return out;
}

}  // namespace detail

/// Applies the unification rules to transcript text.
///
/// Words are lowercased; rules apply longest-pattern-first left to right and
/// the whole pass repeats until a fixed point (at most 5 passes). Entity
/// markup ([#tag], [/#tag], [unk]) passes through untouched and acts as a
/// boundary no rule can match across.
inline std::string normalize_text(std::string_view text, const RuleTable& table) {
  std::vector<std::string> tokens = detail::tokenize_with_markup(text);
  for (auto& t : tokens)
    if (!detail::is_markup_token(t)) t = detail::to_lower(t);

  for (int pass = 0; pass < 5; ++pass) {
    std::vector<std::string> next;
    next.reserve(tokens.size());
    bool changed = false;
    size_t i = 0;
    while (i < tokens.size()) {
      long r = -1;
      if (!detail::is_markup_token(tokens[i])) {
        // restrict the window so a pattern cannot span a markup marker
        size_t limit = i;
        while (limit < tokens.size() && !detail::is_markup_token(tokens[limit])) ++limit;
        std::vector<std::string> window(tokens.begin(), tokens.begin() + limit);
        r = table.match_at(window, i);
      }
      if (r >= 0) {
        const Rule& rule = table.rules()[static_cast<size_t>(r)];
        if (rule.replacement != std::vector<std::string>(
                                    tokens.begin() + static_cast<long>(i),
                                    tokens.begin() + static_cast<long>(i + rule.pattern.size())))
          changed = true;
        for (const auto& t : rule.replacement) next.push_back(t);
        i += rule.pattern.size();
      } else {
        next.push_back(tokens[i]);
        ++i;
      }
    }
    tokens = std::move(next);
    if (!changed) break;
  }
  return detail::join_with_markup(tokens);
}

/// Replaces every digit character by its spoken word from the rule table's
/// digit category; multi-digit groups expand digit by digit ("134" ->
/// "one three four"). Markup tokens pass through untouched.
inline std::string verbalize_digits(std::string_view text, const RuleTable& table) {
  std::map<char, std::string> digit_map;
  for (const auto& r : table.rules())
    if (r.category == RuleCategory::Digit && r.pattern.size() == 1 && r.pattern[0].size() == 1)
      digit_map[r.pattern[0][0]] = RuleTable::join(r.replacement);

  std::vector<std::string> tokens = detail::tokenize_with_markup(text);
  std::vector<std::string> out;
  for (const auto& tok : tokens) {
    if (detail::is_markup_token(tok) || tok.find_first_of("0123456789") == std::string::npos) {
      out.push_back(tok);
      continue;
    }
    std::string current;
    for (char c : tok) {
      auto it = digit_map.find(c);
      if (it != digit_map.end()) {
        if (!current.empty()) {
          out.push_back(current);
          current.clear();
        }
        out.push_back(it->second);
      } else {
        current += c;
      }
    }
    if (!current.empty()) out.push_back(current);
  }
  return detail::join_with_markup(out);
}

/// Removes entity markup, keeping the plain words (and [unk] tokens).
inline std::string strip_markup(std::string_view text) {
  std::vector<std::string> tokens = detail::tokenize_with_markup(text);
  std::vector<std::string> out;
  for (auto& t : tokens)
    if (!(detail::is_open_marker(t) || detail::is_close_marker(t))) out.push_back(std::move(t));
  std::string s;
  for (size_t i = 0; i < out.size(); ++i) {
    if (i) s += ' ';
    s += out[i];
  }
  return s;
}

}  // namespace atcdp::textnorm

#endif  // ATCDP_TEXTNORM_HPP
