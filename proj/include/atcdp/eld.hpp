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

#ifndef ATCDP_ELD_HPP
#define ATCDP_ELD_HPP

#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "atcdp/cnet.hpp"
#include "atcdp/error.hpp"
#include "atcdp/lexicon.hpp"

namespace atcdp::eld {

/// Probability-like score that an utterance is English, in [0, 1].
struct EnglishScore {
  double value = 0.0;
};

/// Recordings with score >= 0.5 count as English in corpus statistics.
inline constexpr double kEnglishSplit = 0.5;

/// Pluggable scorer interface so externally computed scores (or another
/// model) can stand in for the reference implementation.
class EnglishScorer {
 public:
  virtual ~EnglishScorer() = default;
  virtual EnglishScore score(const formats::ConfusionNetwork& net) const = 0;
};

/// Reference scorer: confidence-weighted in-vocabulary mass of the best
/// path. For bins with best confidence c_i and best word w_i the score is
/// sum(c_i * [w_i in lexicon]) / sum(c_i).
class LexicalScorer : public EnglishScorer {
 public:
  explicit LexicalScorer(const lexicon::Lexicon& lex) : lex_(lex) {}

  EnglishScore score(const formats::ConfusionNetwork& net) const override {
    if (net.bins.empty()) throw InvalidInput("english_score: network has no bins");
    double mass = 0.0, in_vocab = 0.0;
    for (const auto& bin : net.bins) {
      if (bin.alternatives.empty()) continue;
      const auto& best = bin.alternatives.front();
      mass += best.conf;
      if (lex_.contains(best.word)) in_vocab += best.conf;
    }
    if (mass <= 0.0) throw InvalidInput("english_score: zero confidence mass");
    return {in_vocab / mass};
  }

 private:
  const lexicon::Lexicon& lex_;
};

inline EnglishScore english_score(const formats::ConfusionNetwork& net,
                                  const lexicon::Lexicon& lex) {
  return LexicalScorer(lex).score(net);
}

/// Per-utterance scores ingested from a `wav_id<TAB>score` file, so
/// published language scores can be used verbatim.
class ExternalScoreTable {
 public:
  static ExternalScoreTable load(std::istream& in) {
    ExternalScoreTable t;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      size_t tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError("score line needs wav_id<TAB>score", lineno);
      double v = 0.0;
      if (!formats::detail::parse_double(line.substr(tab + 1), v) || v < 0.0 || v > 1.0)
        throw ParseError("score outside [0,1]: " + line.substr(tab + 1), lineno);
      t.scores_[line.substr(0, tab)] = v;
    }
    return t;
  }

  std::optional<double> lookup(const std::string& wav_id) const {
    auto it = scores_.find(wav_id);
    if (it == scores_.end()) return std::nullopt;
    return it->second;
  }

  size_t size() const { return scores_.size(); }

 private:
  std::map<std::string, double> scores_;
};

/// Scorer backed by an external score table, keyed by the network's wav_id.
class ExternalScorer : public EnglishScorer {
 public:
  explicit ExternalScorer(ExternalScoreTable table) : table_(std::move(table)) {}

  EnglishScore score(const formats::ConfusionNetwork& net) const override {
    auto v = table_.lookup(net.wav_id);
    if (!v) throw InvalidInput("no external language score for " + net.wav_id);
    return {*v};
  }

 private:
  ExternalScoreTable table_;
};

}  // namespace atcdp::eld

#endif  // ATCDP_ELD_HPP
