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

#ifndef ATCDP_CNET_HPP
#define ATCDP_CNET_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "atcdp/error.hpp"

namespace atcdp::formats {

/// One word hypothesis inside a confusion-network bin. The raw confidence
/// string is kept so a parsed file re-serializes byte-identically.
struct Alternative {
  std::string word;
  double conf = 0.0;
  std::string conf_raw;
};

/// Confusion-network bin: a time slot with ranked word alternatives whose
/// confidences sum to at most one (the residual mass is the implicit
/// epsilon arc).
struct Bin {
  double t_begin = 0.0;
  double dur = 0.0;
  std::vector<Alternative> alternatives;
  std::string t_begin_raw;
  std::string dur_raw;
};

struct ConfusionNetwork {
  std::string wav_id;
  std::string channel;  // single-letter speaker/channel tag
  std::vector<Bin> bins;

  const Alternative* best(size_t bin) const {
    if (bin >= bins.size() || bins[bin].alternatives.empty()) return nullptr;
    return &bins[bin].alternatives.front();
  }

  /// Best-path words, one per bin.
  std::vector<std::string> best_words() const {
    std::vector<std::string> out;
    out.reserve(bins.size());
    for (const auto& b : bins)
      if (!b.alternatives.empty()) out.push_back(b.alternatives.front().word);
    return out;
  }

  /// Average best-word confidence over all bins (the CNET score).
  double average_confidence() const {
    if (bins.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& b : bins) acc += b.alternatives.empty() ? 0.0 : b.alternatives.front().conf;
    return acc / static_cast<double>(bins.size());
  }
};

namespace detail {

inline constexpr double kConfSumEps = 1e-3;

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

inline std::string format_fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace detail

/// Parses the extended-CTM confusion-network format:
///
///   <wav-id> <speaker> <t_begin> <dur> <word1> <conf1> <word2> <conf2> ...
///
/// Lines are grouped into networks by (wav-id, speaker) in first-appearance
/// order; within a group, bins must arrive ordered by start time and
/// non-overlapping. Violations are reported with the 1-based line number.
inline std::vector<ConfusionNetwork> parse_cnet(std::istream& in) {
  std::vector<ConfusionNetwork> nets;
  std::map<std::string, size_t> index;  // "wav_id speaker" -> position in nets

  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::istringstream ls(line);
    std::vector<std::string> fields;
    std::string f;
    while (ls >> f) fields.push_back(f);
    if (fields.size() >= 5 && (fields.size() - 4) % 2 != 0)
      throw ParseError("cnet word '" + fields.back() + "' has no confidence", lineno);
    if (fields.size() < 6) throw ParseError("cnet line too short", lineno);

    Bin bin;
    bin.t_begin_raw = fields[2];
    bin.dur_raw = fields[3];
    if (!detail::parse_double(fields[2], bin.t_begin) || bin.t_begin < 0.0)
      throw ParseError("bad begin time '" + fields[2] + "'", lineno);
    if (!detail::parse_double(fields[3], bin.dur) || bin.dur <= 0.0)
      throw ParseError("bad duration '" + fields[3] + "'", lineno);

    double conf_sum = 0.0;
    double prev_conf = 2.0;
    for (size_t i = 4; i + 1 < fields.size(); i += 2) {
      Alternative alt;
      alt.word = fields[i];
      alt.conf_raw = fields[i + 1];
      if (!detail::parse_double(fields[i + 1], alt.conf))
        throw ParseError("bad confidence '" + fields[i + 1] + "'", lineno);
      if (alt.conf <= 0.0 || alt.conf > 1.0)
        throw ParseError("confidence outside (0,1]: " + fields[i + 1], lineno);
      if (alt.conf > prev_conf + 1e-12)
        throw ParseError("alternatives not sorted by descending confidence", lineno);
      prev_conf = alt.conf;
      conf_sum += alt.conf;
      bin.alternatives.push_back(std::move(alt));
    }
    if (conf_sum > 1.0 + detail::kConfSumEps)
      throw ParseError("bin confidences sum to " + std::to_string(conf_sum) + " > 1", lineno);

    std::string key = fields[0] + ' ' + fields[1];
    auto it = index.find(key);
    if (it == index.end()) {
      index[key] = nets.size();
      nets.push_back(ConfusionNetwork{fields[0], fields[1], {}});
      it = index.find(key);
    }
    ConfusionNetwork& net = nets[it->second];
    if (!net.bins.empty()) {
      const Bin& prev = net.bins.back();
      if (bin.t_begin < prev.t_begin)
        throw ParseError("bins out of order for " + key, lineno);
      if (bin.t_begin < prev.t_begin + prev.dur - 1e-6)
        throw ParseError("overlapping bins for " + key, lineno);
    }
    net.bins.push_back(std::move(bin));
  }
  return nets;
}

inline std::vector<ConfusionNetwork> parse_cnet(const std::string& text) {
  std::istringstream in(text);
  return parse_cnet(in);
}

/// Serializes networks back to extended-CTM lines. Numeric fields reuse the
/// exact decimal strings they were parsed from; values built in memory are
/// written with 3 decimals.
inline void write_cnet(std::ostream& out, const std::vector<ConfusionNetwork>& nets) {
  for (const auto& net : nets) {
    for (const auto& bin : net.bins) {
      out << net.wav_id << ' ' << net.channel << ' '
          << (bin.t_begin_raw.empty() ? detail::format_fixed3(bin.t_begin) : bin.t_begin_raw)
          << ' ' << (bin.dur_raw.empty() ? detail::format_fixed3(bin.dur) : bin.dur_raw);
      for (const auto& alt : bin.alternatives)
        out << ' ' << alt.word << ' '
            << (alt.conf_raw.empty() ? detail::format_fixed3(alt.conf) : alt.conf_raw);
      out << '\n';
    }
  }
}

inline std::string write_cnet(const std::vector<ConfusionNetwork>& nets) {
  std::ostringstream out;
  write_cnet(out, nets);
  return out.str();
}

/// Structural equality ignoring raw strings (used by round-trip checks).
inline bool structurally_equal(const ConfusionNetwork& a, const ConfusionNetwork& b) {
  if (a.wav_id != b.wav_id || a.channel != b.channel || a.bins.size() != b.bins.size())
    return false;
  for (size_t i = 0; i < a.bins.size(); ++i) {
    const Bin& x = a.bins[i];
    const Bin& y = b.bins[i];
    if (std::fabs(x.t_begin - y.t_begin) > 1e-9 || std::fabs(x.dur - y.dur) > 1e-9) return false;
    if (x.alternatives.size() != y.alternatives.size()) return false;
    for (size_t j = 0; j < x.alternatives.size(); ++j) {
      if (x.alternatives[j].word != y.alternatives[j].word) return false;
      if (std::fabs(x.alternatives[j].conf - y.alternatives[j].conf) > 1e-9) return false;
    }
  }
  return true;
}

}  // namespace atcdp::formats

#endif  // ATCDP_CNET_HPP
