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

#ifndef ATCDP_METRICS_HPP
#define ATCDP_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "atcdp/entity.hpp"
#include "atcdp/error.hpp"
#include "atcdp/quality.hpp"

namespace atcdp::metrics {

/// Word-error-rate components: wer = 100 * (I + D + S) / N over N reference
/// words; may exceed 100.
struct WerBreakdown {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int reference_words = 0;

  int total_errors() const { return substitutions + insertions + deletions; }
  double wer() const {
    return reference_words > 0 ? 100.0 * total_errors() / reference_words : 0.0;
  }
};

/// Minimal-edit alignment with unit costs. Ties prefer substitution over an
/// insertion+deletion pair (and deletion over insertion), so the breakdown
/// is deterministic across platforms.
inline WerBreakdown wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  if (ref.empty()) throw InvalidInput("wer: empty reference");
  size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                          d[i - 1][j] + 1, d[i][j - 1] + 1});

  WerBreakdown b;
  b.reference_words = static_cast<int>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++b.substitutions;
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++b.deletions;
      --i;
    } else {
      ++b.insertions;
      --j;
    }
  }
  return b;
}

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

/// Precision/recall/F1; a zero denominator yields 0 with degenerate set.
struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;
};

inline Prf1 prf1(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.fn < 0) throw InvalidInput("prf1: negative counts");
  Prf1 r;
  if (c.tp + c.fp > 0) r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  else r.degenerate = true;
  if (c.tp + c.fn > 0) r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  else r.degenerate = true;
  if (r.precision + r.recall > 0.0)
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

namespace detail {

inline void check_no_overlap(const std::vector<EntitySpan>& spans) {
  std::vector<EntitySpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end(), [](const EntitySpan& a, const EntitySpan& b) {
    return a.start_token < b.start_token;
  });
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].start_token >= sorted[i].end_token)
      throw InvalidInput("entity_eval: empty span");
    if (i > 0 && sorted[i].start_token < sorted[i - 1].end_token)
      throw InvalidInput("entity_eval: overlapping spans in one segment");
  }
}

}  // namespace detail

/// Exact-match span scoring (label and both boundaries) per label,
/// aggregated over parallel gold/prediction segment lists.
inline std::map<EntityLabel, ConfusionCounts> entity_eval(
    const std::vector<std::vector<EntitySpan>>& gold,
    const std::vector<std::vector<EntitySpan>>& pred) {
  if (gold.size() != pred.size())
    throw InvalidInput("entity_eval: gold and prediction segment counts differ");
  std::map<EntityLabel, ConfusionCounts> counts;
  counts[EntityLabel::Callsign];
  counts[EntityLabel::Command];
  counts[EntityLabel::Value];

  for (size_t seg = 0; seg < gold.size(); ++seg) {
    detail::check_no_overlap(gold[seg]);
    detail::check_no_overlap(pred[seg]);
    std::set<std::tuple<EntityLabel, size_t, size_t>> gold_set;
    for (const auto& s : gold[seg]) gold_set.insert({s.label, s.start_token, s.end_token});
    std::set<std::tuple<EntityLabel, size_t, size_t>> matched;
    for (const auto& s : pred[seg]) {
      auto key = std::tuple{s.label, s.start_token, s.end_token};
      if (gold_set.count(key)) {
        ++counts[s.label].tp;
        matched.insert(key);
      } else {
        ++counts[s.label].fp;
      }
    }
    for (const auto& s : gold[seg])
      if (!matched.count({s.label, s.start_token, s.end_token})) ++counts[s.label].fn;
  }
  return counts;
}

/// Per-airport descriptive statistics in the corpus-table style.
struct AirportStats {
  std::string airport;
  long segments = 0;
  double total_speech_hours = 0.0;
  double duration_mean = 0.0, duration_std = 0.0;  // seconds
  double snr_mean = 0.0, snr_std = 0.0;            // dB
  double lang_mean = 0.0, lang_std = 0.0;
};

/// "mean/std" cell rendering, e.g. format_cell(6.0, 3.4, 1) -> "6.0/3.4".
inline std::string format_cell(double mean, double stddev, int decimals = 1) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*f/%.*f", decimals, mean, decimals, stddev);
  return buf;
}

namespace detail {

// population standard deviation (divide by n): the tables report
// descriptive per-sample statistics
inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return {mean, std::sqrt(var)};
}

}  // namespace detail

/// Aggregates metadata records per airport: counts, summed speech hours and
/// mean/std of duration, SNR and language score. Output is sorted by
/// airport code and invariant under record reordering.
inline std::vector<AirportStats> corpus_stats(const std::vector<quality::MetadataRecord>& records) {
  std::map<std::string, std::vector<const quality::MetadataRecord*>> groups;
  for (const auto& r : records) groups[r.airport].push_back(&r);

  std::vector<AirportStats> out;
  for (const auto& [airport, recs] : groups) {
    AirportStats s;
    s.airport = airport;
    s.segments = static_cast<long>(recs.size());
    std::vector<double> dur, snr, lang;
    for (const auto* r : recs) {
      s.total_speech_hours += r->meta.speech_len / 3600.0;
      dur.push_back(r->meta.audio_len);
      snr.push_back(r->meta.avg_snr);
      lang.push_back(r->meta.lid_score);
    }
    std::tie(s.duration_mean, s.duration_std) = detail::mean_std(dur);
    std::tie(s.snr_mean, s.snr_std) = detail::mean_std(snr);
    std::tie(s.lang_mean, s.lang_std) = detail::mean_std(lang);
    out.push_back(std::move(s));
  }
  return out;
}

/// Airport code of a recording id like "LKPR_Tower_134_560MHz_...".
inline std::string airport_from_wav_id(const std::string& wav_id) {
  size_t us = wav_id.find('_');
  return us == std::string::npos ? wav_id : wav_id.substr(0, us);
}

/// Provenance carried by the recording id naming convention
/// `<airport>_<frequency label>_<YYYYMMDD>_<HHMMSS>`.
struct RecordingProvenance {
  std::string airport;
  std::string frequency_label;  // e.g. "Tower_134_560MHz"
  std::string capture_date;     // YYYYMMDD, empty when absent
  std::string capture_time;     // HHMMSS, empty when absent
};

inline RecordingProvenance parse_wav_id(const std::string& wav_id) {
  RecordingProvenance p;
  p.airport = airport_from_wav_id(wav_id);
  std::vector<std::string> parts;
  size_t start = 0;
  while (start <= wav_id.size()) {
    size_t us = wav_id.find('_', start);
    if (us == std::string::npos) {
      parts.push_back(wav_id.substr(start));
      break;
    }
    parts.push_back(wav_id.substr(start, us - start));
    start = us + 1;
  }
  auto all_digits = [](const std::string& s, size_t len) {
    if (s.size() != len) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  size_t tail = parts.size();
  if (tail >= 2 && all_digits(parts[tail - 1], 6) && all_digits(parts[tail - 2], 8)) {
    p.capture_date = parts[tail - 2];
    p.capture_time = parts[tail - 1];
    tail -= 2;
  }
  for (size_t i = 1; i < tail; ++i) {
    if (!p.frequency_label.empty()) p.frequency_label += '_';
    p.frequency_label += parts[i];
  }
  return p;
}

}  // namespace atcdp::metrics

#endif  // ATCDP_METRICS_HPP
