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

#ifndef ATCDP_QUALITY_HPP
#define ATCDP_QUALITY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "atcdp/error.hpp"

namespace atcdp::quality {

/// The six scored quantities of the quality equation plus the word count.
/// Documented ranges: avg_snr <0,40> dB, num_spk <1,10>, lid_score and
/// avg_word_conf <0,1>, wrd_cnt <0,~150>.
struct QualityMetadata {
  double avg_snr = 0.0;
  double num_spk = 1.0;
  double speech_len = 0.0;  // seconds
  double audio_len = 0.0;   // seconds
  double lid_score = 0.0;
  double avg_word_conf = 0.0;
  double wrd_cnt = 0.0;
};

/// A quality-scored recording as it appears in metadata records and
/// selection reports.
struct MetadataRecord {
  std::string wav_id;
  std::string airport;
  QualityMetadata meta;
};

inline QualityMetadata clamp_to_ranges(QualityMetadata m) {
  m.avg_snr = std::clamp(m.avg_snr, 0.0, 40.0);
  m.num_spk = std::clamp(m.num_spk, 1.0, 10.0);
  m.lid_score = std::clamp(m.lid_score, 0.0, 1.0);
  m.avg_word_conf = std::clamp(m.avg_word_conf, 0.0, 1.0);
  m.wrd_cnt = std::clamp(m.wrd_cnt, 0.0, 150.0);
  if (m.speech_len < 0.0) m.speech_len = 0.0;
  if (m.speech_len > m.audio_len) m.speech_len = m.audio_len;
  return m;
}

/// The quality equation, natural logarithm, e = Euler's number:
///
///   Score = ln(avg_snr + e) + ln(num_spk + e) + ln(speech_len/audio_len + e)
///         + lid_score*3 + avg_word_conf*3 + ln(wrd_cnt + e)
///
/// With clamp (the default) every field is first clamped to its documented
/// range; the unclamped form exists for checking the formula's identities.
inline double quality_score(const QualityMetadata& meta, bool clamp = true) {
  if (meta.audio_len <= 0.0) throw InvalidInput("quality_score: audio_len must be positive");
  QualityMetadata m = clamp ? clamp_to_ranges(meta) : meta;
  const double e = std::exp(1.0);
  return std::log(m.avg_snr + e) + std::log(m.num_spk + e) +
         std::log(m.speech_len / m.audio_len + e) + m.lid_score * 3.0 +
         m.avg_word_conf * 3.0 + std::log(m.wrd_cnt + e);
}

/// Data-selection thresholds in the style of the corpus filtering table:
/// a record is kept when every set threshold is strictly exceeded. An unset
/// threshold is unbounded. random_target_hours draws a seeded random subset
/// of the kept records bounded by total speech duration.
struct SelectionPolicy {
  std::optional<double> min_eld;
  std::optional<double> min_snr;
  std::optional<double> min_cnet;
  std::optional<double> random_target_hours;
  uint64_t seed = 0;
};

/// Parses a selection-policy JSON document; absent keys stay unbounded.
inline SelectionPolicy parse_selection_policy(const std::string& document) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("selection policy: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("selection policy must be a JSON object");
  SelectionPolicy p;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "min_eld") p.min_eld = value.get<double>();
      else if (key == "min_snr") p.min_snr = value.get<double>();
      else if (key == "min_cnet") p.min_cnet = value.get<double>();
      else if (key == "random_target_hours") p.random_target_hours = value.get<double>();
      else if (key == "seed") p.seed = value.get<uint64_t>();
      else throw InvalidInput("unknown selection policy key: " + key);
    } catch (const nlohmann::json::exception&) {
      throw InvalidInput("selection policy key has wrong type: " + key);
    }
  }
  if ((p.min_eld && (*p.min_eld < 0.0 || *p.min_eld > 1.0)) ||
      (p.min_cnet && (*p.min_cnet < 0.0 || *p.min_cnet > 1.0)))
    throw InvalidInput("selection policy scores must lie in [0, 1]");
  return p;
}

struct Rejection {
  MetadataRecord record;
  std::string reason;  // non_english | low_snr | low_confidence | not_sampled
};

struct FilterResult {
  std::vector<MetadataRecord> kept;
  std::vector<Rejection> rejected;
};

namespace detail {

// Explicit Fisher-Yates so the permutation depends only on the seed, not on
// the standard library's shuffle implementation.
inline std::vector<size_t> seeded_permutation(size_t n, uint64_t seed) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 eng(seed);
  for (size_t i = n; i > 1; --i) {
    size_t j = static_cast<size_t>(eng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace detail

/// Applies the policy predicates; kept and rejected partition the input.
/// With random_target_hours set, a seeded random subset of the kept records
/// (greedy prefix of a random permutation, bounded by summed speech_len) is
/// returned and the rest are rejected with reason not_sampled.
inline FilterResult filter_recordings(const std::vector<MetadataRecord>& records,
                                      const SelectionPolicy& policy) {
  FilterResult result;
  for (const auto& r : records) {
    if (policy.min_eld && !(r.meta.lid_score > *policy.min_eld)) {
      result.rejected.push_back({r, "non_english"});
    } else if (policy.min_snr && !(r.meta.avg_snr > *policy.min_snr)) {
      result.rejected.push_back({r, "low_snr"});
    } else if (policy.min_cnet && !(r.meta.avg_word_conf > *policy.min_cnet)) {
      result.rejected.push_back({r, "low_confidence"});
    } else {
      result.kept.push_back(r);
    }
  }

  if (policy.random_target_hours) {
    double budget = *policy.random_target_hours * 3600.0;
    auto perm = detail::seeded_permutation(result.kept.size(), policy.seed);
    std::vector<char> take(result.kept.size(), 0);
    double total = 0.0;
    for (size_t i : perm) {
      double d = result.kept[i].meta.speech_len;
      if (total + d > budget) break;
      total += d;
      take[i] = 1;
    }
    std::vector<MetadataRecord> sampled;
    for (size_t i = 0; i < result.kept.size(); ++i) {
      if (take[i]) sampled.push_back(result.kept[i]);
      else result.rejected.push_back({result.kept[i], "not_sampled"});
    }
    result.kept = std::move(sampled);
  }
  return result;
}

/// JSON object for one metadata record (the per-recording ingestion format,
/// one object per line in a .jsonl file).
inline nlohmann::ordered_json metadata_to_json(const MetadataRecord& r) {
  nlohmann::ordered_json j;
  j["wav_id"] = r.wav_id;
  j["airport"] = r.airport;
  j["avg_snr"] = r.meta.avg_snr;
  j["num_spk"] = r.meta.num_spk;
  j["speech_len"] = r.meta.speech_len;
  j["audio_len"] = r.meta.audio_len;
  j["lid_score"] = r.meta.lid_score;
  j["avg_word_conf"] = r.meta.avg_word_conf;
  j["wrd_cnt"] = r.meta.wrd_cnt;
  return j;
}

inline MetadataRecord metadata_from_json(const nlohmann::json& j) {
  try {
    MetadataRecord r;
    r.wav_id = j.at("wav_id").get<std::string>();
    r.airport = j.value("airport", std::string());
    r.meta.avg_snr = j.at("avg_snr").get<double>();
    r.meta.num_spk = j.value("num_spk", 1.0);
    r.meta.speech_len = j.at("speech_len").get<double>();
    r.meta.audio_len = j.at("audio_len").get<double>();
    r.meta.lid_score = j.at("lid_score").get<double>();
    r.meta.avg_word_conf = j.at("avg_word_conf").get<double>();
    r.meta.wrd_cnt = j.at("wrd_cnt").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metadata record: ") + e.what());
  }
}

inline std::vector<MetadataRecord> load_metadata_jsonl(std::istream& in) {
  std::vector<MetadataRecord> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("metadata record: ") + e.what(), lineno);
    }
    out.push_back(metadata_from_json(j));
  }
  return out;
}

inline void save_metadata_jsonl(std::ostream& out, const std::vector<MetadataRecord>& records) {
  for (const auto& r : records) out << metadata_to_json(r).dump() << '\n';
}

/// Selection report: `wav_id<TAB>score<TAB>decision<TAB>reason`, kept rows
/// first (decision "selected", reason "-"), then rejections.
inline void write_selection_report(std::ostream& out, const FilterResult& result) {
  char buf[32];
  for (const auto& r : result.kept) {
    std::snprintf(buf, sizeof buf, "%.4f", quality_score(r.meta));
    out << r.wav_id << '\t' << buf << "\tselected\t-\n";
  }
  for (const auto& rej : result.rejected) {
    std::snprintf(buf, sizeof buf, "%.4f", quality_score(rej.record.meta));
    out << rej.record.wav_id << '\t' << buf << "\trejected\t" << rej.reason << '\n';
  }
}

/// Orders records by descending quality score (stable tie-break on wav_id)
/// and returns the greedy prefix whose summed speech duration fits within
/// top_hours.
inline std::vector<MetadataRecord> rank_for_annotation(const std::vector<MetadataRecord>& records,
                                                       double top_hours) {
  std::vector<std::pair<double, const MetadataRecord*>> scored;
  scored.reserve(records.size());
  for (const auto& r : records) scored.emplace_back(quality_score(r.meta), &r);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->wav_id < b.second->wav_id;
  });

  std::vector<MetadataRecord> out;
  double budget = top_hours * 3600.0;
  double total = 0.0;
  for (const auto& [score, rec] : scored) {
    double d = rec->meta.speech_len;
    if (total + d > budget) break;
    total += d;
    out.push_back(*rec);
  }
  return out;
}

}  // namespace atcdp::quality

#endif  // ATCDP_QUALITY_HPP
