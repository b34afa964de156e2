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

#ifndef ATCDP_JOB_SETTINGS_HPP
#define ATCDP_JOB_SETTINGS_HPP

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "atcdp/error.hpp"

namespace atcdp::formats {

/// Processing-job settings: the rejection thresholds and input switches a
/// submitter may tune. A recording passes a gate when its value is at or
/// above the corresponding minimum (below the maximum for max_audio_len).
struct JobSettings {
  double max_audio_len = 120.0;    // seconds
  double min_audio_len = 1.0;      // seconds
  double min_snr = -5.0;           // dB
  double min_english_score = 0.5;  // [0, 1]
  std::string asr_language = "en";
  std::string audio_format = "wav";
};

/// Parses the job-settings JSON document. Absent keys take the defaults
/// above. In strict mode (default) unknown keys are rejected; in lenient
/// mode they are collected into *warnings.
inline JobSettings parse_job_settings(const std::string& document, bool strict = true,
                                      std::vector<std::string>* warnings = nullptr) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("job settings: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("job settings must be a JSON object");

  static const std::set<std::string> known = {"max_audio_len", "min_audio_len", "min_snr",
                                              "min_english_score", "asr_language", "audio_format"};
  JobSettings s;
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      if (strict) throw InvalidInput("unknown job setting: " + key);
      if (warnings) warnings->push_back("ignoring unknown job setting: " + key);
      continue;
    }
    try {
      if (key == "max_audio_len") s.max_audio_len = value.get<double>();
      else if (key == "min_audio_len") s.min_audio_len = value.get<double>();
      else if (key == "min_snr") s.min_snr = value.get<double>();
      else if (key == "min_english_score") s.min_english_score = value.get<double>();
      else if (key == "asr_language") s.asr_language = value.get<std::string>();
      else if (key == "audio_format") s.audio_format = value.get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw InvalidInput("job setting has wrong type: " + key);
    }
  }
  if (!(s.min_audio_len < s.max_audio_len))
    throw InvalidInput("min_audio_len must be below max_audio_len");
  if (s.min_english_score < 0.0 || s.min_english_score > 1.0)
    throw InvalidInput("min_english_score must be within [0, 1]");
  return s;
}

}  // namespace atcdp::formats

#endif  // ATCDP_JOB_SETTINGS_HPP
