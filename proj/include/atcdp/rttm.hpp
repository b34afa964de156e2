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

#ifndef ATCDP_RTTM_HPP
#define ATCDP_RTTM_HPP

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "atcdp/cnet.hpp"
#include "atcdp/error.hpp"

namespace atcdp::formats {

/// One diarization segment from a standard 10-field SPEAKER record.
struct RttmSegment {
  std::string file_id;
  std::string channel;
  double onset = 0.0;
  double duration = 0.0;
  std::string speaker_name;
};

/// Parses 10-field RTTM SPEAKER lines:
///   SPEAKER <file> <chan> <onset> <dur> <NA> <NA> <speaker> <NA> <NA>
inline std::vector<RttmSegment> parse_rttm(std::istream& in) {
  std::vector<RttmSegment> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    std::istringstream ls(line);
    std::vector<std::string> f;
    std::string tok;
    while (ls >> tok) f.push_back(tok);
    if (f.size() != 10) throw ParseError("RTTM line must have 10 fields", lineno);
    if (f[0] != "SPEAKER") throw ParseError("expected SPEAKER record, got " + f[0], lineno);
    RttmSegment s;
    s.file_id = f[1];
    s.channel = f[2];
    if (!detail::parse_double(f[3], s.onset) || s.onset < 0.0)
      throw ParseError("bad RTTM onset '" + f[3] + "'", lineno);
    if (!detail::parse_double(f[4], s.duration) || s.duration <= 0.0)
      throw ParseError("bad RTTM duration '" + f[4] + "'", lineno);
    s.speaker_name = f[7];
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<RttmSegment> parse_rttm(const std::string& text) {
  std::istringstream in(text);
  return parse_rttm(in);
}

inline void write_rttm(std::ostream& out, const std::vector<RttmSegment>& segs) {
  char buf[64];
  for (const auto& s : segs) {
    std::snprintf(buf, sizeof buf, "%.3f %.3f", s.onset, s.duration);
    out << "SPEAKER " << s.file_id << ' ' << s.channel << ' ' << buf << " <NA> <NA> "
        << s.speaker_name << " <NA> <NA>\n";
  }
}

inline std::string write_rttm(const std::vector<RttmSegment>& segs) {
  std::ostringstream out;
  write_rttm(out, segs);
  return out.str();
}

}  // namespace atcdp::formats

#endif  // ATCDP_RTTM_HPP
