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

#ifndef ATCDP_WAVE_HPP
#define ATCDP_WAVE_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "atcdp/error.hpp"

namespace atcdp {

/// Mono audio, samples normalized to [-1, +1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  bool empty() const { return samples.empty(); }
};

/// Half-open time interval in seconds, 0 <= start < end.
struct TimeSegment {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
};

namespace detail {

inline uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

inline uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace detail

/// Reads a mono 16-bit PCM RIFF/WAVE file at 8 or 16 kHz.
inline Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open wav file: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (buf.size() < 44 || buf.compare(0, 4, "RIFF") != 0 || buf.compare(8, 4, "WAVE") != 0)
    throw ParseError("not a RIFF/WAVE file: " + path);

  int sample_rate = 0;
  size_t data_off = 0, data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    std::string id = buf.substr(pos, 4);
    uint32_t len = detail::read_u32(p + pos + 4);
    size_t body = pos + 8;
    if (id == "fmt ") {
      if (len < 16 || body + 16 > buf.size()) throw ParseError("truncated fmt chunk: " + path);
      uint16_t fmt = detail::read_u16(p + body);
      uint16_t channels = detail::read_u16(p + body + 2);
      sample_rate = static_cast<int>(detail::read_u32(p + body + 4));
      uint16_t bits = detail::read_u16(p + body + 14);
      if (fmt != 1 || bits != 16) throw ParseError("expected 16-bit PCM: " + path);
      if (channels != 1) throw ParseError("expected mono audio: " + path);
      if (sample_rate != 8000 && sample_rate != 16000)
        throw ParseError("expected 8 kHz or 16 kHz sample rate: " + path);
    } else if (id == "data") {
      data_off = body;
      data_len = len;
    }
    pos = body + len + (len & 1);
  }
  if (sample_rate == 0 || data_off == 0) throw ParseError("missing fmt/data chunk: " + path);
  if (data_off + data_len > buf.size()) data_len = buf.size() - data_off;

  Waveform w;
  w.sample_rate = sample_rate;
  size_t n = data_len / 2;
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    auto v = static_cast<int16_t>(detail::read_u16(p + data_off + 2 * i));
    w.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return w;
}

/// Writes a mono 16-bit PCM WAV file; samples are clipped to [-1, +1].
inline void write_wav(const std::string& path, const Waveform& w) {
  std::string body;
  body.reserve(44 + 2 * w.samples.size());
  uint32_t data_len = static_cast<uint32_t>(2 * w.samples.size());
  body += "RIFF";
  detail::put_u32(body, 36 + data_len);
  body += "WAVEfmt ";
  detail::put_u32(body, 16);
  detail::put_u16(body, 1);  // PCM
  detail::put_u16(body, 1);  // mono
  detail::put_u32(body, static_cast<uint32_t>(w.sample_rate));
  detail::put_u32(body, static_cast<uint32_t>(w.sample_rate * 2));
  detail::put_u16(body, 2);
  detail::put_u16(body, 16);
  body += "data";
  detail::put_u32(body, data_len);
  for (double s : w.samples) {
    double c = s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s);
    auto v = static_cast<int16_t>(std::lrint(c * 32767.0));
    detail::put_u16(body, static_cast<uint16_t>(v));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write wav file: " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

}  // namespace atcdp

#endif  // ATCDP_WAVE_HPP
