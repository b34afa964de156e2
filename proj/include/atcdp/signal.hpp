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

#ifndef ATCDP_SIGNAL_HPP
#define ATCDP_SIGNAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "atcdp/error.hpp"
#include "atcdp/wave.hpp"

namespace atcdp::signal {

#include "atcdp/wada_table.inc"

/// Short-time energy voice activity detection parameters.
///
/// The threshold is adaptive: median frame energy times threshold_factor,
/// so the detector is invariant under a uniform gain change of the input.
struct SegmentationConfig {
  double frame_len_s = 0.025;
  double hop_s = 0.010;
  double threshold_factor = 4.0;
  double min_segment_s = 0.25;
  double min_gap_s = 0.20;
  int hangover_frames = 5;
};

struct GainConfig {
  /// A spike is an absolute sample-to-sample jump above this fraction of full scale.
  double spike_delta = 0.5;
  double target_rms = 0.1;
};

/// Blind SNR estimate in dB; clamped marks that the waveform statistic fell
/// outside the calibration table, so the value sits at a table bound.
struct SnrEstimate {
  double value_db = 0.0;
  bool clamped = false;
};

namespace detail {

inline std::vector<double> frame_energies(const Waveform& w, size_t frame, size_t hop) {
  std::vector<double> e;
  size_t n = w.samples.size();
  if (n == 0) return e;
  if (n <= frame) {
    double acc = 0.0;
    for (double s : w.samples) acc += s * s;
    e.push_back(acc / static_cast<double>(n));
    return e;
  }
  for (size_t start = 0; start + frame <= n; start += hop) {
    double acc = 0.0;
    for (size_t i = start; i < start + frame; ++i) acc += w.samples[i] * w.samples[i];
    e.push_back(acc / static_cast<double>(frame));
  }
  return e;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

}  // namespace detail

/// Splits a waveform into speech segments by short-time energy.
///
/// Frames whose energy exceeds median*factor are marked active, active runs
/// are extended by the hangover, runs separated by less than min_gap_s are
/// merged, and anything shorter than min_segment_s is dropped. Returned
/// segments are disjoint, sorted and clamped to [0, duration].
inline std::vector<TimeSegment> segment_by_energy(const Waveform& w,
                                                  const SegmentationConfig& cfg = {}) {
  if (w.empty()) throw InvalidInput("segment_by_energy: empty waveform");
  size_t frame = std::max<size_t>(1, static_cast<size_t>(std::lround(cfg.frame_len_s * w.sample_rate)));
  size_t hop = std::max<size_t>(1, static_cast<size_t>(std::lround(cfg.hop_s * w.sample_rate)));

  std::vector<double> energy = detail::frame_energies(w, frame, hop);
  double threshold = detail::median(energy) * cfg.threshold_factor;

  std::vector<char> active(energy.size(), 0);
  for (size_t i = 0; i < energy.size(); ++i) active[i] = energy[i] > threshold ? 1 : 0;

  // hangover: keep frames active for a while after the last hit
  if (cfg.hangover_frames > 0) {
    int remain = 0;
    for (size_t i = 0; i < active.size(); ++i) {
      if (active[i]) {
        remain = cfg.hangover_frames;
      } else if (remain > 0) {
        active[i] = 1;
        --remain;
      }
    }
  }

  double dur = w.duration();
  double hop_s = static_cast<double>(hop) / w.sample_rate;
  double frame_s = static_cast<double>(frame) / w.sample_rate;

  std::vector<TimeSegment> segs;
  size_t i = 0;
  while (i < active.size()) {
    if (!active[i]) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < active.size() && active[j + 1]) ++j;
    TimeSegment s{static_cast<double>(i) * hop_s,
                  std::min(dur, static_cast<double>(j) * hop_s + frame_s)};
    if (!segs.empty() && s.start - segs.back().end < cfg.min_gap_s) {
      segs.back().end = s.end;
    } else {
      segs.push_back(s);
    }
    i = j + 1;
  }

  std::vector<TimeSegment> out;
  for (const auto& s : segs)
    if (s.duration() >= cfg.min_segment_s) out.push_back(s);
  return out;
}

/// Spike-aware gain control.
///
/// The waveform is partitioned at sample-to-sample jumps above spike_delta
/// (speaker turns show up as such spikes after window-based DC-offset
/// removal in the radio software). Each partition whose RMS falls below
/// target_rms is scaled up toward the target, with the gain capped so no
/// output sample exceeds full scale. Louder partitions are left untouched.
inline Waveform apply_segment_gain(const Waveform& w, const GainConfig& cfg = {}) {
  Waveform out = w;
  size_t n = out.samples.size();
  if (n == 0) return out;

  std::vector<size_t> bounds;
  bounds.push_back(0);
  for (size_t i = 1; i < n; ++i)
    if (std::fabs(out.samples[i] - out.samples[i - 1]) > cfg.spike_delta) bounds.push_back(i);
  bounds.push_back(n);

  for (size_t b = 0; b + 1 < bounds.size(); ++b) {
    size_t lo = bounds[b], hi = bounds[b + 1];
    if (hi <= lo) continue;
    double acc = 0.0, peak = 0.0;
    for (size_t i = lo; i < hi; ++i) {
      acc += out.samples[i] * out.samples[i];
      peak = std::max(peak, std::fabs(out.samples[i]));
    }
    double rms = std::sqrt(acc / static_cast<double>(hi - lo));
    if (rms <= 0.0 || rms >= cfg.target_rms) continue;
    double gain = cfg.target_rms / rms;
    if (peak * gain > 1.0) gain = 1.0 / peak;
    for (size_t i = lo; i < hi; ++i) out.samples[i] *= gain;
  }
  return out;
}

/// Blind SNR estimation from the shape of the amplitude distribution.
///
/// Computes the gap statistic log(mean|x|) - mean(log|x|) over non-zero
/// samples and inverts it through a Monte-Carlo calibrated table
/// (Laplacian speech + Gaussian noise, see wada_table.inc). Estimates are
/// clamped to the table range with the clamped flag set.
inline SnrEstimate estimate_wada_snr(const Waveform& w) {
  if (w.samples.size() < 4000)
    throw InvalidInput("estimate_wada_snr: need at least 4000 samples");
  double sum_abs = 0.0, sum_log = 0.0;
  size_t cnt = 0;
  for (double s : w.samples) {
    double a = std::fabs(s);
    if (a > 0.0) {
      sum_abs += a;
      sum_log += std::log(a);
      ++cnt;
    }
  }
  if (cnt == 0) throw InvalidInput("estimate_wada_snr: all-zero waveform");
  double g = std::log(sum_abs / static_cast<double>(cnt)) - sum_log / static_cast<double>(cnt);

  constexpr int n = kWadaTableSize;
  if (g <= kWadaGap[0]) return {static_cast<double>(kWadaSnrMinDb), true};
  if (g >= kWadaGap[n - 1]) return {static_cast<double>(kWadaSnrMaxDb), true};
  // first grid point with gap >= g, then interpolate inside [i-1, i]
  int i = 1;
  while (i < n - 1 && kWadaGap[i] < g) ++i;
  double g0 = kWadaGap[i - 1], g1 = kWadaGap[i];
  double t = g1 > g0 ? (g - g0) / (g1 - g0) : 0.0;
  double snr = kWadaSnrMinDb + (static_cast<double>(i - 1) + t) * kWadaSnrStepDb;
  return {snr, false};
}

/// Fraction of the waveform covered by the given speech segments.
inline double speech_ratio(const Waveform& w, const std::vector<TimeSegment>& segments) {
  double dur = w.duration();
  if (dur <= 0.0) throw InvalidInput("speech_ratio: zero-duration waveform");
  double speech = 0.0;
  for (const auto& s : segments) {
    if (!(s.start >= 0.0 && s.start < s.end && s.end <= dur + 1e-9))
      throw InvalidInput("speech_ratio: segment outside waveform");
    speech += s.duration();
  }
  return speech / dur;
}

}  // namespace atcdp::signal

#endif  // ATCDP_SIGNAL_HPP
