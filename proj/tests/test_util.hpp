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

#ifndef ATCDP_TESTS_TEST_UTIL_HPP
#define ATCDP_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "atcdp/wave.hpp"

namespace testutil {

// Deterministic sampler with explicit transforms; results depend only on
// the seed, matching the table generator's construction.
class Sampler {
 public:
  explicit Sampler(uint64_t seed) : eng_(seed) {}

  double uniform() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }
  double exponential() { return -std::log(uniform()); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double sign() { return (eng_() & 1u) ? 1.0 : -1.0; }

  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Laplacian "speech" of unit power mixed with Gaussian noise at the exact
// power ratio snr_db, rescaled to fit the [-1, 1] sample range.
inline atcdp::Waveform make_mixture(double snr_db, size_t n, uint64_t seed,
                                    int sample_rate = 16000) {
  Sampler rng(seed);
  const double b = 1.0 / std::sqrt(2.0);
  double sigma = std::pow(10.0, -snr_db / 20.0);
  atcdp::Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(n);
  double peak = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double x = rng.sign() * b * rng.exponential() + sigma * rng.gaussian();
    w.samples[i] = x;
    peak = std::max(peak, std::fabs(x));
  }
  if (peak > 0.0)
    for (auto& s : w.samples) s /= peak;
  return w;
}

// Pure Laplacian signal, unit power, rescaled into range.
inline atcdp::Waveform make_laplacian(size_t n, uint64_t seed, int sample_rate = 16000) {
  Sampler rng(seed);
  const double b = 1.0 / std::sqrt(2.0);
  atcdp::Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(n);
  double peak = 0.0;
  for (size_t i = 0; i < n; ++i) {
    w.samples[i] = rng.sign() * b * rng.exponential();
    peak = std::max(peak, std::fabs(w.samples[i]));
  }
  if (peak > 0.0)
    for (auto& s : w.samples) s /= peak;
  return w;
}

inline atcdp::Waveform make_gaussian(size_t n, uint64_t seed, int sample_rate = 16000) {
  Sampler rng(seed);
  atcdp::Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(n);
  double peak = 0.0;
  for (size_t i = 0; i < n; ++i) {
    w.samples[i] = rng.gaussian();
    peak = std::max(peak, std::fabs(w.samples[i]));
  }
  if (peak > 0.0)
    for (auto& s : w.samples) s /= peak;
  return w;
}

// Fresh scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      auto candidate = base / (tag + "." + std::to_string(::getpid()) + "." + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        break;
      }
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  std::filesystem::path path() const { return path_; }
  std::string str(const std::string& name = "") const {
    return name.empty() ? path_.string() : (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

#endif  // ATCDP_TESTS_TEST_UTIL_HPP
