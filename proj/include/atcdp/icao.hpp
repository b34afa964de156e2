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

#ifndef ATCDP_ICAO_HPP
#define ATCDP_ICAO_HPP

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace atcdp::icao {

// Radiotelephony spelling alphabet, canonical written forms
// (alfa with 'f', juliett with double t, whiskey, x-ray).
inline constexpr std::array<std::string_view, 26> kAlphabet = {
    "alfa",   "bravo",  "charlie", "delta", "echo",   "foxtrot", "golf",
    "hotel",  "india",  "juliett", "kilo",  "lima",   "mike",    "november",
    "oscar",  "papa",   "quebec",  "romeo", "sierra", "tango",   "uniform",
    "victor", "whiskey", "x-ray",  "yankee", "zulu"};

inline constexpr std::array<std::string_view, 10> kDigitWords = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"};

/// Spoken word for an ASCII letter, e.g. 'k' -> "kilo".
inline std::optional<std::string_view> letter_word(char c) {
  if (c >= 'a' && c <= 'z') return kAlphabet[static_cast<size_t>(c - 'a')];
  if (c >= 'A' && c <= 'Z') return kAlphabet[static_cast<size_t>(c - 'A')];
  return std::nullopt;
}

/// Spoken word for a digit character, e.g. '4' -> "four".
inline std::optional<std::string_view> digit_word(char c) {
  if (c >= '0' && c <= '9') return kDigitWords[static_cast<size_t>(c - '0')];
  return std::nullopt;
}

inline bool is_letter_word(std::string_view tok) {
  for (auto w : kAlphabet)
    if (w == tok) return true;
  return false;
}

inline bool is_digit_word(std::string_view tok) {
  for (auto w : kDigitWords)
    if (w == tok) return true;
  return false;
}

/// Single token built from spelled letters joined by underscores: "k_l_m".
inline bool is_acronym_token(std::string_view tok) {
  if (tok.size() < 3 || tok.size() % 2 == 0) return false;
  for (size_t i = 0; i < tok.size(); ++i) {
    if (i % 2 == 0) {
      if (tok[i] < 'a' || tok[i] > 'z') return false;
    } else if (tok[i] != '_') {
      return false;
    }
  }
  return true;
}

}  // namespace atcdp::icao

#endif  // ATCDP_ICAO_HPP
