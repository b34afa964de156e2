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

#ifndef ATCDP_ERROR_HPP
#define ATCDP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace atcdp {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller handed in a value that violates an operation's preconditions.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

/// A text/XML/JSON document failed to parse; carries a 1-based position
/// (line number for line formats, segment index for XML) when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, long position = 0)
      : Error(position > 0 ? msg + " (at " + std::to_string(position) + ")" : msg),
        position_(position) {}

  long position() const { return position_; }

 private:
  long position_;
};

}  // namespace atcdp

#endif  // ATCDP_ERROR_HPP
