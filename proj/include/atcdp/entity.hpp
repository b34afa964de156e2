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

#ifndef ATCDP_ENTITY_HPP
#define ATCDP_ENTITY_HPP

#include <optional>
#include <string_view>

namespace atcdp {

/// The closed entity label set of the annotation model.
enum class EntityLabel { Callsign, Command, Value };

inline std::string_view label_name(EntityLabel l) {
  switch (l) {
    case EntityLabel::Callsign: return "callsign";
    case EntityLabel::Command: return "command";
    case EntityLabel::Value: return "value";
  }
  return "";
}

inline std::optional<EntityLabel> label_from_name(std::string_view n) {
  if (n == "callsign") return EntityLabel::Callsign;
  if (n == "command") return EntityLabel::Command;
  if (n == "value") return EntityLabel::Value;
  return std::nullopt;
}

/// Half-open token-index span tagged with an entity label.
struct EntitySpan {
  EntityLabel label = EntityLabel::Callsign;
  size_t start_token = 0;
  size_t end_token = 0;

  bool operator==(const EntitySpan&) const = default;
};

}  // namespace atcdp

#endif  // ATCDP_ENTITY_HPP
