// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "caslite/encoding.hpp"

namespace caslite {

enum class Action { Read, Write, List, Delete, Create };

inline constexpr std::array<Action, 5> kAllActions{Action::Read, Action::Write, Action::List,
                                                   Action::Delete, Action::Create};

std::string_view action_name(Action a);
// Case-sensitive; throws Error(Malformed) for anything outside the closed set.
Action parse_action(std::string_view name);

// A concrete object path such as "vo://esg/data/a.nc". Never contains wildcards.
class ObjectPath {
 public:
  // Throws Error(MalformedPattern).
  explicit ObjectPath(std::string path);

  const std::string& str() const { return path_; }
  const std::vector<std::string>& segments() const { return segments_; }

  friend bool operator==(const ObjectPath& a, const ObjectPath& b) { return a.path_ == b.path_; }
  friend auto operator<=>(const ObjectPath& a, const ObjectPath& b) { return a.path_ <=> b.path_; }

 private:
  std::string path_;
  std::vector<std::string> segments_;  // scheme first
};

// A concrete path, or a path prefix followed by a trailing "**" segment.
// Matching is segment-wise: "vo://esg/data/**" matches "vo://esg/data" and
// everything beneath it, but not "vo://esg/data2".
class ObjectPattern {
 public:
  // Throws Error(MalformedPattern).
  explicit ObjectPattern(std::string pattern);

  const std::string& str() const { return pattern_; }
  bool wildcard() const { return wildcard_; }

  bool matches(const ObjectPath& object) const;
  // True iff every object matched by `other` is matched by this pattern.
  bool covers(const ObjectPattern& other) const;
  // The pattern matching exactly the objects both patterns match, if any.
  std::optional<ObjectPattern> meet(const ObjectPattern& other) const;

  friend bool operator==(const ObjectPattern& a, const ObjectPattern& b) {
    return a.pattern_ == b.pattern_;
  }
  friend auto operator<=>(const ObjectPattern& a, const ObjectPattern& b) {
    return a.pattern_ <=> b.pattern_;
  }

 private:
  std::string pattern_;
  std::vector<std::string> segments_;  // scheme first, "**" stripped
  bool wildcard_ = false;
};

struct Right {
  Action action;
  ObjectPattern object;

  // "read vo://esg/data/**"
  std::string str() const;
  static Right parse(std::string_view text);

  friend bool operator==(const Right& a, const Right& b) {
    return a.action == b.action && a.object == b.object;
  }
  friend std::strong_ordering operator<=>(const Right& a, const Right& b) {
    return a.str() <=> b.str();
  }
};

bool matches(const Right& r, Action action, const ObjectPath& object);

class RightsSet {
 public:
  using const_iterator = std::set<Right>::const_iterator;

  RightsSet() = default;
  RightsSet(std::initializer_list<Right> rights) : rights_(rights) {}

  // Parses "action pattern" strings.
  static RightsSet parse(std::initializer_list<std::string_view> rights);

  void insert(Right r) { rights_.insert(std::move(r)); }
  bool erase(const Right& r) { return rights_.erase(r) > 0; }
  bool contains(const Right& r) const { return rights_.count(r) > 0; }
  bool empty() const { return rights_.empty(); }
  std::size_t size() const { return rights_.size(); }
  const_iterator begin() const { return rights_.begin(); }
  const_iterator end() const { return rights_.end(); }

  bool allows(Action action, const ObjectPath& object) const;

  // Sorted array of right strings. Strict decoding rejects unsorted or
  // duplicated entries so the signed encoding stays one-to-one; hand-edited
  // configuration files are read with strict = false.
  Json to_json() const;
  static RightsSet from_json(const Json& doc, bool strict = true);

  friend bool operator==(const RightsSet&, const RightsSet&) = default;

 private:
  std::set<Right> rights_;
};

RightsSet unite(const RightsSet& a, const RightsSet& b);
// Rights granting exactly the requests both sets grant, with rights subsumed
// by a broader right in the result dropped.
RightsSet intersect(const RightsSet& a, const RightsSet& b);
// Every right narrowed to the objects under `ns`, for every action.
RightsSet restrict_to(const RightsSet& rights, const ObjectPattern& ns);

// Sorted, duplicate-free string arrays (used for group and member lists).
Json string_set_to_json(const std::set<std::string>& values);
std::set<std::string> string_set_from_json(const Json& doc, bool strict = true);

}  // namespace caslite
