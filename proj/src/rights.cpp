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

#include "caslite/rights.hpp"

#include <algorithm>

#include "caslite/error.hpp"

namespace caslite {

namespace {

constexpr std::array<std::string_view, 5> kActionNames{"read", "write", "list", "delete", "create"};

bool scheme_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
}

bool segment_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u > 0x20 && u != 0x7f && c != '/' && c != '*';
}

// Splits "scheme://a/b" into {"scheme", "a", "b"}. A trailing "**" segment is
// reported through `wildcard` when allowed.
std::vector<std::string> split_path(const std::string& text, bool allow_wildcard, bool& wildcard) {
  wildcard = false;
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::MalformedPattern, "'" + text + "': " + why);
  };
  std::size_t sep = text.find("://");
  if (sep == std::string::npos || sep == 0) throw bad("missing scheme");
  std::vector<std::string> segs{text.substr(0, sep)};
  for (char c : segs[0]) {
    if (!scheme_char(c)) throw bad("invalid scheme");
  }
  std::string rest = text.substr(sep + 3);
  if (rest.empty()) throw bad("empty path");
  std::size_t pos = 0;
  while (true) {
    std::size_t next = rest.find('/', pos);
    std::string seg = rest.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    bool last = next == std::string::npos;
    if (seg == "**") {
      if (!allow_wildcard) throw bad("wildcard in concrete path");
      if (!last) throw bad("'**' is only allowed as the final segment");
      wildcard = true;
      break;
    }
    if (seg.empty()) throw bad("empty segment");
    for (char c : seg) {
      if (!segment_char(c)) throw bad("invalid character in segment");
    }
    segs.push_back(std::move(seg));
    if (last) break;
    pos = next + 1;
  }
  return segs;
}

bool is_prefix(const std::vector<std::string>& prefix, const std::vector<std::string>& of) {
  return prefix.size() <= of.size() && std::equal(prefix.begin(), prefix.end(), of.begin());
}

RightsSet normalize(std::vector<Right> rights) {
  RightsSet out;
  for (std::size_t i = 0; i < rights.size(); ++i) {
    bool subsumed = false;
    for (std::size_t j = 0; j < rights.size() && !subsumed; ++j) {
      if (i == j || rights[i].action != rights[j].action) continue;
      if (rights[j].object.covers(rights[i].object) && !(rights[j].object == rights[i].object)) {
        subsumed = true;
      }
    }
    if (!subsumed) out.insert(rights[i]);
  }
  return out;
}

}  // namespace

std::string_view action_name(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

Action parse_action(std::string_view name) {
  for (Action a : kAllActions) {
    if (action_name(a) == name) return a;
  }
  throw Error(ErrorCode::Malformed, "unknown action '" + std::string(name) + "'");
}

ObjectPath::ObjectPath(std::string path) : path_(std::move(path)) {
  bool wildcard = false;
  segments_ = split_path(path_, false, wildcard);
}

ObjectPattern::ObjectPattern(std::string pattern) : pattern_(std::move(pattern)) {
  segments_ = split_path(pattern_, true, wildcard_);
}

bool ObjectPattern::matches(const ObjectPath& object) const {
  return wildcard_ ? is_prefix(segments_, object.segments()) : segments_ == object.segments();
}

bool ObjectPattern::covers(const ObjectPattern& other) const {
  if (wildcard_) return is_prefix(segments_, other.segments_);
  return !other.wildcard_ && segments_ == other.segments_;
}

std::optional<ObjectPattern> ObjectPattern::meet(const ObjectPattern& other) const {
  if (covers(other)) return other;
  if (other.covers(*this)) return *this;
  return std::nullopt;
}

std::string Right::str() const {
  return std::string(action_name(action)) + " " + object.str();
}

Right Right::parse(std::string_view text) {
  std::size_t sp = text.find(' ');
  if (sp == std::string_view::npos) {
    throw Error(ErrorCode::Malformed, "right must be '<action> <pattern>': '" + std::string(text) + "'");
  }
  return Right{parse_action(text.substr(0, sp)), ObjectPattern(std::string(text.substr(sp + 1)))};
}

bool matches(const Right& r, Action action, const ObjectPath& object) {
  return r.action == action && r.object.matches(object);
}

RightsSet RightsSet::parse(std::initializer_list<std::string_view> rights) {
  RightsSet out;
  for (auto r : rights) out.insert(Right::parse(r));
  return out;
}

bool RightsSet::allows(Action action, const ObjectPath& object) const {
  return std::any_of(rights_.begin(), rights_.end(),
                     [&](const Right& r) { return matches(r, action, object); });
}

Json RightsSet::to_json() const {
  Json arr = Json::array();
  for (const auto& r : rights_) arr.push_back(r.str());
  return arr;
}

RightsSet RightsSet::from_json(const Json& doc, bool strict) {
  if (!doc.is_array()) throw Error(ErrorCode::Malformed, "rights must be an array");
  RightsSet out;
  std::string prev;
  for (const auto& v : doc) {
    if (!v.is_string()) throw Error(ErrorCode::Malformed, "right must be a string");
    Right r = Right::parse(v.get<std::string>());
    std::string s = r.str();
    if (strict && !out.empty() && s <= prev) throw Error(ErrorCode::Malformed, "rights must be sorted and unique");
    prev = s;
    out.insert(std::move(r));
  }
  return out;
}

RightsSet unite(const RightsSet& a, const RightsSet& b) {
  RightsSet out = a;
  for (const auto& r : b) out.insert(r);
  return out;
}

RightsSet intersect(const RightsSet& a, const RightsSet& b) {
  std::vector<Right> met;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (x.action != y.action) continue;
      if (auto m = x.object.meet(y.object)) met.push_back(Right{x.action, *m});
    }
  }
  return normalize(std::move(met));
}

RightsSet restrict_to(const RightsSet& rights, const ObjectPattern& ns) {
  std::vector<Right> met;
  for (const auto& r : rights) {
    if (auto m = r.object.meet(ns)) met.push_back(Right{r.action, *m});
  }
  return normalize(std::move(met));
}

Json string_set_to_json(const std::set<std::string>& values) {
  Json arr = Json::array();
  for (const auto& v : values) arr.push_back(v);
  return arr;
}

std::set<std::string> string_set_from_json(const Json& doc, bool strict) {
  if (!doc.is_array()) throw Error(ErrorCode::Malformed, "expected an array of strings");
  std::set<std::string> out;
  for (const auto& v : doc) {
    if (!v.is_string()) throw Error(ErrorCode::Malformed, "expected an array of strings");
    std::string s = v.get<std::string>();
    if (strict && !out.empty() && s <= *out.rbegin()) {
      throw Error(ErrorCode::Malformed, "string set must be sorted and unique");
    }
    out.insert(std::move(s));
  }
  return out;
}

}  // namespace caslite
