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

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace caslite {

// Hierarchical distinguished name, e.g. "/VO=esg/CN=alice".
// Equality is exact string equality.
class Identity {
 public:
  // Throws Error(Malformed) unless `name` is one or more "/key=value" segments.
  explicit Identity(std::string name);

  static bool valid(std::string_view name);

  const std::string& str() const { return name_; }

  friend auto operator<=>(const Identity&, const Identity&) = default;
  friend bool operator==(const Identity&, const Identity&) = default;

 private:
  std::string name_;
};

}  // namespace caslite

template <>
struct std::hash<caslite::Identity> {
  std::size_t operator()(const caslite::Identity& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
