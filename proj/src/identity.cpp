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

#include "caslite/identity.hpp"

#include "caslite/error.hpp"

namespace caslite {

bool Identity::valid(std::string_view name) {
  if (name.empty() || name.front() != '/') return false;
  std::size_t pos = 0;
  while (pos < name.size()) {
    std::size_t next = name.find('/', pos + 1);
    std::string_view seg = name.substr(pos + 1, next == std::string_view::npos ? std::string_view::npos
                                                                               : next - pos - 1);
    std::size_t eq = seg.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == seg.size()) return false;
    for (char c : seg) {
      if (static_cast<unsigned char>(c) < 0x20) return false;
    }
    if (next == std::string_view::npos) break;
    pos = next;
  }
  return true;
}

Identity::Identity(std::string name) : name_(std::move(name)) {
  if (!valid(name_)) throw Error(ErrorCode::Malformed, "malformed identity '" + name_ + "'");
}

}  // namespace caslite
