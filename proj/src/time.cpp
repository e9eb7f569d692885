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

#include "caslite/time.hpp"

#include <algorithm>
#include <ctime>

namespace caslite {

Timestamp system_now() {
  return std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now());
}

std::string format_utc(Timestamp t) {
  std::time_t tt = static_cast<std::time_t>(to_unix(t));
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<Interval> Interval::intersect(const Interval& other) const {
  Interval out{std::max(not_before, other.not_before),
               std::min(not_after, other.not_after)};
  if (!out.well_formed()) return std::nullopt;
  return out;
}

}  // namespace caslite
