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

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace caslite {

using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

// Tolerance applied whenever a validity bound is compared against "now".
inline constexpr Seconds kClockSkew{60};

inline Timestamp from_unix(std::int64_t s) { return Timestamp{Seconds{s}}; }
inline std::int64_t to_unix(Timestamp t) { return t.time_since_epoch().count(); }

using Clock = std::function<Timestamp()>;
Timestamp system_now();
inline Clock system_clock() { return &system_now; }

std::string format_utc(Timestamp t);

struct Interval {
  Timestamp not_before;
  Timestamp not_after;

  bool well_formed() const { return not_before < not_after; }
  bool contains(const Interval& inner) const {
    return not_before <= inner.not_before && inner.not_after <= not_after;
  }
  // Skew-tolerant point test.
  bool covers(Timestamp now) const {
    return now + kClockSkew >= not_before && now - kClockSkew <= not_after;
  }
  std::optional<Interval> intersect(const Interval& other) const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace caslite
