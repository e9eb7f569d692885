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

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "caslite/identity.hpp"
#include "caslite/rights.hpp"

namespace caslite {

// Pipeline stage at which a request was refused, in evaluation order.
enum class Stage { Credential, SiteVo, VoUser, SiteUser };

std::string_view stage_name(Stage s);
Stage parse_stage(std::string_view name);

struct EnforcementDecision {
  bool allow = false;
  std::optional<Stage> stage;  // set exactly when denied
  std::string reason;

  static EnforcementDecision allowed() { return {true, std::nullopt, "allowed"}; }
  static EnforcementDecision denied(Stage stage, std::string reason) {
    return {false, stage, std::move(reason)};
  }

  Json to_json() const;
  static EnforcementDecision from_json(const Json& doc);

  friend bool operator==(const EnforcementDecision&, const EnforcementDecision&) = default;
};

// The resource provider's side of the combined policy.
struct SitePolicy {
  // CAS server identity -> local account standing for that VO.
  std::map<Identity, std::string> vo_accounts;
  // Local account -> what the site lets that account do.
  std::map<std::string, RightsSet> site_rights;
  // End users refused regardless of VO policy.
  std::set<Identity> blacklist;

  void validate() const;
  Json to_json() const;
  static SitePolicy from_json(const Json& doc);
  static SitePolicy load(const std::filesystem::path& path);
};

// Allows iff the assertion signer is mapped to a local account, that account's
// site rights cover the request, the asserted VO rights cover the request,
// and the user is not blacklisted. A denial names the first failing check.
EnforcementDecision decide(const SitePolicy& site, const Identity& issuer,
                           const RightsSet& asserted, const Identity& user, Action action,
                           const ObjectPath& object);

}  // namespace caslite
