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

#include <memory>
#include <optional>
#include <set>
#include <string>

#include "caslite/assertion.hpp"
#include "caslite/resource_service.hpp"
#include "caslite/site_policy.hpp"
#include "caslite/statement.hpp"

namespace caslite {

struct DecisionQuery {
  Identity identity;
  // "name=value" strings with distinct names. Accepted but not consulted.
  std::set<std::string> attributes;
  Action action = Action::Read;
  ObjectPath object{"vo://"};
  std::optional<PolicyAssertion> assertion;

  Json to_json() const;
  static DecisionQuery from_json(const Json& doc);
};

struct DecisionAnswer {
  bool allow = false;
  std::string reason;  // never empty on deny

  Json to_json() const;
  static DecisionAnswer from_json(const Json& doc);

  friend bool operator==(const DecisionAnswer&, const DecisionAnswer&) = default;
};

struct AuthzConfig {
  SitePolicy site;
  KeyMaterial cas_public;
  Identity cas_identity;
  std::optional<GroupRights> group_rights;
  ObjectPattern pull_namespace{"vo://**"};
};

// A presented assertion must verify and name q.identity. Without one, the
// rights come from the pull statement when `pull` is given; otherwise the
// answer is no.
DecisionAnswer decide_local(const DecisionQuery& q, const AuthzConfig& cfg, StatementCache* pull,
                            Timestamp now);

// Wire kind "decide" with a DecisionQuery payload, answered with a
// DecisionAnswer. Callers are not authenticated; run it next to the
// resource servers it serves.
class DecisionService {
 public:
  explicit DecisionService(AuthzConfig cfg, std::shared_ptr<StatementSource> pull = nullptr);

  DecisionAnswer decide(const DecisionQuery& q, Timestamp now);
  Json handle(const Json& request, Timestamp now);

 private:
  AuthzConfig cfg_;
  std::unique_ptr<StatementCache> pull_;
};

DecisionAnswer ask_decision(const Endpoint& endpoint, const DecisionQuery& q);

}  // namespace caslite
