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

#include "caslite/site_policy.hpp"

#include <array>

#include "caslite/error.hpp"
#include "caslite/file_util.hpp"

namespace caslite {

namespace {
constexpr std::array<std::string_view, 4> kStageNames{"credential", "site_vo", "vo_user", "site_user"};
}  // namespace

std::string_view stage_name(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

Stage parse_stage(std::string_view name) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  }
  throw Error(ErrorCode::Malformed, "unknown stage '" + std::string(name) + "'");
}

Json EnforcementDecision::to_json() const {
  Json doc{{"allow", allow}, {"reason", reason}};
  if (stage) doc["stage"] = stage_name(*stage);
  return doc;
}

EnforcementDecision EnforcementDecision::from_json(const Json& doc) {
  field::only(doc, {"allow", "reason", "stage"});
  EnforcementDecision d{field::boolean(doc, "allow"), std::nullopt, field::string(doc, "reason")};
  if (doc.contains("stage")) d.stage = parse_stage(field::string(doc, "stage"));
  if (d.allow == d.stage.has_value()) throw Error(ErrorCode::Malformed, "stage must be present exactly on deny");
  return d;
}

void SitePolicy::validate() const {
  for (const auto& [account, _] : site_rights) {
    bool mapped = false;
    for (const auto& [__, a] : vo_accounts) mapped = mapped || a == account;
    if (!mapped) throw Error(ErrorCode::Malformed, "site_rights names unmapped account '" + account + "'");
  }
}

Json SitePolicy::to_json() const {
  Json accounts = Json::object();
  for (const auto& [id, account] : vo_accounts) accounts[id.str()] = account;
  Json rights = Json::object();
  for (const auto& [account, r] : site_rights) rights[account] = r.to_json();
  Json black = Json::array();
  for (const auto& id : blacklist) black.push_back(id.str());
  return Json{{"vo_accounts", std::move(accounts)}, {"site_rights", std::move(rights)},
              {"blacklist", std::move(black)}};
}

SitePolicy SitePolicy::from_json(const Json& doc) {
  // Site files are hand-edited; set ordering is not enforced.
  field::only(doc, {"vo_accounts", "site_rights", "blacklist"});
  SitePolicy site;
  const Json& accounts = field::require(doc, "vo_accounts");
  if (!accounts.is_object()) throw Error(ErrorCode::Malformed, "vo_accounts must be an object");
  for (const auto& [id, account] : accounts.items()) {
    if (!account.is_string()) throw Error(ErrorCode::Malformed, "account names must be strings");
    site.vo_accounts.emplace(Identity(id), account.get<std::string>());
  }
  const Json& rights = field::require(doc, "site_rights");
  if (!rights.is_object()) throw Error(ErrorCode::Malformed, "site_rights must be an object");
  for (const auto& [account, r] : rights.items()) {
    site.site_rights.emplace(account, RightsSet::from_json(r, false));
  }
  if (doc.contains("blacklist")) {
    for (const auto& s : string_set_from_json(doc["blacklist"], false)) site.blacklist.insert(Identity(s));
  }
  site.validate();
  return site;
}

SitePolicy SitePolicy::load(const std::filesystem::path& path) {
  try {
    return from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Malformed, path.string() + ": " + e.what());
  }
}

EnforcementDecision decide(const SitePolicy& site, const Identity& issuer,
                           const RightsSet& asserted, const Identity& user, Action action,
                           const ObjectPath& object) {
  const std::string request = std::string(action_name(action)) + " " + object.str();
  auto account = site.vo_accounts.find(issuer);
  if (account == site.vo_accounts.end()) {
    return EnforcementDecision::denied(Stage::SiteVo, "assertion signer " + issuer.str() + " is not mapped to a local account");
  }
  auto rights = site.site_rights.find(account->second);
  if (rights == site.site_rights.end() || !rights->second.allows(action, object)) {
    return EnforcementDecision::denied(Stage::SiteVo, "site grants account '" + account->second + "' no right to " + request);
  }
  if (!asserted.allows(action, object)) {
    return EnforcementDecision::denied(Stage::VoUser, "VO grants " + user.str() + " no right to " + request);
  }
  if (site.blacklist.count(user)) {
    return EnforcementDecision::denied(Stage::SiteUser, user.str() + " is blacklisted by the site");
  }
  return EnforcementDecision::allowed();
}

}  // namespace caslite
