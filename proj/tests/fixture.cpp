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

#include "fixture.hpp"

#include <algorithm>

namespace caslite::testing {

Identity id(const std::string& cn) { return Identity("/VO=esg/CN=" + cn); }

VOPolicyDatabase fixture_db() {
  VOPolicyDatabase db("esg", owner());
  auto apply = [&](AdminCommand cmd) { db = apply_admin(db, owner(), cmd); };
  apply(admin::AddMember{alice()});
  apply(admin::AddMember{bob()});
  apply(admin::AddMember{ann()});
  apply(admin::CreateGroup{"publishers"});
  apply(admin::AddToGroup{"publishers", alice()});
  apply(admin::Grant{SubjectRef::group("publishers"), Right::parse("read vo://esg/data/**")});
  apply(admin::Grant{SubjectRef::group("publishers"), Right::parse("write vo://esg/data/**")});
  apply(admin::Grant{SubjectRef::member(bob()), Right::parse("read vo://esg/data/public/**")});
  apply(admin::AddCapability{AdminCapability{ann(),
                                             {AdminPower::Grant, AdminPower::Revoke},
                                             ObjectPattern("vo://esg/data/public/**"),
                                             {}}});
  return db;
}

SitePolicy fixture_site() {
  SitePolicy site;
  site.vo_accounts.emplace(cas_id(), "esg");
  site.site_rights.emplace("esg", RightsSet::parse({"read vo://esg/data/**", "write vo://esg/data/**",
                                                    "list vo://esg/data/**"}));
  site.blacklist.insert(carol());
  return site;
}

Fixture make_fixture(Timestamp now) {
  EndEntityCredential ca = make_ca("testca", now - Seconds{3600});
  Interval year{now - Seconds{600}, now + Seconds{365LL * 24 * 3600}};
  CredentialChain cas{issue_eec(ca, cas_id(), year), {}};
  Fixture f{now, ca, cas, {}, fixture_db(), fixture_site()};
  for (const char* cn : {"alice", "bob", "admin-ann", "carol", "owner", "dave"}) {
    f.eecs.emplace(cn, CredentialChain{issue_eec(ca, id(cn), year), {}});
  }
  return f;
}

CredentialChain Fixture::proxy(const std::string& cn) const {
  return issue_proxy(eecs.at(cn), Interval{now - Seconds{60}, now + Seconds{24 * 3600}});
}

PolicyAssertion Fixture::assertion(const std::string& cn, AssertionMode mode) const {
  return issue_assertion(db, cas_keys(), cas_id(), id(cn), mode, std::nullopt,
                         kDefaultAssertionLifetime, now, 1);
}

CredentialChain Fixture::cas_chain_for(const std::string& cn) const {
  return embed_in_proxy(proxy(cn), assertion(cn));
}

std::unique_ptr<CasService> Fixture::cas_service() const {
  return std::make_unique<CasService>(cas_config(), db);
}

ResourceConfig Fixture::resource_config(ResourceMode mode) const {
  ResourceConfig cfg{site, cas_public(), cas_id(), anchors(), mode, std::nullopt, std::nullopt,
                     ObjectPattern("vo://**")};
  return cfg;
}

std::vector<std::string> universe_objects() {
  return {
      "vo://esg/data",
      "vo://esg/data/a.nc",
      "vo://esg/data/x",
      "vo://esg/data/public",
      "vo://esg/data/public/a.nc",
      "vo://esg/data/public/b.nc",
      "vo://esg/data/public/sub/c.nc",
      "vo://esg/data/private",
      "vo://esg/data/private/secret.nc",
      "vo://esg/data/private/sub/d.nc",
      "vo://esg/data/publication/e.nc",
      "vo://esg/data/public2/f.nc",
      "vo://esg/data2",
      "vo://esg/data2/g.nc",
      "vo://esg/datasets/h.nc",
      "vo://esg/other/i.nc",
      "vo://esg",
      "vo://esg/j.nc",
      "vo://other/data/k.nc",
      "vo://other/data/public/a.nc",
      "file://esg/data/a.nc",
      "vo://esgx/data/a.nc",
      "vo://esg/data/public/deep/er/l.nc",
      "vo://esg/data/private/public/m.nc",
  };
}

namespace oracle {

bool pattern_matches(const std::string& pattern, const std::string& object) {
  const std::string suffix = "/**";
  if (pattern.size() >= suffix.size() &&
      pattern.compare(pattern.size() - suffix.size(), suffix.size(), suffix) == 0) {
    std::string prefix = pattern.substr(0, pattern.size() - suffix.size());
    return object == prefix || object.rfind(prefix + "/", 0) == 0;
  }
  return pattern == object;
}

bool any_matches(const std::vector<RawRight>& rights, const std::string& action,
                 const std::string& object) {
  return std::any_of(rights.begin(), rights.end(), [&](const RawRight& r) {
    return r.action == action && pattern_matches(r.pattern, object);
  });
}

std::vector<RawRight> vo_rights(const std::string& cn) {
  // Raw fixture tables.
  const std::map<std::string, std::vector<std::string>> groups{{"publishers", {"alice"}}};
  const std::map<std::string, std::vector<RawRight>> grants{
      {"group:publishers", {{"read", "vo://esg/data/**"}, {"write", "vo://esg/data/**"}}},
      {"bob", {{"read", "vo://esg/data/public/**"}}},
  };
  const std::vector<std::string> members{"alice", "bob", "admin-ann"};
  std::vector<RawRight> out;
  if (std::find(members.begin(), members.end(), cn) == members.end()) return out;
  if (auto it = grants.find(cn); it != grants.end()) out = it->second;
  for (const auto& [g, ms] : groups) {
    if (std::find(ms.begin(), ms.end(), cn) == ms.end()) continue;
    const auto& gr = grants.at("group:" + g);
    out.insert(out.end(), gr.begin(), gr.end());
  }
  return out;
}

std::vector<RawRight> site_vo_rights() {
  return {{"read", "vo://esg/data/**"}, {"write", "vo://esg/data/**"}, {"list", "vo://esg/data/**"}};
}

bool allowed(const std::string& cn, const std::string& action, const std::string& object,
             const std::vector<std::string>& blacklist) {
  bool site = any_matches(site_vo_rights(), action, object);
  bool vo = any_matches(vo_rights(cn), action, object);
  bool black = std::find(blacklist.begin(), blacklist.end(), cn) != blacklist.end();
  return site && vo && !black;
}

}  // namespace oracle

}  // namespace caslite::testing
