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

#include <gtest/gtest.h>

#include "caslite/error.hpp"
#include "caslite/site_policy.hpp"
#include "caslite/vo_policy.hpp"
#include "fixture.hpp"

namespace caslite {
namespace {

using namespace caslite::testing;

TEST(SitePolicyTest, DecideExamples) {
  auto db = fixture_db();
  auto site = fixture_site();
  auto alice_rights = user_rights(db, alice());
  auto obj = path("vo://esg/data/public/a.nc");

  EXPECT_TRUE(decide(site, cas_id(), alice_rights, alice(), Action::Read, obj).allow);

  auto d = decide(site, cas_id(), alice_rights, alice(), Action::Delete, obj);
  EXPECT_FALSE(d.allow);
  EXPECT_EQ(d.stage, Stage::SiteVo);

  RightsSet full;
  for (Action a : kAllActions) full.insert(Right{a, ObjectPattern("vo://esg/**")});
  d = decide(site, cas_id(), full, carol(), Action::Read, obj);
  EXPECT_EQ(d.stage, Stage::SiteUser);

  d = decide(site, id("rogue-cas"), full, alice(), Action::Read, obj);
  EXPECT_EQ(d.stage, Stage::SiteVo);

  d = decide(site, cas_id(), user_rights(db, bob()), bob(), Action::Write, obj);
  EXPECT_EQ(d.stage, Stage::VoUser);
}

// Exhaustive oracle over members, carol, every action and every universe object,
// with and without alice blacklisted.
TEST(SitePolicyTest, DecideMatchesBruteForceOracle) {
  auto db = fixture_db();
  for (bool alice_black : {false, true}) {
    auto site = fixture_site();
    std::vector<std::string> black{"carol"};
    if (alice_black) {
      site.blacklist.insert(alice());
      black.push_back("alice");
    }
    int allowed = 0;
    for (const auto& cn : {"alice", "bob", "admin-ann", "carol"}) {
      auto rights = user_rights(db, id(cn));
      for (Action a : kAllActions) {
        for (const auto& o : universe_objects()) {
          auto d = decide(site, cas_id(), rights, id(cn), a, path(o));
          bool expect = oracle::allowed(cn, std::string(action_name(a)), o, black);
          ASSERT_EQ(d.allow, expect) << cn << " " << action_name(a) << " " << o;
          EXPECT_EQ(d.allow, !d.stage.has_value());
          allowed += d.allow;
        }
      }
    }
    EXPECT_GT(allowed, 0);
  }
}

TEST(SitePolicyTest, DecisionNeverExceedsEitherSide) {
  auto db = fixture_db();
  auto site = fixture_site();
  RightsSet generous;
  for (Action a : kAllActions) generous.insert(Right{a, ObjectPattern("vo://**")});
  for (const auto& o : universe_objects()) {
    for (Action a : kAllActions) {
      bool site_ok = site.site_rights.at("esg").allows(a, path(o));
      EXPECT_LE(decide(site, cas_id(), generous, alice(), a, path(o)).allow, site_ok);
      auto bobs = user_rights(db, bob());
      EXPECT_LE(decide(site, cas_id(), bobs, bob(), a, path(o)).allow, bobs.allows(a, path(o)));
    }
  }
}

TEST(SitePolicyTest, FileFormat) {
  auto site = fixture_site();
  auto back = SitePolicy::from_json(site.to_json());
  EXPECT_EQ(back.to_json(), site.to_json());
  Json bad = site.to_json();
  bad["site_rights"]["ghost"] = Json::array({"read vo://x/**"});
  EXPECT_THROW(SitePolicy::from_json(bad), Error);
}

TEST(SitePolicyTest, DecisionJson) {
  auto d = EnforcementDecision::denied(Stage::VoUser, "nope");
  EXPECT_EQ(EnforcementDecision::from_json(d.to_json()), d);
  EXPECT_EQ(EnforcementDecision::from_json(EnforcementDecision::allowed().to_json()),
            EnforcementDecision::allowed());
  EXPECT_THROW(EnforcementDecision::from_json(Json{{"allow", true}, {"reason", "x"}, {"stage", "vo_user"}}), Error);
}

}  // namespace
}  // namespace caslite
