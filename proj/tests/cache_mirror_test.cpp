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

#include <atomic>
#include <random>
#include <thread>

#include "caslite/cache_mirror.hpp"
#include "fixture.hpp"

namespace caslite {
namespace {

using namespace caslite::testing;

class CacheTest : public ::testing::Test {
 protected:
  Fixture f = make_fixture();
  std::unique_ptr<CasService> cas = f.cas_service();
  std::atomic<bool> up{true};
  std::mutex last_mu;
  Json last_sent;

  std::shared_ptr<StatementSource> authority() {
    return std::make_shared<FunctionStatementSource>([this](const Json& q, Timestamp now) {
      if (!up) throw Error(ErrorCode::Io, "authority unreachable");
      Json doc = unwrap_response(cas->handle(signed_request("query", q, f.proxy("owner"), now), now));
      std::lock_guard<std::mutex> lock(last_mu);
      last_sent = doc;
      return doc;
    });
  }

  CacheMirror mirror() { return CacheMirror(Seconds{1}, Seconds{5}, authority()); }
};

TEST_F(CacheTest, ConfigRequiresRefreshBelowMaxAge) {
  EXPECT_EQ(code_of([&] { CacheMirror(Seconds{5}, Seconds{5}, authority()); }), ErrorCode::Malformed);
  EXPECT_EQ(code_of([&] { CacheMirror(Seconds{0}, Seconds{5}, authority()); }), ErrorCode::Malformed);
}

TEST_F(CacheTest, SubscribeFetchesImmediatelyAndIsIdempotent) {
  auto m = mirror();
  m.subscribe(user_rights_query(alice()), f.now);
  m.subscribe(user_rights_query(alice()), f.now);
  EXPECT_EQ(m.subscription_count(), 1u);
  auto e = m.entry(user_rights_query(alice()));
  ASSERT_TRUE(e);
  EXPECT_EQ(e->fetched_at, f.now);
  EXPECT_EQ(SignedStatement::from_json(e->statement).assertion().subject, alice());
  EXPECT_EQ(code_of([&] { m.subscribe(Json{{"query", "everything"}}, f.now); }), ErrorCode::Malformed);
}

TEST_F(CacheTest, PassThroughIsByteIdenticalAndVerifies) {
  auto m = mirror();
  m.subscribe(resource_rights_query(ObjectPattern("vo://esg/data/**")), f.now);
  Json sent;
  {
    std::lock_guard<std::mutex> lock(last_mu);
    sent = last_sent;
  }
  Json served = m.serve_cached(resource_rights_query(ObjectPattern("vo://esg/data/**")), f.now + Seconds{3});
  EXPECT_EQ(canonical(served), canonical(sent));
  auto s = SignedStatement::from_json(served);
  EXPECT_TRUE(statement_signature_ok(s, f.cas_public(), cas_id()));
  EXPECT_EQ(s.listing().rights_of(bob()), RightsSet::parse({"read vo://esg/data/public/**"}));
}

TEST_F(CacheTest, PingListsEntryAges) {
  auto m = mirror();
  m.subscribe(user_rights_query(bob()), f.now);
  up = false;
  m.subscribe(user_rights_query(alice()), f.now + Seconds{2});
  Json body = unwrap_response(m.handle(make_request("ping", Json::object()), f.now + Seconds{2}));
  EXPECT_EQ(body["subscriptions"], 2);
  EXPECT_EQ(body["max_age"], 5);
  ASSERT_EQ(body["entries"].size(), 1u);  // alice's fetch failed
  EXPECT_EQ(body["entries"][0]["query"], user_rights_query(bob()));
  EXPECT_EQ(body["entries"][0]["fetched_at"], to_unix(f.now));
  EXPECT_GT(body["entries"][0]["expires_at"].get<std::int64_t>(), to_unix(f.now));
}

TEST_F(CacheTest, MissAndStaleness) {
  auto m = mirror();
  EXPECT_EQ(code_of([&] { m.serve_cached(user_rights_query(bob()), f.now); }), ErrorCode::CacheMiss);
  m.subscribe(user_rights_query(bob()), f.now);
  EXPECT_NO_THROW(m.serve_cached(user_rights_query(bob()), f.now + Seconds{5}));
  EXPECT_EQ(code_of([&] { m.serve_cached(user_rights_query(bob()), f.now + Seconds{6}); }), ErrorCode::StaleEntry);

  // A subscription whose first fetch failed is a miss, not an error.
  up = false;
  m.subscribe(user_rights_query(alice()), f.now);
  EXPECT_EQ(code_of([&] { m.serve_cached(user_rights_query(alice()), f.now); }), ErrorCode::CacheMiss);
}

TEST_F(CacheTest, NeverServesPastStatementExpiry) {
  CasConfig cfg = f.cas_config();
  cfg.statement_lifetime = Seconds{3};
  cas = std::make_unique<CasService>(cfg, f.db);
  auto m = mirror();
  m.subscribe(resource_rights_query(ObjectPattern("vo://**")), f.now);
  EXPECT_NO_THROW(m.serve_cached(resource_rights_query(ObjectPattern("vo://**")), f.now + Seconds{2}));
  EXPECT_EQ(code_of([&] { m.serve_cached(resource_rights_query(ObjectPattern("vo://**")), f.now + Seconds{3}); }),
            ErrorCode::StaleEntry);
}

TEST_F(CacheTest, RefreshReportsAndKeepsOldEntriesOnFailure) {
  auto m = mirror();
  std::vector<Json> subs{user_rights_query(alice()), user_rights_query(bob()),
                         resource_rights_query(ObjectPattern("vo://esg/data/**"))};
  for (const auto& q : subs) m.subscribe(q, f.now);
  auto report = m.refresh(f.now + Seconds{1});
  EXPECT_EQ(report.updated.size(), 3u);
  EXPECT_TRUE(report.failed.empty());
  for (const auto& q : subs) EXPECT_EQ(m.entry(q)->fetched_at, f.now + Seconds{1});

  up = false;
  report = m.refresh(f.now + Seconds{2});
  EXPECT_TRUE(report.updated.empty());
  EXPECT_EQ(report.failed.size(), 3u);
  for (const auto& q : subs) {
    EXPECT_NO_THROW(m.serve_cached(q, f.now + Seconds{6}));
    EXPECT_EQ(code_of([&] { m.serve_cached(q, f.now + Seconds{7}); }), ErrorCode::StaleEntry);
  }
}

TEST_F(CacheTest, ChangePropagatesOnRefresh) {
  auto m = mirror();
  auto q = resource_rights_query(ObjectPattern("vo://esg/data/**"));
  m.subscribe(q, f.now);
  auto before = SignedStatement::from_json(m.serve_cached(q, f.now)).listing();
  cas->handle(signed_request("admin",
                             admin_command_to_json(admin::Grant{SubjectRef::member(bob()),
                                                                Right::parse("write vo://esg/data/public/**")}),
                             f.proxy("admin-ann"), f.now),
              f.now);
  EXPECT_EQ(SignedStatement::from_json(m.serve_cached(q, f.now)).listing().db_revision, before.db_revision);
  m.refresh(f.now + Seconds{1});
  auto after = SignedStatement::from_json(m.serve_cached(q, f.now + Seconds{1})).listing();
  EXPECT_EQ(after.db_revision, before.db_revision + 1);
  EXPECT_TRUE(after.rights_of(bob()).allows(Action::Write, path("vo://esg/data/public/a.nc")));
}

TEST_F(CacheTest, TickHonoursInterval) {
  auto m = mirror();
  m.subscribe(user_rights_query(alice()), f.now);
  EXPECT_TRUE(m.tick(f.now).has_value());  // first tick always refreshes
  EXPECT_FALSE(m.tick(f.now).has_value());
  EXPECT_FALSE(m.tick(f.now + Seconds{1} - Seconds{1}).has_value());
  EXPECT_TRUE(m.tick(f.now + Seconds{1}).has_value());
}

TEST_F(CacheTest, AvailabilityWindowProperty) {
  std::mt19937 rng(3);
  auto q = user_rights_query(alice());
  for (int trial = 0; trial < 20; ++trial) {
    up = true;
    auto m = mirror();
    Timestamp t = f.now;
    m.subscribe(q, t);
    int steps = 1 + static_cast<int>(rng() % 10);
    Timestamp last_fetch = t;
    for (int i = 0; i < steps; ++i) {
      t += Seconds{1};
      if (m.tick(t)) last_fetch = t;
    }
    up = false;  // outage starts
    auto e = m.entry(q);
    ASSERT_TRUE(e);
    EXPECT_EQ(e->fetched_at, last_fetch);
    Timestamp deadline = std::min(last_fetch + m.max_age(), e->expires_at - Seconds{1});
    for (Timestamp probe = t; probe <= deadline + Seconds{3}; probe += Seconds{1}) {
      m.tick(probe);
      bool served = true;
      try {
        m.serve_cached(q, probe);
      } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::StaleEntry);
        served = false;
      }
      EXPECT_EQ(served, probe <= deadline) << "trial " << trial;
    }
  }
}

TEST_F(CacheTest, WireQueriesAndMalformedFrames) {
  auto m = std::make_shared<CacheMirror>(Seconds{1}, Seconds{5}, authority());
  m->subscribe(user_rights_query(bob()), f.now);
  Timestamp now = f.now;
  auto server = serve_frames(Endpoint{"127.0.0.1", 0},
                             [m](const Json& r, Timestamp t) { return m->handle(r, t); },
                             [now] { return now; });
  RemoteStatementSource client(server->endpoint(), std::nullopt);
  auto s = SignedStatement::from_json(client.fetch(user_rights_query(bob()), now));
  EXPECT_TRUE(statement_signature_ok(s, f.cas_public(), cas_id()));
  EXPECT_EQ(code_of([&] { client.fetch(user_rights_query(alice()), now); }), ErrorCode::CacheMiss);
  Json admin = call(server->endpoint(), make_request("admin", Json::object()));
  EXPECT_EQ(outcome_of(admin), "Malformed");
  EXPECT_NO_THROW(client.fetch(user_rights_query(bob()), now));
}

TEST_F(CacheTest, VaultPullsThroughMirror) {
  auto m = std::make_shared<CacheMirror>(Seconds{1}, Seconds{5}, authority());
  m->subscribe(resource_rights_query(ObjectPattern("vo://**")), f.now);
  auto via_mirror = std::make_shared<FunctionStatementSource>(
      [m](const Json& q, Timestamp now) { return m->serve_cached(q, now); });
  ResourceService vault(f.resource_config(ResourceMode::Pull), via_mirror);
  up = false;  // the authority is gone; the mirror answers
  for (const auto& cn : kMembers) {
    for (const auto& o : universe_objects()) {
      EXPECT_EQ(vault.authorize(f.proxy(cn), Action::Read, ObjectPath(o), f.now).allow,
                oracle::allowed(cn, "read", o));
    }
  }
}

TEST_F(CacheTest, BackgroundRefresherTicks) {
  std::atomic<std::int64_t> fake{to_unix(f.now)};
  auto m = std::make_shared<CacheMirror>(Seconds{1}, Seconds{5}, authority());
  m->subscribe(user_rights_query(alice()), f.now);
  {
    MirrorRefresher refresher(*m, [&] { return from_unix(fake.load()); }, std::chrono::milliseconds(10));
    fake += 3;
    for (int i = 0; i < 200 && m->entry(user_rights_query(alice()))->fetched_at != from_unix(fake.load()); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  EXPECT_EQ(m->entry(user_rights_query(alice()))->fetched_at, from_unix(fake.load()));
}

}  // namespace
}  // namespace caslite
