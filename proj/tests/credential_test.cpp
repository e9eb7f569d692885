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
#include <sys/stat.h>

#include <filesystem>
#include <random>

#include "caslite/credential.hpp"
#include "caslite/error.hpp"
#include "fixture.hpp"

namespace caslite {
namespace {

using testing::kT0;

constexpr Seconds kHour{3600};
constexpr Seconds kDay{24 * 3600};

ErrorCode verify_error(const CredentialChain& chain, std::span<const EndEntityCredential> anchors,
                       Timestamp now, std::optional<std::size_t>* index = nullptr) {
  try {
    verify_chain(chain, anchors, now);
  } catch (const Error& e) {
    if (index) *index = e.index();
    return e.code();
  }
  ADD_FAILURE() << "chain unexpectedly verified";
  return ErrorCode::Internal;
}

class CredentialTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ca_ = make_ca("testca", kT0);
    alice_ = CredentialChain{issue_eec(ca_, testing::alice(), Interval{kT0, kT0 + 365 * kDay}), {}};
    anchors_ = {ca_};
  }

  EndEntityCredential ca_ = make_ca("placeholder", kT0);
  CredentialChain alice_{ca_, {}};
  std::vector<EndEntityCredential> anchors_;
};

TEST_F(CredentialTest, MakeCaIsSelfSignedTrustAnchor) {
  EXPECT_EQ(ca_.subject.str(), "/CN=testca");
  EXPECT_EQ(ca_.subject, ca_.issuer);
  EXPECT_EQ(ca_.validity.not_after - ca_.validity.not_before, kDefaultCaLifetime);
  CredentialChain self{ca_, {}};
  EXPECT_EQ(verify_chain(self, anchors_, kT0 + kHour).subject, ca_.subject);
  EXPECT_EQ(verify_error(self, {}, kT0 + kHour), ErrorCode::UntrustedRoot);
  EXPECT_THROW(make_ca("", kT0), Error);
}

TEST_F(CredentialTest, IssueEecRoundTrip) {
  auto v = verify_chain(alice_, anchors_, kT0 + kDay);
  EXPECT_EQ(v.subject.str(), "/VO=esg/CN=alice");
  EXPECT_FALSE(v.restriction);
  EXPECT_TRUE(v.extensions.empty());

  try {
    issue_eec(ca_, testing::bob(), Interval{kT0, ca_.validity.not_after + Seconds{1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidityOutOfRange);
  }
}

TEST_F(CredentialTest, EveryEecSignatureByteIsLoadBearing) {
  for (std::size_t i = 0; i < alice_.eec.signature.size(); ++i) {
    CredentialChain tampered = alice_;
    tampered.eec.signature[i] ^= 0x01;
    EXPECT_EQ(verify_error(tampered, anchors_, kT0 + kDay), ErrorCode::BadSignature) << i;
  }
}

TEST_F(CredentialTest, ProxyDelegatesFullRights) {
  auto proxy = issue_proxy(alice_, Interval{kT0, kT0 + kDay});
  ASSERT_EQ(proxy.links.size(), 1u);
  EXPECT_FALSE(proxy.eec.keys.has_private());
  EXPECT_TRUE(proxy.holder_keys().has_private());
  auto v = verify_chain(proxy, anchors_, kT0 + kHour);
  EXPECT_EQ(v.subject, testing::alice());
  EXPECT_FALSE(v.restriction);

  auto service = issue_proxy(proxy, Interval{kT0 + kHour, kT0 + 2 * kHour});
  ASSERT_EQ(service.links.size(), 2u);
  auto v2 = verify_chain(service, anchors_, kT0 + kHour + Seconds{5});
  EXPECT_EQ(v2.subject, testing::alice());
  EXPECT_FALSE(v2.restriction);
  EXPECT_TRUE(v2.extensions.empty());
}

TEST_F(CredentialTest, EmptyRestrictionAbsorbs) {
  auto proxy = issue_proxy(alice_, Interval{kT0, kT0 + kDay}, RightsSet{});
  auto v = verify_chain(proxy, anchors_, kT0 + kHour);
  ASSERT_TRUE(v.restriction);
  EXPECT_TRUE(v.restriction->empty());
  auto wider = issue_proxy(proxy, Interval{kT0, kT0 + kHour}, RightsSet::parse({"read vo://esg/**"}));
  EXPECT_TRUE(verify_chain(wider, anchors_, kT0 + Seconds{10}).restriction->empty());
}

TEST_F(CredentialTest, ExpiryAndSkew) {
  auto proxy = issue_proxy(alice_, Interval{kT0, kT0 + kDay});
  auto service = issue_proxy(proxy, Interval{kT0, kT0 + kDay});
  std::optional<std::size_t> index;
  EXPECT_EQ(verify_error(service, anchors_, kT0 + 25 * kHour, &index), ErrorCode::Expired);
  EXPECT_EQ(index, 1u);
  EXPECT_NO_THROW(verify_chain(service, anchors_, kT0 + kDay + kClockSkew));
  EXPECT_EQ(verify_error(service, anchors_, kT0 + kDay + kClockSkew + Seconds{1}), ErrorCode::Expired);
  EXPECT_NO_THROW(verify_chain(service, anchors_, kT0 - kClockSkew));
  EXPECT_EQ(verify_error(service, anchors_, kT0 - kClockSkew - Seconds{1}), ErrorCode::NotYetValid);
}

TEST_F(CredentialTest, RestrictionsIntersectAlongTheChain) {
  auto l1 = issue_proxy(alice_, Interval{kT0, kT0 + kDay},
                        RightsSet::parse({"read vo://esg/data/**", "write vo://esg/data/**"}));
  auto l2 = issue_proxy(l1, Interval{kT0, kT0 + kDay}, RightsSet::parse({"read vo://esg/data/**"}));
  auto v = verify_chain(l2, anchors_, kT0 + kHour);
  ASSERT_TRUE(v.restriction);
  // Set-intersection oracle over the fixture universe.
  for (Action a : kAllActions) {
    for (const auto& o : testing::universe_objects()) {
      bool expect = (a == Action::Read) && testing::oracle::pattern_matches("vo://esg/data/**", o);
      EXPECT_EQ(v.restriction->allows(a, ObjectPath(o)), expect) << o;
    }
  }
  EXPECT_EQ(*v.restriction, RightsSet::parse({"read vo://esg/data/**"}));
}

TEST_F(CredentialTest, NestingEnforced) {
  auto proxy = issue_proxy(alice_, Interval{kT0, kT0 + kDay});
  try {
    issue_proxy(proxy, Interval{kT0, kT0 + kDay + Seconds{1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidityOutOfRange);
  }

  // Hand-built link that outlives its parent, correctly signed.
  CredentialChain bad = proxy;
  DelegationLink link{KeyMaterial::generate(), Interval{kT0, kT0 + 2 * kDay}, std::nullopt,
                      std::nullopt, {}};
  link.signature = proxy.holder_keys().sign(canonical(link.signed_body()));
  bad.links.back().subject_keys = bad.links.back().subject_keys.public_only();
  bad.links.push_back(link);
  std::optional<std::size_t> index;
  EXPECT_EQ(verify_error(bad, anchors_, kT0 + kHour, &index), ErrorCode::BrokenNesting);
  EXPECT_EQ(index, 2u);
}

TEST_F(CredentialTest, ParentMustBeUsable) {
  auto proxy = issue_proxy(alice_, Interval{kT0, kT0 + kDay});
  try {
    issue_proxy(proxy.public_copy(), Interval{kT0, kT0 + kHour});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParentUnverifiable);
  }
  CredentialChain broken = proxy;
  broken.links[0].signature[0] ^= 0xff;
  try {
    issue_proxy(broken, Interval{kT0, kT0 + kHour});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParentUnverifiable);
  }
}

TEST_F(CredentialTest, LinkSignedByWrongKeyRejected) {
  auto proxy = issue_proxy(alice_, Interval{kT0, kT0 + kDay});
  proxy.links[0].signature = KeyMaterial::generate().sign(canonical(proxy.links[0].signed_body()));
  std::optional<std::size_t> index;
  EXPECT_EQ(verify_error(proxy, anchors_, kT0 + kHour, &index), ErrorCode::BadSignature);
  EXPECT_EQ(index, 1u);

  auto other_ca = make_ca("testca", kT0);  // same name, different key
  std::vector<EndEntityCredential> impostor{other_ca};
  EXPECT_EQ(verify_error(alice_, impostor, kT0 + kHour), ErrorCode::BadSignature);
}

TEST_F(CredentialTest, UnknownExtensionsNeverFailVerification) {
  std::mt19937 rng(5);
  CredentialChain chain = alice_;
  for (int i = 0; i < 5; ++i) {
    Bytes blob(1 + rng() % 64);
    for (auto& b : blob) b = static_cast<std::uint8_t>(rng());
    chain = issue_proxy(chain, Interval{kT0, kT0 + kDay - Seconds{i}}, std::nullopt, blob);
  }
  auto v = verify_chain(chain, anchors_, kT0 + kHour);
  EXPECT_EQ(v.extensions.size(), 5u);
  EXPECT_EQ(v.extensions.back(), *chain.links.back().extension);
}

TEST_F(CredentialTest, EverySerializedByteIsTamperEvident) {
  auto l1 = issue_proxy(alice_, Interval{kT0, kT0 + kDay}, RightsSet::parse({"read vo://esg/data/**"}));
  auto l2 = issue_proxy(l1, Interval{kT0, kT0 + kDay}, std::nullopt, to_bytes("opaque"));
  const std::string wire = l2.serialize(false);
  ASSERT_NO_THROW(verify_chain(CredentialChain::parse(wire), anchors_, kT0 + kHour));
  for (std::size_t i = 0; i < wire.size(); ++i) {
    std::string mutated = wire;
    mutated[i] = static_cast<char>(mutated[i] ^ 0x01);
    bool accepted = false;
    try {
      verify_chain(CredentialChain::parse(mutated), anchors_, kT0 + kHour);
      accepted = true;
    } catch (const Error&) {
    }
    ASSERT_FALSE(accepted) << "byte " << i << " of " << wire;
  }
}

// Random issuance sequences: valid inside the effective interval, rejected
// outside it, and restrictions only ever narrow.
TEST_F(CredentialTest, RandomChainsRoundTripAndNarrow) {
  std::mt19937 rng(42);
  const std::vector<std::string> pool{"read vo://esg/data/**", "write vo://esg/data/**",
                                      "read vo://esg/data/public/**", "list vo://esg/**",
                                      "read vo://esg/data/public/a.nc"};
  for (int trial = 0; trial < 40; ++trial) {
    CredentialChain chain = alice_;
    Interval outer = alice_.eec.validity;
    std::optional<RightsSet> effective;
    int depth = 1 + static_cast<int>(rng() % 4);
    for (int d = 0; d < depth; ++d) {
      Seconds span = outer.not_after - outer.not_before;
      Seconds start{static_cast<long long>(rng() % std::max<long long>(1, span.count() / 4))};
      Seconds len{std::max<long long>(3 * 3600, span.count() / 2)};
      Interval iv{outer.not_before + start, std::min(outer.not_after, outer.not_before + start + len)};
      std::optional<RightsSet> restriction;
      if (rng() % 2) {
        RightsSet r;
        for (const auto& s : pool) {
          if (rng() % 2) r.insert(Right::parse(s));
        }
        restriction = r;
      }
      chain = issue_proxy(chain, iv, restriction);
      std::optional<RightsSet> next =
          restriction ? (effective ? intersect(*effective, *restriction) : *restriction) : effective;
      if (effective) {
        for (Action a : kAllActions) {
          for (const auto& o : testing::universe_objects()) {
            ObjectPath obj(o);
            ASSERT_TRUE(!next->allows(a, obj) || effective->allows(a, obj));
          }
        }
      }
      effective = next;
      outer = iv;
    }
    auto ev = *chain.effective_validity();
    EXPECT_EQ(ev, outer);
    Timestamp mid = ev.not_before + (ev.not_after - ev.not_before) / 2;
    auto v = verify_chain(chain, anchors_, mid);
    EXPECT_EQ(v.restriction, effective);
    EXPECT_NO_THROW(verify_chain(chain, anchors_, ev.not_before));
    EXPECT_NO_THROW(verify_chain(chain, anchors_, ev.not_after));
    EXPECT_EQ(verify_error(chain, anchors_, ev.not_after + kClockSkew + Seconds{1}), ErrorCode::Expired);
    EXPECT_EQ(verify_error(chain, anchors_, ev.not_before - kClockSkew - Seconds{1}), ErrorCode::NotYetValid);
  }
}

TEST_F(CredentialTest, ChainFilesArePrivateAndRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / ("caslite-cred-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto proxy = issue_proxy(alice_, Interval{kT0, kT0 + kDay});
  write_chain_file(dir / "proxy.pem", proxy);
  struct stat st {};
  ASSERT_EQ(::stat((dir / "proxy.pem").c_str(), &st), 0);
  EXPECT_EQ(st.st_mode & 0777, 0600u);
  auto back = read_chain_file(dir / "proxy.pem");
  EXPECT_EQ(back.serialize(true), proxy.serialize(true));
  EXPECT_TRUE(back.holder_keys().has_private());

  write_anchor_file(dir / "anchors.pem", anchors_);
  auto anchors = read_anchor_file(dir / "anchors.pem");
  ASSERT_EQ(anchors.size(), 1u);
  EXPECT_FALSE(anchors[0].keys.has_private());
  EXPECT_NO_THROW(verify_chain(back, anchors, kT0 + kHour));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace caslite
