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

// Canonical test fixture: VO "esg" with members alice, bob and admin-ann,
// group publishers = {alice}, a site mapping the CAS identity to account
// "esg", and carol on the site blacklist.

#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "caslite/assertion.hpp"
#include "caslite/cas_server.hpp"
#include "caslite/credential.hpp"
#include "caslite/error.hpp"
#include "caslite/resource_service.hpp"
#include "caslite/site_policy.hpp"
#include "caslite/vo_policy.hpp"

namespace caslite::testing {

inline const Timestamp kT0 = from_unix(1'700'000'000);

Identity id(const std::string& cn);  // "/VO=esg/CN=<cn>"
inline Identity alice() { return id("alice"); }
inline Identity bob() { return id("bob"); }
inline Identity ann() { return id("admin-ann"); }
inline Identity carol() { return id("carol"); }
inline Identity owner() { return id("owner"); }
inline Identity cas_id() { return id("cas"); }

inline ObjectPath path(const std::string& p) { return ObjectPath(p); }

// The code thrown by `f`, or Internal (plus a test failure) when it returns.
template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Internal;
}

// "ok" for a success response, otherwise the error code name.
inline std::string outcome_of(const Json& response) {
  if (response.at("ok").get<bool>()) return "ok";
  return response.at("error").at("code").get<std::string>();
}

struct Fixture {
  Timestamp now;
  EndEntityCredential ca;
  CredentialChain cas_chain;  // CAS server credential with its private key
  std::map<std::string, CredentialChain> eecs;  // cn -> zero-link chain with private key
  VOPolicyDatabase db;
  SitePolicy site;

  std::vector<EndEntityCredential> anchors() const { return {ca}; }
  const KeyMaterial& cas_keys() const { return cas_chain.eec.keys; }
  KeyMaterial cas_public() const { return cas_chain.eec.keys.public_only(); }

  // A fresh one-day proxy for the named user.
  CredentialChain proxy(const std::string& cn) const;
  PolicyAssertion assertion(const std::string& cn,
                            AssertionMode mode = AssertionMode::Rights) const;
  // Proxy with the user's rights-mode assertion embedded.
  CredentialChain cas_chain_for(const std::string& cn) const;

  CasConfig cas_config() const { return CasConfig{cas_chain, anchors()}; }
  // In-memory CAS service over `db`.
  std::unique_ptr<CasService> cas_service() const;
  ResourceConfig resource_config(ResourceMode mode = ResourceMode::Push) const;
};

Fixture make_fixture(Timestamp now = kT0);

// Fixture database built through the owner; revision counts the steps.
VOPolicyDatabase fixture_db();
SitePolicy fixture_site();

// Request universe: 24 concrete objects, including near-miss paths.
std::vector<std::string> universe_objects();
inline const std::vector<std::string> kMembers{"alice", "bob", "admin-ann"};

// Brute-force reference for effective rights, written against plain strings
// and the fixture tables, sharing no code with the library's matcher.
namespace oracle {

bool pattern_matches(const std::string& pattern, const std::string& object);

struct RawRight {
  std::string action;
  std::string pattern;
};

bool any_matches(const std::vector<RawRight>& rights, const std::string& action,
                 const std::string& object);

// Fixture VO rights for `cn` computed from the raw grant table.
std::vector<RawRight> vo_rights(const std::string& cn);
std::vector<RawRight> site_vo_rights();

// site ∩ VO ∩ ¬blacklist for fixture F.
bool allowed(const std::string& cn, const std::string& action, const std::string& object,
             const std::vector<std::string>& blacklist = {"carol"});

}  // namespace oracle

}  // namespace caslite::testing
