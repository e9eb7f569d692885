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
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "caslite/assertion.hpp"
#include "caslite/site_policy.hpp"
#include "caslite/statement.hpp"
#include "caslite/wire.hpp"

namespace caslite {

enum class ResourceMode { Push, Pull };

std::string_view resource_mode_name(ResourceMode m);
ResourceMode parse_resource_mode(std::string_view name);

using GroupRights = std::map<std::string, RightsSet>;

// {"group": ["action pattern", ...], ...}
GroupRights group_rights_from_json(const Json& doc);
GroupRights load_group_rights(const std::filesystem::path& path);

struct ResourceConfig {
  SitePolicy site;
  KeyMaterial cas_public;
  Identity cas_identity;
  // Anchors for verifying user credential chains.
  std::vector<EndEntityCredential> anchors;
  ResourceMode mode = ResourceMode::Push;
  std::optional<Endpoint> pull_source;
  // Needed to honour membership-mode assertions.
  std::optional<GroupRights> group_rights;
  // Namespace of the resource_rights statement fetched in pull mode.
  ObjectPattern pull_namespace{"vo://**"};
};

// Push-mode enforcement. Steps, stopping at the first failure:
//   credential  chain and carried assertion verify, assertion subject is the
//               chain subject (restricted CAS proxies carry no assertion)
//   site_vo     the assertion signer maps to a local account whose site
//               rights cover the request
//   vo_user     the asserted rights (or group_rights of the asserted groups,
//               or the proxy restriction) cover the request
//   site_user   the user is not blacklisted
// A restriction on the user's own proxy further narrows the asserted rights.
EnforcementDecision enforce(const ResourceConfig& cfg, const CredentialChain& chain,
                            Action action, const ObjectPath& object, Timestamp now);

// Pull-mode enforcement for a chain carrying no policy: the user's rights come
// from the resource_rights statement held by `statements`. Source failures
// and stale statements deny at the credential stage, with the error code at
// the start of the reason.
EnforcementDecision pull_authorize(const ResourceConfig& cfg, StatementCache& statements,
                                   const CredentialChain& chain, Action action,
                                   const ObjectPath& object, Timestamp now);

// True when the chain carries its own policy: an assertion extension or a
// restricted proxy rooted in the CAS credential.
bool carries_policy(const ResourceConfig& cfg, const CredentialChain& chain);

class AccessDenied : public Error {
 public:
  explicit AccessDenied(EnforcementDecision decision);
  const EnforcementDecision& decision() const { return decision_; }

 private:
  EnforcementDecision decision_;
};

class ObjectStore {
 public:
  std::optional<Bytes> get(const ObjectPath& path) const;
  void put(const ObjectPath& path, Bytes data);
  bool erase(const ObjectPath& path);
  // `prefix` itself and everything beneath it, sorted.
  std::vector<std::string> list(const ObjectPath& prefix) const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, Bytes> objects_;
};

// The file service: every operation authorizes before touching the store.
// Wire kinds read/write/list/delete with payload {path, data?}; data is hex.
// Denials answer with code Denied plus "stage" and "reason".
class ResourceService {
 public:
  // `pull_source` is required in pull mode.
  ResourceService(ResourceConfig cfg, std::shared_ptr<StatementSource> pull_source = nullptr);

  EnforcementDecision authorize(const CredentialChain& chain, Action action,
                                const ObjectPath& object, Timestamp now);

  // Errors: AccessDenied; NotFound after an allow.
  Bytes read(const CredentialChain& chain, const ObjectPath& path, Timestamp now);
  void write(const CredentialChain& chain, const ObjectPath& path, Bytes data, Timestamp now);
  std::vector<std::string> list(const CredentialChain& chain, const ObjectPath& prefix,
                                Timestamp now);
  void remove(const CredentialChain& chain, const ObjectPath& path, Timestamp now);

  Json handle(const Json& request, Timestamp now);

  const ResourceConfig& config() const { return cfg_; }
  ObjectStore& store() { return store_; }

 private:
  void require(const CredentialChain& chain, Action action, const ObjectPath& object,
               Timestamp now);

  ResourceConfig cfg_;
  std::unique_ptr<StatementCache> statements_;
  ObjectStore store_;
};

// Client for a remote ResourceService. Requests are signed with `chain`.
class VaultClient {
 public:
  VaultClient(Endpoint endpoint, CredentialChain chain, Clock clock = system_clock());

  Bytes read(const std::string& path);
  void write(const std::string& path, const Bytes& data);
  std::vector<std::string> list(const std::string& prefix);
  void remove(const std::string& path);

 private:
  Json send(std::string_view kind, Json payload);

  Endpoint endpoint_;
  CredentialChain chain_;
  Clock clock_;
};

}  // namespace caslite
