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
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "caslite/assertion.hpp"
#include "caslite/auth.hpp"
#include "caslite/statement.hpp"
#include "caslite/vo_policy.hpp"
#include "caslite/wire.hpp"

namespace caslite {

// The policy database file: canonical JSON, replaced atomically.
class PolicyStore {
 public:
  explicit PolicyStore(std::filesystem::path path) : path_(std::move(path)) {}

  const std::filesystem::path& path() const { return path_; }
  bool exists() const { return std::filesystem::exists(path_); }
  VOPolicyDatabase load() const;
  // `before_rename` runs once the new contents are durable in the temp file.
  void save(const VOPolicyDatabase& db, const std::function<void()>& before_rename = {}) const;

 private:
  std::filesystem::path path_;
};

struct AuditRecord {
  Timestamp timestamp;
  std::string caller;  // empty when the caller did not authenticate
  std::string kind;
  std::string outcome;  // "ok" or an error code name
  std::string detail;

  Json to_json() const;
  static AuditRecord from_json(const Json& doc);
};

// Append-only JSON-lines log. Timestamps never go backwards within a file.
class AuditLog {
 public:
  explicit AuditLog(const std::filesystem::path& path);
  ~AuditLog();
  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  void append(AuditRecord record);
  static std::vector<AuditRecord> read(const std::filesystem::path& path);

 private:
  std::mutex mu_;
  int fd_ = -1;
  std::optional<Timestamp> last_;
};

struct CasConfig {
  CredentialChain server_chain;  // with its private key
  std::vector<EndEntityCredential> anchors;
  Seconds max_lifetime = kMaxAssertionLifetime;
  Seconds statement_lifetime = kDefaultStatementLifetime;
};

// Request handling for the VO authority. Readers work on an immutable
// database snapshot; admin commits go through one writer at a time.
//
// Request kinds and payloads:
//   ping                                  (chain optional)
//   get_credential {mode: "assertion", assertion_mode?, lifetime?, requested?}
//                  {mode: "restricted_proxy", public_key, lifetime?}
//   admin          an admin command document ({"op": ...})
//   query          {query: "user_rights", subject} or
//                  {query: "resource_rights", namespace}
class CasService {
 public:
  CasService(CasConfig cfg, VOPolicyDatabase db, std::optional<PolicyStore> store = std::nullopt,
             std::shared_ptr<AuditLog> audit = nullptr);

  Json handle(const Json& request, Timestamp now);

  std::shared_ptr<const VOPolicyDatabase> snapshot() const;
  const Identity& identity() const { return issuer_.identity(); }
  KeyMaterial public_key() const { return issuer_.keys().public_only(); }

  // Test hook passed to PolicyStore::save on every commit.
  void set_before_rename(std::function<void()> hook) { before_rename_ = std::move(hook); }

 private:
  Json dispatch(const std::string& kind, const Json& payload, const Json& request,
                Timestamp now, std::string& caller, std::string& detail);
  Json get_credential(const Identity& caller, const Json& payload, Timestamp now);
  Json run_admin(const Identity& caller, const Json& payload, std::string& detail);
  Json run_query(const Json& payload, Timestamp now);

  CasConfig cfg_;
  AssertionIssuer issuer_;
  std::optional<PolicyStore> store_;
  std::shared_ptr<AuditLog> audit_;
  std::function<void()> before_rename_;

  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const VOPolicyDatabase> snapshot_;
  std::mutex writer_mu_;
};

// Loads the database from `store`, or bootstraps an empty one for `vo_name`
// owned by `owner` when the file is missing and both are given.
VOPolicyDatabase load_or_bootstrap(const PolicyStore& store,
                                   const std::optional<std::string>& vo_name,
                                   const std::optional<Identity>& owner);

}  // namespace caslite
