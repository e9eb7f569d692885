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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "caslite/assertion.hpp"
#include "caslite/credential.hpp"
#include "caslite/wire.hpp"

namespace caslite {

inline constexpr Seconds kDefaultStatementLifetime{3600};

// Query payloads understood by the CAS server and the cache mirror.
Json user_rights_query(const Identity& subject);
Json resource_rights_query(const ObjectPattern& ns);

// A policy answer signed by the CAS server. The body is {"assertion": ...}
// for user_rights queries and a ResourceListing for resource_rights queries.
struct SignedStatement {
  Json query;
  Json body;
  Identity issuer;
  Timestamp issued_at;
  Timestamp expires_at;
  Bytes signature;

  Json signed_body() const;
  Json to_json() const;
  static SignedStatement from_json(const Json& doc);

  // Body accessors; throw Error(Malformed) when the body has the other shape.
  PolicyAssertion assertion() const;
  struct ResourceListing listing() const;

  // issued_at - skew <= now < expires_at
  bool fresh(Timestamp now) const;
};

// Every member's rights narrowed to one namespace. Members left with no
// rights are omitted.
struct ResourceListing {
  std::string vo_name;
  ObjectPattern ns{"vo://**"};
  std::map<Identity, RightsSet> rights;
  std::uint64_t db_revision = 0;

  Json to_json() const;
  static ResourceListing from_json(const Json& doc);
  // Empty when `who` has no entry.
  RightsSet rights_of(const Identity& who) const;
};

SignedStatement sign_statement(Json query, Json body, const KeyMaterial& keys,
                               const Identity& issuer, Timestamp issued_at,
                               Timestamp expires_at);

// Signature and issuer only; freshness is the caller's call.
bool statement_signature_ok(const SignedStatement& s, const KeyMaterial& cas_public,
                            const Identity& expected_issuer);

// Where statements come from: the CAS server, a cache mirror, or an
// in-process function in tests. fetch returns the statement document.
class StatementSource {
 public:
  virtual ~StatementSource() = default;
  virtual Json fetch(const Json& query, Timestamp now) = 0;
};

// Queries an endpoint over the wire. Requests are signed with `chain` when
// one is given (the CAS server requires it; a mirror ignores it).
class RemoteStatementSource : public StatementSource {
 public:
  RemoteStatementSource(Endpoint endpoint, std::optional<CredentialChain> chain,
                        std::chrono::milliseconds timeout = std::chrono::seconds(5));
  Json fetch(const Json& query, Timestamp now) override;

 private:
  Endpoint endpoint_;
  std::optional<CredentialChain> chain_;
  std::chrono::milliseconds timeout_;
};

class FunctionStatementSource : public StatementSource {
 public:
  using Fn = std::function<Json(const Json& query, Timestamp now)>;
  explicit FunctionStatementSource(Fn fn) : fn_(std::move(fn)) {}
  Json fetch(const Json& query, Timestamp now) override { return fn_(query, now); }

 private:
  Fn fn_;
};

// Holds the latest verified statement for one query and refetches it once it
// expires. Errors: SourceUnavailable when the fetch fails, StaleStatement when
// the fetched statement is already past expires_at, BadSignature when it does
// not verify or answers a different query.
class StatementCache {
 public:
  StatementCache(std::shared_ptr<StatementSource> source, Json query, KeyMaterial cas_public,
                 Identity cas_identity);

  std::shared_ptr<const SignedStatement> get(Timestamp now);
  void clear();

 private:
  std::shared_ptr<StatementSource> source_;
  Json query_;
  KeyMaterial cas_public_;
  Identity cas_identity_;
  std::mutex mu_;
  std::shared_ptr<const SignedStatement> current_;
};

}  // namespace caslite
