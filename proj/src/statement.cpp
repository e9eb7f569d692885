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

#include "caslite/statement.hpp"

#include "caslite/auth.hpp"

namespace caslite {

Json user_rights_query(const Identity& subject) {
  return Json{{"query", "user_rights"}, {"subject", subject.str()}};
}

Json resource_rights_query(const ObjectPattern& ns) {
  return Json{{"query", "resource_rights"}, {"namespace", ns.str()}};
}

Json SignedStatement::signed_body() const {
  return Json{{"type", "caslite.statement"},
              {"query", query},
              {"body", body},
              {"issuer", issuer.str()},
              {"issued_at", to_unix(issued_at)},
              {"expires_at", to_unix(expires_at)}};
}

Json SignedStatement::to_json() const {
  Json doc = signed_body();
  doc["signature"] = hex_encode(signature);
  return doc;
}

SignedStatement SignedStatement::from_json(const Json& doc) {
  field::only(doc, {"type", "query", "body", "issuer", "issued_at", "expires_at", "signature"});
  if (field::string(doc, "type") != "caslite.statement") {
    throw Error(ErrorCode::Malformed, "not a signed statement");
  }
  SignedStatement s{field::require(doc, "query"),
                    field::require(doc, "body"),
                    Identity(field::string(doc, "issuer")),
                    from_unix(field::integer(doc, "issued_at")),
                    from_unix(field::integer(doc, "expires_at")),
                    field::hex(doc, "signature")};
  if (!s.query.is_object() || !s.body.is_object()) {
    throw Error(ErrorCode::Malformed, "statement query and body must be objects");
  }
  if (s.expires_at <= s.issued_at) {
    throw Error(ErrorCode::Malformed, "statement expires_at must follow issued_at");
  }
  return s;
}

PolicyAssertion SignedStatement::assertion() const {
  field::only(body, {"assertion"});
  return PolicyAssertion::from_json(field::require(body, "assertion"));
}

ResourceListing SignedStatement::listing() const { return ResourceListing::from_json(body); }

bool SignedStatement::fresh(Timestamp now) const {
  return issued_at - kClockSkew <= now && now < expires_at;
}

Json ResourceListing::to_json() const {
  Json map = Json::object();
  for (const auto& [who, r] : rights) map[who.str()] = r.to_json();
  return Json{{"vo", vo_name}, {"namespace", ns.str()}, {"rights", map},
              {"db_revision", db_revision}};
}

ResourceListing ResourceListing::from_json(const Json& doc) {
  field::only(doc, {"vo", "namespace", "rights", "db_revision"});
  ResourceListing l;
  l.vo_name = field::string(doc, "vo");
  l.ns = ObjectPattern(field::string(doc, "namespace"));
  l.db_revision = field::unsigned_integer(doc, "db_revision");
  const Json& map = field::require(doc, "rights");
  if (!map.is_object()) throw Error(ErrorCode::Malformed, "listing rights must be an object");
  for (const auto& [who, r] : map.items()) {
    RightsSet set = RightsSet::from_json(r);
    if (set.empty()) throw Error(ErrorCode::Malformed, "listing carries an empty entry for " + who);
    l.rights.emplace(Identity(who), std::move(set));
  }
  return l;
}

RightsSet ResourceListing::rights_of(const Identity& who) const {
  auto it = rights.find(who);
  return it == rights.end() ? RightsSet{} : it->second;
}

SignedStatement sign_statement(Json query, Json body, const KeyMaterial& keys,
                               const Identity& issuer, Timestamp issued_at,
                               Timestamp expires_at) {
  if (expires_at <= issued_at) {
    throw Error(ErrorCode::ValidityOutOfRange, "statement lifetime must be positive");
  }
  SignedStatement s{std::move(query), std::move(body), issuer, issued_at, expires_at, {}};
  s.signature = keys.sign(canonical(s.signed_body()));
  return s;
}

bool statement_signature_ok(const SignedStatement& s, const KeyMaterial& cas_public,
                            const Identity& expected_issuer) {
  return s.issuer == expected_issuer && cas_public.verify(canonical(s.signed_body()), s.signature);
}

RemoteStatementSource::RemoteStatementSource(Endpoint endpoint,
                                             std::optional<CredentialChain> chain,
                                             std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), chain_(std::move(chain)), timeout_(timeout) {}

Json RemoteStatementSource::fetch(const Json& query, Timestamp now) {
  Json req = chain_ ? signed_request("query", query, *chain_, now) : make_request("query", query);
  return unwrap_response(call(endpoint_, req, timeout_));
}

StatementCache::StatementCache(std::shared_ptr<StatementSource> source, Json query,
                               KeyMaterial cas_public, Identity cas_identity)
    : source_(std::move(source)),
      query_(std::move(query)),
      cas_public_(std::move(cas_public)),
      cas_identity_(std::move(cas_identity)) {}

std::shared_ptr<const SignedStatement> StatementCache::get(Timestamp now) {
  std::lock_guard<std::mutex> lock(mu_);
  if (current_ && current_->fresh(now)) return current_;

  Json doc;
  try {
    doc = source_->fetch(query_, now);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::SourceUnavailable, e.what());
  }
  auto s = [&] {
    try {
      return SignedStatement::from_json(doc);
    } catch (const Error& e) {
      throw Error(ErrorCode::BadSignature, std::string("undecodable statement: ") + e.what());
    }
  }();
  if (!statement_signature_ok(s, cas_public_, cas_identity_)) {
    throw Error(ErrorCode::BadSignature, "statement signature does not verify");
  }
  if (s.query != query_) throw Error(ErrorCode::BadSignature, "statement answers a different query");
  if (!s.fresh(now)) {
    throw Error(ErrorCode::StaleStatement,
                "statement expired at " + format_utc(s.expires_at));
  }
  current_ = std::make_shared<const SignedStatement>(std::move(s));
  return current_;
}

void StatementCache::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  current_.reset();
}

}  // namespace caslite
