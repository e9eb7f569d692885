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

#include "caslite/cas_server.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

#include "caslite/file_util.hpp"

namespace caslite {

VOPolicyDatabase PolicyStore::load() const {
  try {
    return VOPolicyDatabase::from_json(parse_canonical(read_file(path_)));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(ErrorCode::Malformed, "policy database '" + path_.string() + "': " + e.what());
  }
}

void PolicyStore::save(const VOPolicyDatabase& db, const std::function<void()>& before_rename) const {
  write_file_atomic(path_, canonical(db.to_json()), 0600, before_rename);
}

Json AuditRecord::to_json() const {
  return Json{{"timestamp", to_unix(timestamp)}, {"caller", caller}, {"kind", kind},
              {"outcome", outcome}, {"detail", detail}};
}

AuditRecord AuditRecord::from_json(const Json& doc) {
  field::only(doc, {"timestamp", "caller", "kind", "outcome", "detail"});
  return AuditRecord{from_unix(field::integer(doc, "timestamp")), field::string(doc, "caller"),
                     field::string(doc, "kind"), field::string(doc, "outcome"),
                     field::string(doc, "detail")};
}

AuditLog::AuditLog(const std::filesystem::path& path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0600);
  if (fd_ < 0) {
    throw Error(ErrorCode::Io, "cannot open audit log '" + path.string() + "': " + std::strerror(errno));
  }
  // Resume monotonicity from an existing log.
  auto existing = read(path);
  if (!existing.empty()) last_ = existing.back().timestamp;
}

AuditLog::~AuditLog() {
  if (fd_ >= 0) ::close(fd_);
}

void AuditLog::append(AuditRecord record) {
  std::lock_guard<std::mutex> lock(mu_);
  if (last_ && record.timestamp < *last_) record.timestamp = *last_;
  last_ = record.timestamp;
  std::string line = canonical(record.to_json()) + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t n = ::write(fd_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::Io, std::string("audit append failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::vector<AuditRecord> AuditLog::read(const std::filesystem::path& path) {
  std::vector<AuditRecord> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(AuditRecord::from_json(parse_canonical(line)));
  }
  return out;
}

CasService::CasService(CasConfig cfg, VOPolicyDatabase db, std::optional<PolicyStore> store,
                       std::shared_ptr<AuditLog> audit)
    : cfg_(std::move(cfg)),
      issuer_(cfg_.server_chain.holder_keys(), cfg_.server_chain.eec.subject, cfg_.max_lifetime),
      store_(std::move(store)),
      audit_(std::move(audit)),
      snapshot_(std::make_shared<const VOPolicyDatabase>(std::move(db))) {
  if (!cfg_.server_chain.links.empty()) {
    throw Error(ErrorCode::Malformed, "the CAS server credential must be an end-entity credential");
  }
  if (!cfg_.server_chain.eec.keys.has_private()) {
    throw Error(ErrorCode::MissingPrivateKey, "the CAS server credential has no private key");
  }
}

std::shared_ptr<const VOPolicyDatabase> CasService::snapshot() const {
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  return snapshot_;
}

Json CasService::handle(const Json& request, Timestamp now) {
  std::string kind;
  std::string caller;
  std::string detail;
  Json response;
  std::string outcome = "ok";
  try {
    if (!request.is_object()) throw Error(ErrorCode::Malformed, "request must be an object");
    field::only(request, {"kind", "payload", "chain", "proof"});
    kind = field::string(request, "kind");
    const Json& payload = field::require(request, "payload");
    if (!payload.is_object()) throw Error(ErrorCode::Malformed, "payload must be an object");
    response = ok_response(dispatch(kind, payload, request, now, caller, detail));
  } catch (const Error& e) {
    outcome = std::string(error_code_name(e.code()));
    detail = e.detail();
    response = error_response(e);
  } catch (const std::exception& e) {
    outcome = std::string(error_code_name(ErrorCode::Internal));
    detail = e.what();
    response = error_response(ErrorCode::Internal, e.what());
  }
  if (audit_) audit_->append(AuditRecord{now, caller, kind, outcome, detail});
  return response;
}

Json CasService::dispatch(const std::string& kind, const Json& payload, const Json& request,
                          Timestamp now, std::string& caller, std::string& detail) {
  if (kind == "ping" && !request.contains("chain")) {
    field::only(payload, {});
    auto db = snapshot();
    return Json{{"identity", identity().str()}, {"vo", db->vo_name()}, {"revision", db->revision()}};
  }
  if (kind != "ping" && kind != "get_credential" && kind != "admin" && kind != "query") {
    throw Error(ErrorCode::Malformed, "unknown request kind '" + kind + "'");
  }
  AuthenticatedCaller auth = authenticate_request(request, cfg_.anchors, now);
  caller = auth.verified.subject.str();
  if (auth.verified.restriction) {
    // A restricted proxy names the CAS server, not the user holding it.
    throw Error(ErrorCode::AuthFailed, "restricted credentials cannot authenticate to the CAS server");
  }
  const Identity& who = auth.verified.subject;
  if (kind == "ping") {
    field::only(payload, {});
    auto db = snapshot();
    return Json{{"identity", identity().str()}, {"vo", db->vo_name()}, {"revision", db->revision()},
                {"caller", caller}};
  }
  if (kind == "get_credential") {
    detail = payload.value("mode", "");
    return get_credential(who, payload, now);
  }
  if (kind == "admin") return run_admin(who, payload, detail);
  detail = payload.value("query", "");
  return run_query(payload, now);
}

Json CasService::get_credential(const Identity& caller, const Json& payload, Timestamp now) {
  std::string mode = field::string(payload, "mode");
  Seconds lifetime = kDefaultAssertionLifetime;
  if (payload.contains("lifetime")) lifetime = Seconds{field::integer(payload, "lifetime")};
  if (lifetime <= Seconds{0} || lifetime > cfg_.max_lifetime) {
    throw Error(ErrorCode::LifetimeTooLong,
                "lifetime must lie in (0, " + std::to_string(cfg_.max_lifetime.count()) + "] seconds");
  }
  auto db = snapshot();

  if (mode == "assertion") {
    field::only(payload, {"mode", "assertion_mode", "lifetime", "requested"});
    AssertionMode am = AssertionMode::Rights;
    if (payload.contains("assertion_mode")) {
      am = parse_assertion_mode(field::string(payload, "assertion_mode"));
    }
    std::optional<RightsSet> requested;
    if (payload.contains("requested")) requested = RightsSet::from_json(payload.at("requested"), false);
    PolicyAssertion a = issuer_.issue(*db, caller, am, requested, lifetime, now);
    return Json{{"assertion", a.to_json()}};
  }
  if (mode == "restricted_proxy") {
    field::only(payload, {"mode", "lifetime", "public_key"});
    KeyMaterial key = KeyMaterial::from_json(field::require(payload, "public_key"));
    if (key.has_private()) throw Error(ErrorCode::Malformed, "send the public key only");
    CredentialChain chain =
        issue_restricted_proxy(cfg_.server_chain, *db, caller, lifetime, now, key.public_only());
    return Json{{"chain", chain.public_copy().to_json(false)}};
  }
  throw Error(ErrorCode::Malformed, "unknown credential mode '" + mode + "'");
}

Json CasService::run_admin(const Identity& caller, const Json& payload, std::string& detail) {
  AdminCommand cmd = admin_command_from_json(payload);
  detail = payload.value("op", "");
  std::lock_guard<std::mutex> writer(writer_mu_);
  auto current = snapshot();
  auto next = std::make_shared<const VOPolicyDatabase>(apply_admin(*current, caller, cmd));
  if (store_) {
    try {
      store_->save(*next, before_rename_);
    } catch (const Error& e) {
      throw Error(ErrorCode::Io, std::string("not committed: ") + e.what());
    }
  }
  {
    std::lock_guard<std::mutex> lock(snapshot_mu_);
    snapshot_ = next;
  }
  detail += " -> revision " + std::to_string(next->revision());
  return Json{{"revision", next->revision()}};
}

Json CasService::run_query(const Json& payload, Timestamp now) {
  std::string query = field::string(payload, "query");
  auto db = snapshot();
  if (query == "user_rights") {
    field::only(payload, {"query", "subject"});
    Identity subject(field::string(payload, "subject"));
    if (!db->is_member(subject)) {
      throw Error(ErrorCode::UnknownSubject, subject.str() + " is not a member of VO " + db->vo_name());
    }
    Seconds lifetime = std::min(cfg_.statement_lifetime, cfg_.max_lifetime);
    PolicyAssertion a =
        issuer_.issue(*db, subject, AssertionMode::Rights, std::nullopt, lifetime, now);
    SignedStatement s = sign_statement(payload, Json{{"assertion", a.to_json()}}, issuer_.keys(),
                                       identity(), now, a.validity.not_after);
    return s.to_json();
  }
  if (query == "resource_rights") {
    field::only(payload, {"query", "namespace"});
    ResourceListing listing;
    listing.vo_name = db->vo_name();
    listing.ns = ObjectPattern(field::string(payload, "namespace"));
    listing.db_revision = db->revision();
    for (const Identity& m : db->members()) {
      RightsSet r = restrict_to(user_rights(*db, m), listing.ns);
      if (!r.empty()) listing.rights.emplace(m, std::move(r));
    }
    SignedStatement s = sign_statement(payload, listing.to_json(), issuer_.keys(), identity(), now,
                                       now + cfg_.statement_lifetime);
    return s.to_json();
  }
  throw Error(ErrorCode::Malformed, "unknown query '" + query + "'");
}

VOPolicyDatabase load_or_bootstrap(const PolicyStore& store,
                                   const std::optional<std::string>& vo_name,
                                   const std::optional<Identity>& owner) {
  if (store.exists()) return store.load();
  if (!vo_name || !owner) {
    throw Error(ErrorCode::Io, "policy database '" + store.path().string() +
                                   "' does not exist; pass the VO name and owner to create it");
  }
  VOPolicyDatabase db(*vo_name, *owner);
  store.save(db);
  return db;
}

}  // namespace caslite
