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

#include "caslite/resource_service.hpp"

#include <mutex>

#include "caslite/auth.hpp"
#include "caslite/file_util.hpp"

namespace caslite {

namespace {

EnforcementDecision credential_denied(const std::string& why) {
  return EnforcementDecision::denied(Stage::Credential, why);
}

}  // namespace

std::string_view resource_mode_name(ResourceMode m) {
  return m == ResourceMode::Push ? "push" : "pull";
}

ResourceMode parse_resource_mode(std::string_view name) {
  if (name == "push") return ResourceMode::Push;
  if (name == "pull") return ResourceMode::Pull;
  throw Error(ErrorCode::Malformed, "mode must be push or pull, got '" + std::string(name) + "'");
}

GroupRights group_rights_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::Malformed, "group rights must be an object");
  GroupRights out;
  for (const auto& [group, rights] : doc.items()) out.emplace(group, RightsSet::from_json(rights, false));
  return out;
}

GroupRights load_group_rights(const std::filesystem::path& path) {
  try {
    return group_rights_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Malformed, "'" + path.string() + "': " + e.what());
  }
}

EnforcementDecision enforce(const ResourceConfig& cfg, const CredentialChain& chain,
                            Action action, const ObjectPath& object, Timestamp now) {
  std::optional<VerifiedChain> verified;
  std::optional<PolicyAssertion> assertion;
  try {
    verified = verify_chain(chain, cfg.anchors, now);
    assertion = extract_from_proxy(chain);
  } catch (const Error& e) {
    return credential_denied(e.what());
  }
  const VerifiedChain& v = *verified;

  if (assertion) {
    AssertionVerdict verdict = verify_assertion(*assertion, cfg.cas_public, cfg.cas_identity, now);
    if (!verdict.ok) {
      return credential_denied("assertion rejected: " +
                               std::string(assertion_failure_name(*verdict.failure)));
    }
    if (assertion->subject != v.subject) {
      return credential_denied("SubjectMismatch: assertion names " + assertion->subject.str() +
                               " but the chain authenticates " + v.subject.str());
    }
    RightsSet asserted;
    if (assertion->mode == AssertionMode::Rights) {
      asserted = *assertion->rights;
    } else {
      if (!cfg.group_rights) {
        return credential_denied("membership assertion but no group rights are configured");
      }
      for (const auto& g : *assertion->groups) {
        if (auto it = cfg.group_rights->find(g); it != cfg.group_rights->end()) {
          asserted = unite(asserted, it->second);
        }
      }
    }
    if (v.restriction) asserted = intersect(asserted, *v.restriction);
    return decide(cfg.site, assertion->issuer, asserted, v.subject, action, object);
  }

  if (v.subject == cfg.cas_identity) {
    // Restricted proxy: the chain names the CAS server, so the user behind it
    // is invisible here.
    if (!chain.eec.keys.same_public(cfg.cas_public)) {
      return credential_denied("chain claims the CAS identity under a different key");
    }
    if (chain.links.empty()) {
      return credential_denied("the CAS end-entity credential is not a user credential");
    }
    RightsSet asserted;
    if (v.restriction) {
      asserted = *v.restriction;
    } else if (auto account = cfg.site.vo_accounts.find(cfg.cas_identity);
               account != cfg.site.vo_accounts.end()) {
      if (auto r = cfg.site.site_rights.find(account->second); r != cfg.site.site_rights.end()) {
        asserted = r->second;
      }
    }
    return decide(cfg.site, cfg.cas_identity, asserted, v.subject, action, object);
  }
  return credential_denied("credential carries no policy assertion");
}

EnforcementDecision pull_authorize(const ResourceConfig& cfg, StatementCache& statements,
                                   const CredentialChain& chain, Action action,
                                   const ObjectPath& object, Timestamp now) {
  std::optional<VerifiedChain> verified;
  try {
    verified = verify_chain(chain, cfg.anchors, now);
  } catch (const Error& e) {
    return credential_denied(e.what());
  }
  if (verified->subject == cfg.cas_identity) {
    return credential_denied("the CAS identity has no entry in resource statements");
  }
  std::shared_ptr<const SignedStatement> statement;
  RightsSet rights;
  try {
    statement = statements.get(now);
    rights = statement->listing().rights_of(verified->subject);
  } catch (const Error& e) {
    return credential_denied(e.what());
  }
  if (verified->restriction) rights = intersect(rights, *verified->restriction);
  return decide(cfg.site, statement->issuer, rights, verified->subject, action, object);
}

bool carries_policy(const ResourceConfig& cfg, const CredentialChain& chain) {
  try {
    if (extract_from_proxy(chain)) return true;
  } catch (const Error&) {
    return true;  // enforce reports the malformed extension
  }
  return chain.eec.subject == cfg.cas_identity;
}

AccessDenied::AccessDenied(EnforcementDecision decision)
    : Error(ErrorCode::Denied,
            std::string(stage_name(decision.stage.value_or(Stage::Credential))) + ": " +
                decision.reason),
      decision_(std::move(decision)) {}

std::optional<Bytes> ObjectStore::get(const ObjectPath& path) const {
  std::shared_lock lock(mu_);
  auto it = objects_.find(path.str());
  if (it == objects_.end()) return std::nullopt;
  return it->second;
}

void ObjectStore::put(const ObjectPath& path, Bytes data) {
  std::unique_lock lock(mu_);
  objects_[path.str()] = std::move(data);
}

bool ObjectStore::erase(const ObjectPath& path) {
  std::unique_lock lock(mu_);
  return objects_.erase(path.str()) > 0;
}

std::vector<std::string> ObjectStore::list(const ObjectPath& prefix) const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  const std::string dir = prefix.str() + "/";
  for (auto it = objects_.lower_bound(prefix.str()); it != objects_.end(); ++it) {
    if (it->first == prefix.str() || it->first.rfind(dir, 0) == 0) {
      out.push_back(it->first);
    } else if (it->first.compare(0, prefix.str().size(), prefix.str()) != 0) {
      break;
    }
  }
  return out;
}

ResourceService::ResourceService(ResourceConfig cfg, std::shared_ptr<StatementSource> pull_source)
    : cfg_(std::move(cfg)) {
  cfg_.site.validate();
  if (cfg_.mode == ResourceMode::Pull) {
    if (!pull_source) throw Error(ErrorCode::Malformed, "pull mode needs a statement source");
    statements_ = std::make_unique<StatementCache>(std::move(pull_source),
                                                   resource_rights_query(cfg_.pull_namespace),
                                                   cfg_.cas_public, cfg_.cas_identity);
  }
}

EnforcementDecision ResourceService::authorize(const CredentialChain& chain, Action action,
                                               const ObjectPath& object, Timestamp now) {
  if (statements_ && !carries_policy(cfg_, chain)) {
    return pull_authorize(cfg_, *statements_, chain, action, object, now);
  }
  return enforce(cfg_, chain, action, object, now);
}

void ResourceService::require(const CredentialChain& chain, Action action,
                              const ObjectPath& object, Timestamp now) {
  EnforcementDecision d = authorize(chain, action, object, now);
  if (!d.allow) throw AccessDenied(std::move(d));
}

Bytes ResourceService::read(const CredentialChain& chain, const ObjectPath& path, Timestamp now) {
  require(chain, Action::Read, path, now);
  auto data = store_.get(path);
  if (!data) throw Error(ErrorCode::NotFound, path.str());
  return *data;
}

void ResourceService::write(const CredentialChain& chain, const ObjectPath& path, Bytes data,
                            Timestamp now) {
  require(chain, Action::Write, path, now);
  store_.put(path, std::move(data));
}

std::vector<std::string> ResourceService::list(const CredentialChain& chain,
                                               const ObjectPath& prefix, Timestamp now) {
  require(chain, Action::List, prefix, now);
  return store_.list(prefix);
}

void ResourceService::remove(const CredentialChain& chain, const ObjectPath& path, Timestamp now) {
  require(chain, Action::Delete, path, now);
  if (!store_.erase(path)) throw Error(ErrorCode::NotFound, path.str());
}

Json ResourceService::handle(const Json& request, Timestamp now) {
  try {
    if (!request.is_object()) throw Error(ErrorCode::Malformed, "request must be an object");
    field::only(request, {"kind", "payload", "chain", "proof"});
    std::string kind = field::string(request, "kind");
    const Json& payload = field::require(request, "payload");
    if (kind != "read" && kind != "write" && kind != "list" && kind != "delete") {
      throw Error(ErrorCode::Malformed, "unknown request kind '" + kind + "'");
    }
    ObjectPath path(field::string(payload, "path"));

    std::optional<AuthenticatedCaller> caller;
    try {
      caller = authenticate_request(request, cfg_.anchors, now);
    } catch (const Error& e) {
      throw AccessDenied(credential_denied(e.what()));
    }
    const CredentialChain& chain = caller->chain;

    if (kind == "read") {
      field::only(payload, {"path"});
      return ok_response(Json{{"data", hex_encode(read(chain, path, now))}});
    }
    if (kind == "write") {
      field::only(payload, {"path", "data"});
      write(chain, path, field::hex(payload, "data"), now);
      return ok_response(Json::object());
    }
    if (kind == "list") {
      field::only(payload, {"path"});
      return ok_response(Json{{"paths", list(chain, path, now)}});
    }
    field::only(payload, {"path"});
    remove(chain, path, now);
    return ok_response(Json::object());
  } catch (const AccessDenied& d) {
    return error_response(ErrorCode::Denied, d.detail(), Json{{"decision", d.decision().to_json()}});
  } catch (const Error& e) {
    return error_response(e);
  }
}

VaultClient::VaultClient(Endpoint endpoint, CredentialChain chain, Clock clock)
    : endpoint_(std::move(endpoint)), chain_(std::move(chain)), clock_(std::move(clock)) {}

Json VaultClient::send(std::string_view kind, Json payload) {
  Json response = call(endpoint_, signed_request(kind, std::move(payload), chain_, clock_()));
  Json remote;
  try {
    return unwrap_response(response, &remote);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Denied && remote.contains("decision")) {
      throw AccessDenied(EnforcementDecision::from_json(remote.at("decision")));
    }
    throw;
  }
}

Bytes VaultClient::read(const std::string& path) {
  return field::hex(send("read", Json{{"path", path}}), "data");
}

void VaultClient::write(const std::string& path, const Bytes& data) {
  send("write", Json{{"path", path}, {"data", hex_encode(data)}});
}

std::vector<std::string> VaultClient::list(const std::string& prefix) {
  Json body = send("list", Json{{"path", prefix}});
  return field::require(body, "paths").get<std::vector<std::string>>();
}

void VaultClient::remove(const std::string& path) { send("delete", Json{{"path", path}}); }

}  // namespace caslite
