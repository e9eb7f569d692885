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

#include "caslite/authz_decision.hpp"

namespace caslite {

namespace {

DecisionAnswer from_decision(const EnforcementDecision& d) {
  if (d.allow) return DecisionAnswer{true, "allowed"};
  return DecisionAnswer{false, std::string(stage_name(*d.stage)) + ": " + d.reason};
}

DecisionAnswer no(std::string reason) { return DecisionAnswer{false, std::move(reason)}; }

}  // namespace

Json DecisionQuery::to_json() const {
  Json doc{{"identity", identity.str()},
           {"attributes", string_set_to_json(attributes)},
           {"action", action_name(action)},
           {"object", object.str()}};
  if (assertion) doc["assertion"] = assertion->to_json();
  return doc;
}

DecisionQuery DecisionQuery::from_json(const Json& doc) {
  field::only(doc, {"identity", "attributes", "action", "object", "assertion"});
  DecisionQuery q{Identity(field::string(doc, "identity")), {},
                  parse_action(field::string(doc, "action")),
                  ObjectPath(field::string(doc, "object")), std::nullopt};
  if (doc.contains("attributes")) {
    q.attributes = string_set_from_json(doc.at("attributes"), false);
    std::set<std::string> names;
    for (const auto& a : q.attributes) {
      auto eq = a.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::Malformed, "attribute '" + a + "' is not name=value");
      }
      if (!names.insert(a.substr(0, eq)).second) {
        throw Error(ErrorCode::Malformed, "attribute '" + a.substr(0, eq) + "' given twice");
      }
    }
  }
  if (doc.contains("assertion")) q.assertion = PolicyAssertion::from_json(doc.at("assertion"));
  return q;
}

Json DecisionAnswer::to_json() const { return Json{{"allow", allow}, {"reason", reason}}; }

DecisionAnswer DecisionAnswer::from_json(const Json& doc) {
  field::only(doc, {"allow", "reason"});
  DecisionAnswer a{field::boolean(doc, "allow"), field::string(doc, "reason")};
  if (!a.allow && a.reason.empty()) throw Error(ErrorCode::Malformed, "a denial needs a reason");
  return a;
}

DecisionAnswer decide_local(const DecisionQuery& q, const AuthzConfig& cfg, StatementCache* pull,
                            Timestamp now) {
  if (q.assertion) {
    const PolicyAssertion& a = *q.assertion;
    AssertionVerdict verdict = verify_assertion(a, cfg.cas_public, cfg.cas_identity, now);
    if (!verdict.ok) {
      return no("credential: assertion rejected: " + std::string(assertion_failure_name(*verdict.failure)));
    }
    if (a.subject != q.identity) {
      return no("credential: subject mismatch: assertion names " + a.subject.str() + ", query names " +
                q.identity.str());
    }
    RightsSet rights;
    if (a.mode == AssertionMode::Rights) {
      rights = *a.rights;
    } else if (!cfg.group_rights) {
      return no("credential: membership assertion but no group rights are configured");
    } else {
      for (const auto& g : *a.groups) {
        if (auto it = cfg.group_rights->find(g); it != cfg.group_rights->end()) rights = unite(rights, it->second);
      }
    }
    return from_decision(decide(cfg.site, a.issuer, rights, q.identity, q.action, q.object));
  }
  if (!pull) return no("no community policy available");
  std::shared_ptr<const SignedStatement> statement;
  RightsSet rights;
  try {
    statement = pull->get(now);
    rights = statement->listing().rights_of(q.identity);
  } catch (const Error& e) {
    return no(std::string("credential: ") + e.what());
  }
  return from_decision(decide(cfg.site, statement->issuer, rights, q.identity, q.action, q.object));
}

DecisionService::DecisionService(AuthzConfig cfg, std::shared_ptr<StatementSource> pull)
    : cfg_(std::move(cfg)) {
  cfg_.site.validate();
  if (pull) {
    pull_ = std::make_unique<StatementCache>(std::move(pull), resource_rights_query(cfg_.pull_namespace),
                                             cfg_.cas_public, cfg_.cas_identity);
  }
}

DecisionAnswer DecisionService::decide(const DecisionQuery& q, Timestamp now) {
  return decide_local(q, cfg_, pull_.get(), now);
}

Json DecisionService::handle(const Json& request, Timestamp now) {
  try {
    if (!request.is_object()) throw Error(ErrorCode::Malformed, "request must be an object");
    field::only(request, {"kind", "payload", "chain", "proof"});
    std::string kind = field::string(request, "kind");
    if (kind != "decide") throw Error(ErrorCode::Malformed, "unknown request kind '" + kind + "'");
    return ok_response(decide(DecisionQuery::from_json(field::require(request, "payload")), now).to_json());
  } catch (const Error& e) {
    return error_response(e);
  }
}

DecisionAnswer ask_decision(const Endpoint& endpoint, const DecisionQuery& q) {
  return DecisionAnswer::from_json(unwrap_response(call(endpoint, make_request("decide", q.to_json()))));
}

}  // namespace caslite
