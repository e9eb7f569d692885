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

#include "caslite/assertion.hpp"

#include <sodium.h>

#include "caslite/error.hpp"
#include "caslite/file_util.hpp"

namespace caslite {

namespace {

constexpr const char* kAssertionType = "caslite.assertion";

void check_lifetime(Seconds lifetime, Seconds max_lifetime) {
  if (lifetime <= Seconds{0}) throw Error(ErrorCode::LifetimeTooLong, "lifetime must be positive");
  if (lifetime > max_lifetime) {
    throw Error(ErrorCode::LifetimeTooLong, "lifetime " + std::to_string(lifetime.count()) +
                                                "s exceeds maximum " +
                                                std::to_string(max_lifetime.count()) + "s");
  }
}

}  // namespace

std::string_view assertion_mode_name(AssertionMode m) {
  return m == AssertionMode::Rights ? "rights" : "membership";
}

AssertionMode parse_assertion_mode(std::string_view name) {
  if (name == "rights") return AssertionMode::Rights;
  if (name == "membership") return AssertionMode::Membership;
  throw Error(ErrorCode::Malformed, "unknown assertion mode '" + std::string(name) + "'");
}

std::string_view assertion_failure_name(AssertionFailure f) {
  switch (f) {
    case AssertionFailure::BadSignature: return "BadSignature";
    case AssertionFailure::Expired: return "Expired";
    case AssertionFailure::NotYetValid: return "NotYetValid";
    case AssertionFailure::WrongIssuer: return "WrongIssuer";
  }
  return "BadSignature";
}

Json PolicyAssertion::signed_body() const {
  Json doc{{"type", kAssertionType},
           {"serial", serial},
           {"vo", vo_name},
           {"issuer", issuer.str()},
           {"subject", subject.str()},
           {"mode", assertion_mode_name(mode)},
           {"not_before", to_unix(validity.not_before)},
           {"not_after", to_unix(validity.not_after)},
           {"db_revision", db_revision}};
  if (rights) doc["rights"] = rights->to_json();
  if (groups) doc["groups"] = string_set_to_json(*groups);
  return doc;
}

Json PolicyAssertion::to_json() const {
  Json doc = signed_body();
  doc["signature"] = hex_encode(signature);
  return doc;
}

PolicyAssertion PolicyAssertion::from_json(const Json& doc) {
  field::only(doc, {"type", "serial", "vo", "issuer", "subject", "mode", "not_before", "not_after",
                    "db_revision", "rights", "groups", "signature"});
  if (field::string(doc, "type") != kAssertionType) throw Error(ErrorCode::Malformed, "not a policy assertion");
  PolicyAssertion a{field::unsigned_integer(doc, "serial"),
                    field::string(doc, "vo"),
                    Identity(field::string(doc, "issuer")),
                    Identity(field::string(doc, "subject")),
                    parse_assertion_mode(field::string(doc, "mode")),
                    std::nullopt,
                    std::nullopt,
                    Interval{from_unix(field::integer(doc, "not_before")),
                             from_unix(field::integer(doc, "not_after"))},
                    field::unsigned_integer(doc, "db_revision"),
                    field::hex(doc, "signature")};
  if (!a.validity.well_formed()) throw Error(ErrorCode::Malformed, "not_before must precede not_after");
  if (doc.contains("rights")) a.rights = RightsSet::from_json(doc["rights"]);
  if (doc.contains("groups")) a.groups = string_set_from_json(doc["groups"]);
  bool rights_mode = a.mode == AssertionMode::Rights;
  if (rights_mode != a.rights.has_value() || rights_mode == a.groups.has_value()) {
    throw Error(ErrorCode::Malformed, "assertion fields do not match its mode");
  }
  return a;
}

PolicyAssertion PolicyAssertion::parse(std::string_view canonical_text) {
  return from_json(parse_canonical(canonical_text));
}

PolicyAssertion issue_assertion(const VOPolicyDatabase& db, const KeyMaterial& cas_keys,
                                const Identity& cas_id, const Identity& subject,
                                AssertionMode mode, const std::optional<RightsSet>& requested,
                                Seconds lifetime, Timestamp now, std::uint64_t serial,
                                Seconds max_lifetime) {
  if (!db.is_member(subject)) {
    throw Error(ErrorCode::NotAMember, subject.str() + " is not a member of VO " + db.vo_name());
  }
  check_lifetime(lifetime, max_lifetime);
  PolicyAssertion a{serial, db.vo_name(), cas_id, subject, mode, std::nullopt, std::nullopt,
                    Interval{now, now + lifetime}, db.revision(), {}};
  if (mode == AssertionMode::Rights) {
    RightsSet entitled = user_rights(db, subject);
    a.rights = requested ? intersect(entitled, *requested) : entitled;
  } else {
    a.groups = db.groups_of(subject);
  }
  a.signature = cas_keys.sign(canonical(a.signed_body()));
  return a;
}

AssertionIssuer::AssertionIssuer(KeyMaterial keys, Identity cas_id, Seconds max_lifetime)
    : keys_(std::move(keys)), cas_id_(std::move(cas_id)), max_lifetime_(max_lifetime) {
  ensure_sodium();
  // Random high half keeps serials unique across server restarts.
  next_serial_ = static_cast<std::uint64_t>(randombytes_random() & 0x7fffffffu) << 32;
}

PolicyAssertion AssertionIssuer::issue(const VOPolicyDatabase& db, const Identity& subject,
                                       AssertionMode mode,
                                       const std::optional<RightsSet>& requested,
                                       Seconds lifetime, Timestamp now) {
  return issue_assertion(db, keys_, cas_id_, subject, mode, requested, lifetime, now,
                         next_serial_.fetch_add(1), max_lifetime_);
}

AssertionVerdict verify_assertion(const PolicyAssertion& a, const KeyMaterial& cas_public,
                                  const Identity& expected_issuer, Timestamp now) {
  if (!cas_public.verify(canonical(a.signed_body()), a.signature)) {
    return {false, AssertionFailure::BadSignature};
  }
  if (a.issuer != expected_issuer) return {false, AssertionFailure::WrongIssuer};
  if (now + kClockSkew < a.validity.not_before) return {false, AssertionFailure::NotYetValid};
  if (now - kClockSkew > a.validity.not_after) return {false, AssertionFailure::Expired};
  return {true, std::nullopt};
}

CredentialChain embed_in_proxy(const CredentialChain& user_chain, const PolicyAssertion& a) {
  if (a.subject != user_chain.eec.subject) {
    throw Error(ErrorCode::SubjectMismatch, "assertion subject " + a.subject.str() +
                                                " does not match chain subject " +
                                                user_chain.eec.subject.str());
  }
  auto outer = user_chain.effective_validity();
  if (!outer) throw Error(ErrorCode::ParentUnverifiable, "chain validity intervals do not overlap");
  auto validity = outer->intersect(a.validity);
  if (!validity) throw Error(ErrorCode::ValidityOutOfRange, "assertion and chain validity do not overlap");
  return issue_proxy(user_chain, *validity, std::nullopt, to_bytes(a.serialize()));
}

std::optional<PolicyAssertion> extract_from_proxy(const CredentialChain& chain) {
  for (auto it = chain.links.rbegin(); it != chain.links.rend(); ++it) {
    if (!it->extension || it->extension->empty() || it->extension->front() != '{') continue;
    try {
      return PolicyAssertion::parse(to_string(*it->extension));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedExtension, e.what());
    }
  }
  return std::nullopt;
}

CredentialChain issue_restricted_proxy(const CredentialChain& cas_chain,
                                       const VOPolicyDatabase& db, const Identity& subject,
                                       Seconds lifetime, Timestamp now,
                                       std::optional<KeyMaterial> subject_keys) {
  if (!db.is_member(subject)) {
    throw Error(ErrorCode::NotAMember, subject.str() + " is not a member of VO " + db.vo_name());
  }
  check_lifetime(lifetime, kMaxAssertionLifetime);
  auto outer = cas_chain.effective_validity();
  if (!outer) throw Error(ErrorCode::ParentUnverifiable, "CAS credential validity is empty");
  auto validity = outer->intersect(Interval{now, now + lifetime});
  if (!validity) throw Error(ErrorCode::ValidityOutOfRange, "CAS credential is not valid now");
  return issue_proxy(cas_chain, *validity, user_rights(db, subject), std::nullopt,
                     std::move(subject_keys));
}

void write_assertion_file(const std::filesystem::path& path, const PolicyAssertion& a) {
  write_file_atomic(path, frame_text("ASSERTION", a.serialize()), 0600);
}

PolicyAssertion read_assertion_file(const std::filesystem::path& path) {
  auto blocks = unframe_text("ASSERTION", read_file(path));
  if (blocks.size() != 1) {
    throw Error(ErrorCode::Malformed, "'" + path.string() + "' must hold exactly one CASLITE ASSERTION block");
  }
  return PolicyAssertion::parse(blocks.front());
}

}  // namespace caslite
