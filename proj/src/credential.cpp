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

#include "caslite/credential.hpp"

#include "caslite/error.hpp"
#include "caslite/file_util.hpp"

namespace caslite {

namespace {

constexpr const char* kEecType = "caslite.eec";
constexpr const char* kLinkType = "caslite.link";

Interval interval_from_json(const Json& doc) {
  Interval iv{from_unix(field::integer(doc, "not_before")),
              from_unix(field::integer(doc, "not_after"))};
  if (!iv.well_formed()) throw Error(ErrorCode::Malformed, "not_before must precede not_after");
  return iv;
}

void check_time(const Interval& validity, Timestamp now, std::size_t index) {
  if (validity.covers(now)) return;
  if (now + kClockSkew < validity.not_before) {
    throw Error(ErrorCode::NotYetValid, index, "valid from " + format_utc(validity.not_before));
  }
  throw Error(ErrorCode::Expired, index, "expired at " + format_utc(validity.not_after));
}

// Link signatures and nesting only; the root is not checked against anchors.
void verify_links(const CredentialChain& chain) {
  const KeyMaterial* signer = &chain.eec.keys;
  Interval outer = chain.eec.validity;
  for (std::size_t i = 0; i < chain.links.size(); ++i) {
    const auto& link = chain.links[i];
    if (!signer->verify(canonical(link.signed_body()), link.signature)) {
      throw Error(ErrorCode::BadSignature, i + 1, "link signature does not verify");
    }
    if (!outer.contains(link.validity)) {
      throw Error(ErrorCode::BrokenNesting, i + 1, "link outlives its parent");
    }
    signer = &link.subject_keys;
    outer = link.validity;
  }
}

}  // namespace

Json EndEntityCredential::signed_body() const {
  return Json{{"type", kEecType},
              {"subject", subject.str()},
              {"issuer", issuer.str()},
              {"keys", keys.to_json(false)},
              {"not_before", to_unix(validity.not_before)},
              {"not_after", to_unix(validity.not_after)}};
}

Json EndEntityCredential::to_json(bool include_private) const {
  Json doc = signed_body();
  doc.erase("type");
  doc["keys"] = keys.to_json(include_private);
  doc["signature"] = hex_encode(signature);
  return doc;
}

EndEntityCredential EndEntityCredential::from_json(const Json& doc) {
  field::only(doc, {"subject", "issuer", "keys", "not_before", "not_after", "signature"});
  return EndEntityCredential{Identity(field::string(doc, "subject")),
                             Identity(field::string(doc, "issuer")),
                             KeyMaterial::from_json(field::require(doc, "keys")),
                             interval_from_json(doc), field::hex(doc, "signature")};
}

Json DelegationLink::signed_body() const {
  Json doc{{"type", kLinkType},
           {"keys", subject_keys.to_json(false)},
           {"not_before", to_unix(validity.not_before)},
           {"not_after", to_unix(validity.not_after)}};
  if (restriction) doc["restriction"] = restriction->to_json();
  if (extension) doc["extension"] = hex_encode(*extension);
  return doc;
}

Json DelegationLink::to_json(bool include_private) const {
  Json doc = signed_body();
  doc.erase("type");
  doc["keys"] = subject_keys.to_json(include_private);
  doc["signature"] = hex_encode(signature);
  return doc;
}

DelegationLink DelegationLink::from_json(const Json& doc) {
  field::only(doc, {"keys", "not_before", "not_after", "restriction", "extension", "signature"});
  DelegationLink link{KeyMaterial::from_json(field::require(doc, "keys")), interval_from_json(doc),
                      std::nullopt, std::nullopt, field::hex(doc, "signature")};
  if (doc.contains("restriction")) link.restriction = RightsSet::from_json(doc["restriction"]);
  if (doc.contains("extension")) link.extension = field::hex(doc, "extension");
  return link;
}

const KeyMaterial& CredentialChain::holder_keys() const {
  return links.empty() ? eec.keys : links.back().subject_keys;
}

std::optional<Interval> CredentialChain::effective_validity() const {
  std::optional<Interval> out = eec.validity;
  for (const auto& link : links) {
    if (!out) break;
    out = out->intersect(link.validity);
  }
  return out;
}

Json CredentialChain::to_json(bool include_private) const {
  Json arr = Json::array();
  for (std::size_t i = 0; i < links.size(); ++i) {
    // Only the holder's private key ever travels with a chain.
    arr.push_back(links[i].to_json(include_private && i + 1 == links.size()));
  }
  return Json{{"eec", eec.to_json(include_private && links.empty())}, {"links", std::move(arr)}};
}

CredentialChain CredentialChain::from_json(const Json& doc) {
  field::only(doc, {"eec", "links"});
  CredentialChain chain{EndEntityCredential::from_json(field::require(doc, "eec")), {}};
  const Json& links = field::require(doc, "links");
  if (!links.is_array()) throw Error(ErrorCode::Malformed, "links must be an array");
  for (const auto& l : links) chain.links.push_back(DelegationLink::from_json(l));
  return chain;
}

CredentialChain CredentialChain::parse(std::string_view canonical_text) {
  return from_json(parse_canonical(canonical_text));
}

CredentialChain CredentialChain::public_copy() const {
  CredentialChain out = *this;
  out.eec.keys = out.eec.keys.public_only();
  for (auto& l : out.links) l.subject_keys = l.subject_keys.public_only();
  return out;
}

EndEntityCredential make_ca(std::string_view name, Timestamp now) {
  if (name.empty()) throw Error(ErrorCode::Malformed, "CA name must be non-empty");
  Identity id("/CN=" + std::string(name));
  EndEntityCredential ca{id, id, KeyMaterial::generate(), Interval{now, now + kDefaultCaLifetime}, {}};
  ca.signature = ca.keys.sign(canonical(ca.signed_body()));
  return ca;
}

EndEntityCredential issue_eec(const EndEntityCredential& ca, const Identity& subject,
                              const Interval& validity) {
  if (!validity.well_formed() || !ca.validity.contains(validity)) {
    throw Error(ErrorCode::ValidityOutOfRange, "requested validity is not within the CA's");
  }
  EndEntityCredential eec{subject, ca.subject, KeyMaterial::generate(), validity, {}};
  eec.signature = ca.keys.sign(canonical(eec.signed_body()));
  return eec;
}

CredentialChain issue_proxy(const CredentialChain& parent, const Interval& validity,
                            std::optional<RightsSet> restriction, std::optional<Bytes> extension,
                            std::optional<KeyMaterial> subject_keys) {
  try {
    verify_links(parent);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParentUnverifiable, e.what());
  }
  const KeyMaterial& signer = parent.holder_keys();
  if (!signer.has_private()) throw Error(ErrorCode::ParentUnverifiable, "holder private key unavailable");
  auto outer = parent.effective_validity();
  if (!outer) throw Error(ErrorCode::ParentUnverifiable, "parent validity intervals do not overlap");
  if (!validity.well_formed() || !outer->contains(validity)) {
    throw Error(ErrorCode::ValidityOutOfRange, "proxy validity must nest in the parent's");
  }
  DelegationLink link{subject_keys ? std::move(*subject_keys) : KeyMaterial::generate(), validity,
                      std::move(restriction), std::move(extension), {}};
  link.signature = signer.sign(canonical(link.signed_body()));
  CredentialChain out = parent;
  // The parent's private key stays with the parent.
  if (out.links.empty()) {
    out.eec.keys = out.eec.keys.public_only();
  } else {
    out.links.back().subject_keys = out.links.back().subject_keys.public_only();
  }
  out.links.push_back(std::move(link));
  return out;
}

VerifiedChain verify_chain(const CredentialChain& chain,
                           std::span<const EndEntityCredential> anchors, Timestamp now) {
  const std::string eec_body = canonical(chain.eec.signed_body());
  const EndEntityCredential* root = nullptr;
  bool named = false;
  for (const auto& anchor : anchors) {
    if (anchor.subject != chain.eec.issuer || !anchor.self_signed()) continue;
    named = true;
    if (anchor.keys.verify(eec_body, chain.eec.signature)) {
      root = &anchor;
      break;
    }
  }
  if (!named) throw Error(ErrorCode::UntrustedRoot, "issuer '" + chain.eec.issuer.str() + "' is not a trust anchor");
  if (!root) throw Error(ErrorCode::BadSignature, 0, "end-entity signature does not verify");
  if (!root->validity.contains(chain.eec.validity)) {
    throw Error(ErrorCode::BrokenNesting, 0, "credential outlives its CA");
  }
  check_time(root->validity, now, 0);
  check_time(chain.eec.validity, now, 0);
  verify_links(chain);

  VerifiedChain out{chain.eec.subject, std::nullopt, {}, chain.eec.validity};
  for (std::size_t i = 0; i < chain.links.size(); ++i) {
    const auto& link = chain.links[i];
    check_time(link.validity, now, i + 1);
    out.validity = link.validity;  // nesting makes the innermost interval the effective one
    if (link.restriction) {
      out.restriction = out.restriction ? intersect(*out.restriction, *link.restriction) : *link.restriction;
    }
    if (link.extension) out.extensions.push_back(*link.extension);
  }
  return out;
}

void write_chain_file(const std::filesystem::path& path, const CredentialChain& chain,
                      bool include_private) {
  write_file_atomic(path, frame_text("CHAIN", chain.serialize(include_private)), 0600);
}

CredentialChain read_chain_file(const std::filesystem::path& path) {
  auto blocks = unframe_text("CHAIN", read_file(path));
  if (blocks.size() != 1) {
    throw Error(ErrorCode::Malformed, "'" + path.string() + "' must hold exactly one CASLITE CHAIN block");
  }
  return CredentialChain::parse(blocks.front());
}

std::vector<EndEntityCredential> read_anchor_file(const std::filesystem::path& path) {
  std::vector<EndEntityCredential> out;
  for (const auto& block : unframe_text("CHAIN", read_file(path))) {
    CredentialChain c = CredentialChain::parse(block);
    if (!c.links.empty() || !c.eec.self_signed()) {
      throw Error(ErrorCode::Malformed, "trust anchors must be self-signed credentials");
    }
    out.push_back(c.eec);
  }
  if (out.empty()) throw Error(ErrorCode::Malformed, "'" + path.string() + "' holds no trust anchors");
  return out;
}

void write_anchor_file(const std::filesystem::path& path,
                       std::span<const EndEntityCredential> anchors) {
  std::string text;
  for (const auto& a : anchors) {
    text += frame_text("CHAIN", CredentialChain{a, {}}.serialize(false));
  }
  write_file_atomic(path, text, 0644);
}

}  // namespace caslite
