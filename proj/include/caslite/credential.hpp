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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caslite/crypto.hpp"
#include "caslite/identity.hpp"
#include "caslite/rights.hpp"
#include "caslite/time.hpp"

namespace caslite {

// Long-term identity credential issued by a trust anchor. A trust anchor is
// itself an EndEntityCredential with subject == issuer.
struct EndEntityCredential {
  Identity subject;
  Identity issuer;
  KeyMaterial keys;
  Interval validity;
  Bytes signature;

  // Every field except the signature; keys contribute only their public half.
  Json signed_body() const;
  Json to_json(bool include_private) const;
  static EndEntityCredential from_json(const Json& doc);

  bool self_signed() const { return subject == issuer; }
};

// One delegation step. Signed by the key of the element before it.
struct DelegationLink {
  KeyMaterial subject_keys;
  Interval validity;
  std::optional<RightsSet> restriction;  // absent means unrestricted
  std::optional<Bytes> extension;        // opaque, non-critical
  Bytes signature;

  Json signed_body() const;
  Json to_json(bool include_private) const;
  static DelegationLink from_json(const Json& doc);
};

struct CredentialChain {
  EndEntityCredential eec;
  std::vector<DelegationLink> links;

  // Keys of the innermost element; their private half is what the holder
  // signs with.
  const KeyMaterial& holder_keys() const;
  // Intersection of every interval, or nullopt when they do not overlap.
  std::optional<Interval> effective_validity() const;

  Json to_json(bool include_private) const;
  static CredentialChain from_json(const Json& doc);
  std::string serialize(bool include_private) const { return canonical(to_json(include_private)); }
  static CredentialChain parse(std::string_view canonical_text);

  // The chain with every private key stripped, as sent to a peer.
  CredentialChain public_copy() const;
};

struct VerifiedChain {
  Identity subject;  // EEC subject: the authenticated identity
  std::optional<RightsSet> restriction;
  std::vector<Bytes> extensions;  // link order, outermost last
  Interval validity;
};

inline constexpr Seconds kDefaultCaLifetime{Seconds{10LL * 365 * 24 * 3600}};

// Self-signed trust anchor "/CN=<name>" valid for ten years from `now`.
EndEntityCredential make_ca(std::string_view name, Timestamp now);

// Throws ValidityOutOfRange when `validity` is not nested in the CA's, and
// MissingPrivateKey when the CA cannot sign.
EndEntityCredential issue_eec(const EndEntityCredential& ca, const Identity& subject,
                              const Interval& validity);

// Appends one link signed by the parent's holder key. Fresh keys are generated
// unless `subject_keys` is supplied (remote delegation, where the delegatee
// keeps its own private key).
CredentialChain issue_proxy(const CredentialChain& parent, const Interval& validity,
                            std::optional<RightsSet> restriction = std::nullopt,
                            std::optional<Bytes> extension = std::nullopt,
                            std::optional<KeyMaterial> subject_keys = std::nullopt);

// Errors: UntrustedRoot; BadSignature, Expired, NotYetValid, BrokenNesting
// with the offending element index (0 = EEC, i = i-th link).
VerifiedChain verify_chain(const CredentialChain& chain,
                           std::span<const EndEntityCredential> anchors, Timestamp now);

// Credential files: one framed chain per file ("CHAIN" label).
void write_chain_file(const std::filesystem::path& path, const CredentialChain& chain,
                      bool include_private = true);
CredentialChain read_chain_file(const std::filesystem::path& path);
// A trust-anchor file holds one or more framed zero-link chains.
std::vector<EndEntityCredential> read_anchor_file(const std::filesystem::path& path);
void write_anchor_file(const std::filesystem::path& path,
                       std::span<const EndEntityCredential> anchors);

}  // namespace caslite
