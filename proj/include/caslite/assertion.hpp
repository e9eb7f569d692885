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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include "caslite/credential.hpp"
#include "caslite/vo_policy.hpp"

namespace caslite {

enum class AssertionMode { Rights, Membership };

std::string_view assertion_mode_name(AssertionMode m);
AssertionMode parse_assertion_mode(std::string_view name);

inline constexpr Seconds kDefaultAssertionLifetime{3600};
inline constexpr Seconds kMaxAssertionLifetime{24 * 3600};

// A signed statement of a subject's rights (rights mode) or group
// memberships (membership mode) within one VO.
struct PolicyAssertion {
  std::uint64_t serial = 0;
  std::string vo_name;
  Identity issuer;
  Identity subject;
  AssertionMode mode = AssertionMode::Rights;
  std::optional<RightsSet> rights;              // rights mode only
  std::optional<std::set<std::string>> groups;  // membership mode only
  Interval validity;
  std::uint64_t db_revision = 0;
  Bytes signature;

  Json signed_body() const;
  Json to_json() const;
  // Enforces the mode/field and interval invariants.
  static PolicyAssertion from_json(const Json& doc);
  std::string serialize() const { return canonical(to_json()); }
  static PolicyAssertion parse(std::string_view canonical_text);

  friend bool operator==(const PolicyAssertion&, const PolicyAssertion&) = default;
};

enum class AssertionFailure { BadSignature, Expired, NotYetValid, WrongIssuer };

std::string_view assertion_failure_name(AssertionFailure f);

struct AssertionVerdict {
  bool ok = false;
  std::optional<AssertionFailure> failure;
};

// Rights mode: user_rights(db, subject), narrowed to `requested` when given.
// Membership mode: every group containing the subject.
// Errors: NotAMember, LifetimeTooLong (lifetime must be in (0, max_lifetime]).
PolicyAssertion issue_assertion(const VOPolicyDatabase& db, const KeyMaterial& cas_keys,
                                const Identity& cas_id, const Identity& subject,
                                AssertionMode mode, const std::optional<RightsSet>& requested,
                                Seconds lifetime, Timestamp now, std::uint64_t serial,
                                Seconds max_lifetime = kMaxAssertionLifetime);

// Holds the CAS signing key and hands out unique serial numbers.
class AssertionIssuer {
 public:
  AssertionIssuer(KeyMaterial keys, Identity cas_id, Seconds max_lifetime = kMaxAssertionLifetime);

  PolicyAssertion issue(const VOPolicyDatabase& db, const Identity& subject, AssertionMode mode,
                        const std::optional<RightsSet>& requested, Seconds lifetime,
                        Timestamp now);

  const Identity& identity() const { return cas_id_; }
  const KeyMaterial& keys() const { return keys_; }
  Seconds max_lifetime() const { return max_lifetime_; }

 private:
  KeyMaterial keys_;
  Identity cas_id_;
  Seconds max_lifetime_;
  std::atomic<std::uint64_t> next_serial_;
};

// ok iff the signature verifies under `cas_public`, the issuer matches and
// `now` lies inside the validity interval widened by the clock skew.
AssertionVerdict verify_assertion(const PolicyAssertion& a, const KeyMaterial& cas_public,
                                  const Identity& expected_issuer, Timestamp now);

// Appends a link carrying the assertion as its extension. The link's validity
// is the assertion's interval clipped to the chain's.
// Errors: SubjectMismatch, ParentUnverifiable, ValidityOutOfRange.
CredentialChain embed_in_proxy(const CredentialChain& user_chain, const PolicyAssertion& a);

// Extensions beginning with '{' are taken to be assertions; the outermost one
// is decoded. Throws MalformedExtension when such an extension does not
// decode as a valid assertion.
std::optional<PolicyAssertion> extract_from_proxy(const CredentialChain& chain);

// First-prototype credential: a proxy rooted in the CAS server's own
// credential, restricted to the subject's VO rights. The verified subject of
// the result is the CAS identity, not the user.
CredentialChain issue_restricted_proxy(const CredentialChain& cas_chain,
                                       const VOPolicyDatabase& db, const Identity& subject,
                                       Seconds lifetime, Timestamp now,
                                       std::optional<KeyMaterial> subject_keys = std::nullopt);

void write_assertion_file(const std::filesystem::path& path, const PolicyAssertion& a);
PolicyAssertion read_assertion_file(const std::filesystem::path& path);

}  // namespace caslite
