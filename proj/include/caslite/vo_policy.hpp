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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "caslite/identity.hpp"
#include "caslite/rights.hpp"

namespace caslite {

// Grant subject: a member identity or a group ("group:<name>" on the wire).
class SubjectRef {
 public:
  static SubjectRef member(Identity id) { return SubjectRef(id.str(), false); }
  static SubjectRef group(std::string name);
  // "group:<name>" or an identity string.
  static SubjectRef parse(const std::string& text);

  bool is_group() const { return group_; }
  // Group name or identity string.
  const std::string& name() const { return name_; }
  std::string str() const { return group_ ? "group:" + name_ : name_; }

  friend auto operator<=>(const SubjectRef& a, const SubjectRef& b) { return a.str() <=> b.str(); }
  friend bool operator==(const SubjectRef& a, const SubjectRef& b) { return a.str() == b.str(); }

 private:
  SubjectRef(std::string name, bool group) : name_(std::move(name)), group_(group) {}
  std::string name_;
  bool group_;
};

enum class AdminPower { Grant, Revoke, ManageMembership, ManageGroup };

std::string_view admin_power_name(AdminPower p);
AdminPower parse_admin_power(std::string_view name);

struct AdminCapability {
  Identity admin;
  std::set<AdminPower> powers;
  std::optional<ObjectPattern> scope;  // grant/revoke namespace
  std::set<std::string> groups;        // manage_group scope

  // Throws Error(Malformed) when the capability is internally inconsistent.
  void validate() const;
  Json to_json() const;
  static AdminCapability from_json(const Json& doc);

  friend bool operator==(const AdminCapability&, const AdminCapability&) = default;
};

namespace admin {
struct Grant { SubjectRef subject; Right right; };
struct Revoke { SubjectRef subject; Right right; };
struct AddMember { Identity who; };
struct RemoveMember { Identity who; };
struct CreateGroup { std::string group; };
struct AddToGroup { std::string group; Identity who; };
struct RemoveFromGroup { std::string group; Identity who; };
struct AddCapability { AdminCapability capability; };
}  // namespace admin

using AdminCommand = std::variant<admin::Grant, admin::Revoke, admin::AddMember, admin::RemoveMember,
                                  admin::CreateGroup, admin::AddToGroup, admin::RemoveFromGroup,
                                  admin::AddCapability>;

// {"op": "grant", "subject": ..., "right": ...} and so on.
Json admin_command_to_json(const AdminCommand& cmd);
AdminCommand admin_command_from_json(const Json& doc);

// The VO's share of the combined policy: members, groups, grants and the
// meta-policy deciding who may change them. Values are immutable snapshots;
// apply_admin returns a new database.
class VOPolicyDatabase {
 public:
  VOPolicyDatabase(std::string vo_name, Identity owner);

  const std::string& vo_name() const { return vo_name_; }
  // Bootstrap identity holding every administrative power.
  const Identity& owner() const { return owner_; }
  const std::set<Identity>& members() const { return members_; }
  const std::map<std::string, std::set<Identity>>& groups() const { return groups_; }
  const std::map<SubjectRef, RightsSet>& grants() const { return grants_; }
  const std::vector<AdminCapability>& admin_caps() const { return admin_caps_; }
  std::uint64_t revision() const { return revision_; }

  bool is_member(const Identity& who) const { return members_.count(who) > 0; }
  std::set<std::string> groups_of(const Identity& who) const;

  // Top-level keys: vo_name, owner, members, groups, grants, admin_caps,
  // revision. Loading rejects documents violating the type invariants.
  Json to_json() const;
  static VOPolicyDatabase from_json(const Json& doc);

  friend VOPolicyDatabase apply_admin(const VOPolicyDatabase& db, const Identity& admin,
                                      const AdminCommand& cmd);

 private:
  void validate() const;

  std::string vo_name_;
  Identity owner_;
  std::set<Identity> members_;
  std::map<std::string, std::set<Identity>> groups_;
  std::map<SubjectRef, RightsSet> grants_;
  std::vector<AdminCapability> admin_caps_;
  std::uint64_t revision_ = 0;
};

// Direct grants plus the grants of every group containing `who`. Non-members
// get the empty set.
RightsSet user_rights(const VOPolicyDatabase& db, const Identity& who);

// Applies `cmd` on behalf of `admin`, returning the next revision. Errors:
// NotAuthorized when no capability covers the command (checked first),
// UnknownSubject, DuplicateGroup, Malformed. `db` is never modified.
VOPolicyDatabase apply_admin(const VOPolicyDatabase& db, const Identity& admin,
                             const AdminCommand& cmd);

}  // namespace caslite
