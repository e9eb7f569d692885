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

#include "caslite/vo_policy.hpp"

#include <algorithm>
#include <array>

#include "caslite/error.hpp"

namespace caslite {

namespace {

constexpr std::array<std::string_view, 4> kPowerNames{"grant", "revoke", "manage_membership",
                                                      "manage_group"};

bool valid_group_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '_' || c == '.';
  });
}

std::set<Identity> identity_set_from_json(const Json& doc) {
  std::set<Identity> out;
  for (const auto& s : string_set_from_json(doc)) out.insert(Identity(s));
  return out;
}

Json identity_set_to_json(const std::set<Identity>& ids) {
  Json arr = Json::array();
  for (const auto& id : ids) arr.push_back(id.str());
  return arr;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool has_power(const AdminCapability& cap, AdminPower p) { return cap.powers.count(p) > 0; }

bool scope_covers(const AdminCapability& cap, AdminPower p, const Right& r) {
  return has_power(cap, p) && cap.scope && cap.scope->covers(r.object);
}

// Describes the capability the command needs, for NotAuthorized messages.
std::string needed_capability(const AdminCommand& cmd) {
  return std::visit(
      overloaded{
          [](const admin::Grant& c) { return "grant over " + c.right.object.str(); },
          [](const admin::Revoke& c) { return "revoke over " + c.right.object.str(); },
          [](const admin::AddMember&) { return std::string("manage_membership"); },
          [](const admin::RemoveMember&) { return std::string("manage_membership"); },
          [](const admin::CreateGroup& c) { return "manage_group on " + c.group; },
          [](const admin::AddToGroup& c) { return "manage_group on " + c.group; },
          [](const admin::RemoveFromGroup& c) { return "manage_group on " + c.group; },
          [](const admin::AddCapability&) { return std::string("owner (add_capability)"); },
      },
      cmd);
}

bool covered(const VOPolicyDatabase& db, const Identity& who, const AdminCommand& cmd) {
  if (who == db.owner()) return true;
  for (const auto& cap : db.admin_caps()) {
    if (cap.admin != who) continue;
    bool ok = std::visit(
        overloaded{
            [&](const admin::Grant& c) { return scope_covers(cap, AdminPower::Grant, c.right); },
            [&](const admin::Revoke& c) { return scope_covers(cap, AdminPower::Revoke, c.right); },
            [&](const admin::AddMember&) { return has_power(cap, AdminPower::ManageMembership); },
            [&](const admin::RemoveMember&) { return has_power(cap, AdminPower::ManageMembership); },
            [&](const admin::CreateGroup& c) {
              return has_power(cap, AdminPower::ManageGroup) && cap.groups.count(c.group) > 0;
            },
            [&](const admin::AddToGroup& c) {
              return has_power(cap, AdminPower::ManageGroup) && cap.groups.count(c.group) > 0;
            },
            [&](const admin::RemoveFromGroup& c) {
              return has_power(cap, AdminPower::ManageGroup) && cap.groups.count(c.group) > 0;
            },
            // Extending the meta-policy is reserved to the owner.
            [&](const admin::AddCapability&) { return false; },
        },
        cmd);
    if (ok) return true;
  }
  return false;
}

}  // namespace

SubjectRef SubjectRef::group(std::string name) {
  if (!valid_group_name(name)) throw Error(ErrorCode::Malformed, "invalid group name '" + name + "'");
  return SubjectRef(std::move(name), true);
}

SubjectRef SubjectRef::parse(const std::string& text) {
  if (text.rfind("group:", 0) == 0) return group(text.substr(6));
  return member(Identity(text));
}

std::string_view admin_power_name(AdminPower p) { return kPowerNames[static_cast<std::size_t>(p)]; }

AdminPower parse_admin_power(std::string_view name) {
  for (std::size_t i = 0; i < kPowerNames.size(); ++i) {
    if (kPowerNames[i] == name) return static_cast<AdminPower>(i);
  }
  throw Error(ErrorCode::Malformed, "unknown admin power '" + std::string(name) + "'");
}

void AdminCapability::validate() const {
  if (powers.empty()) throw Error(ErrorCode::Malformed, "capability grants no powers");
  if ((powers.count(AdminPower::Grant) || powers.count(AdminPower::Revoke)) && !scope) {
    throw Error(ErrorCode::Malformed, "grant/revoke powers require a namespace");
  }
  if (powers.count(AdminPower::ManageGroup) && groups.empty()) {
    throw Error(ErrorCode::Malformed, "manage_group requires a non-empty group set");
  }
  for (const auto& g : groups) {
    if (!valid_group_name(g)) throw Error(ErrorCode::Malformed, "invalid group name '" + g + "'");
  }
}

Json AdminCapability::to_json() const {
  std::set<std::string> names;
  for (auto p : powers) names.insert(std::string(admin_power_name(p)));
  Json doc{{"admin", admin.str()}, {"powers", string_set_to_json(names)},
           {"groups", string_set_to_json(groups)}};
  if (scope) doc["namespace"] = scope->str();
  return doc;
}

AdminCapability AdminCapability::from_json(const Json& doc) {
  field::only(doc, {"admin", "powers", "groups", "namespace"});
  AdminCapability cap{Identity(field::string(doc, "admin")), {}, std::nullopt, {}};
  for (const auto& p : string_set_from_json(field::require(doc, "powers"))) {
    cap.powers.insert(parse_admin_power(p));
  }
  if (doc.contains("namespace")) cap.scope = ObjectPattern(field::string(doc, "namespace"));
  if (doc.contains("groups")) cap.groups = string_set_from_json(doc["groups"]);
  cap.validate();
  return cap;
}

Json admin_command_to_json(const AdminCommand& cmd) {
  return std::visit(
      overloaded{
          [](const admin::Grant& c) {
            return Json{{"op", "grant"}, {"subject", c.subject.str()}, {"right", c.right.str()}};
          },
          [](const admin::Revoke& c) {
            return Json{{"op", "revoke"}, {"subject", c.subject.str()}, {"right", c.right.str()}};
          },
          [](const admin::AddMember& c) { return Json{{"op", "add_member"}, {"who", c.who.str()}}; },
          [](const admin::RemoveMember& c) {
            return Json{{"op", "remove_member"}, {"who", c.who.str()}};
          },
          [](const admin::CreateGroup& c) { return Json{{"op", "create_group"}, {"group", c.group}}; },
          [](const admin::AddToGroup& c) {
            return Json{{"op", "add_to_group"}, {"group", c.group}, {"who", c.who.str()}};
          },
          [](const admin::RemoveFromGroup& c) {
            return Json{{"op", "remove_from_group"}, {"group", c.group}, {"who", c.who.str()}};
          },
          [](const admin::AddCapability& c) {
            return Json{{"op", "add_capability"}, {"capability", c.capability.to_json()}};
          },
      },
      cmd);
}

AdminCommand admin_command_from_json(const Json& doc) {
  const std::string op = field::string(doc, "op");
  auto right = [&] { return Right::parse(field::string(doc, "right")); };
  auto subject = [&] { return SubjectRef::parse(field::string(doc, "subject")); };
  auto who = [&] { return Identity(field::string(doc, "who")); };
  auto group = [&] {
    std::string g = field::string(doc, "group");
    if (!valid_group_name(g)) throw Error(ErrorCode::Malformed, "invalid group name '" + g + "'");
    return g;
  };
  if (op == "grant") {
    field::only(doc, {"op", "subject", "right"});
    return admin::Grant{subject(), right()};
  }
  if (op == "revoke") {
    field::only(doc, {"op", "subject", "right"});
    return admin::Revoke{subject(), right()};
  }
  if (op == "add_member") {
    field::only(doc, {"op", "who"});
    return admin::AddMember{who()};
  }
  if (op == "remove_member") {
    field::only(doc, {"op", "who"});
    return admin::RemoveMember{who()};
  }
  if (op == "create_group") {
    field::only(doc, {"op", "group"});
    return admin::CreateGroup{group()};
  }
  if (op == "add_to_group") {
    field::only(doc, {"op", "group", "who"});
    return admin::AddToGroup{group(), who()};
  }
  if (op == "remove_from_group") {
    field::only(doc, {"op", "group", "who"});
    return admin::RemoveFromGroup{group(), who()};
  }
  if (op == "add_capability") {
    field::only(doc, {"op", "capability"});
    return admin::AddCapability{AdminCapability::from_json(field::require(doc, "capability"))};
  }
  throw Error(ErrorCode::Malformed, "unknown admin op '" + op + "'");
}

VOPolicyDatabase::VOPolicyDatabase(std::string vo_name, Identity owner)
    : vo_name_(std::move(vo_name)), owner_(std::move(owner)) {
  if (!valid_group_name(vo_name_)) throw Error(ErrorCode::Malformed, "invalid VO name '" + vo_name_ + "'");
}

std::set<std::string> VOPolicyDatabase::groups_of(const Identity& who) const {
  std::set<std::string> out;
  for (const auto& [name, members] : groups_) {
    if (members.count(who)) out.insert(name);
  }
  return out;
}

void VOPolicyDatabase::validate() const {
  for (const auto& [name, members] : groups_) {
    if (!valid_group_name(name)) throw Error(ErrorCode::Malformed, "invalid group name '" + name + "'");
    for (const auto& m : members) {
      if (!is_member(m)) {
        throw Error(ErrorCode::Malformed, "group '" + name + "' lists non-member " + m.str());
      }
    }
  }
  for (const auto& [subject, rights] : grants_) {
    bool known = subject.is_group() ? groups_.count(subject.name()) > 0 : is_member(Identity(subject.name()));
    if (!known) throw Error(ErrorCode::Malformed, "grant to unknown subject " + subject.str());
    if (rights.empty()) throw Error(ErrorCode::Malformed, "empty grant for " + subject.str());
  }
  for (const auto& cap : admin_caps_) cap.validate();
}

Json VOPolicyDatabase::to_json() const {
  Json groups = Json::object();
  for (const auto& [name, members] : groups_) groups[name] = identity_set_to_json(members);
  Json grants = Json::object();
  for (const auto& [subject, rights] : grants_) grants[subject.str()] = rights.to_json();
  Json caps = Json::array();
  for (const auto& cap : admin_caps_) caps.push_back(cap.to_json());
  return Json{{"vo_name", vo_name_},
              {"owner", owner_.str()},
              {"members", identity_set_to_json(members_)},
              {"groups", std::move(groups)},
              {"grants", std::move(grants)},
              {"admin_caps", std::move(caps)},
              {"revision", revision_}};
}

VOPolicyDatabase VOPolicyDatabase::from_json(const Json& doc) {
  field::only(doc, {"vo_name", "owner", "members", "groups", "grants", "admin_caps", "revision"});
  VOPolicyDatabase db(field::string(doc, "vo_name"), Identity(field::string(doc, "owner")));
  db.members_ = identity_set_from_json(field::require(doc, "members"));
  const Json& groups = field::require(doc, "groups");
  if (!groups.is_object()) throw Error(ErrorCode::Malformed, "groups must be an object");
  for (const auto& [name, members] : groups.items()) {
    db.groups_.emplace(name, identity_set_from_json(members));
  }
  const Json& grants = field::require(doc, "grants");
  if (!grants.is_object()) throw Error(ErrorCode::Malformed, "grants must be an object");
  for (const auto& [subject, rights] : grants.items()) {
    db.grants_.emplace(SubjectRef::parse(subject), RightsSet::from_json(rights));
  }
  const Json& caps = field::require(doc, "admin_caps");
  if (!caps.is_array()) throw Error(ErrorCode::Malformed, "admin_caps must be an array");
  for (const auto& c : caps) db.admin_caps_.push_back(AdminCapability::from_json(c));
  db.revision_ = field::unsigned_integer(doc, "revision");
  db.validate();
  return db;
}

RightsSet user_rights(const VOPolicyDatabase& db, const Identity& who) {
  RightsSet out;
  if (!db.is_member(who)) return out;
  auto direct = db.grants().find(SubjectRef::member(who));
  if (direct != db.grants().end()) out = direct->second;
  for (const auto& g : db.groups_of(who)) {
    auto it = db.grants().find(SubjectRef::group(g));
    if (it != db.grants().end()) out = unite(out, it->second);
  }
  return out;
}

VOPolicyDatabase apply_admin(const VOPolicyDatabase& db, const Identity& who,
                             const AdminCommand& cmd) {
  if (!covered(db, who, cmd)) {
    throw Error(ErrorCode::NotAuthorized, who.str() + " lacks capability: " + needed_capability(cmd));
  }
  VOPolicyDatabase next = db;
  auto require_subject = [&](const SubjectRef& s) {
    bool known = s.is_group() ? next.groups_.count(s.name()) > 0 : next.is_member(Identity(s.name()));
    if (!known) throw Error(ErrorCode::UnknownSubject, s.str() + " is neither a member nor a group");
  };
  auto require_group = [&](const std::string& g) -> std::set<Identity>& {
    auto it = next.groups_.find(g);
    if (it == next.groups_.end()) throw Error(ErrorCode::UnknownSubject, "no group '" + g + "'");
    return it->second;
  };
  auto require_member = [&](const Identity& id) {
    if (!next.is_member(id)) throw Error(ErrorCode::UnknownSubject, id.str() + " is not a member");
  };

  std::visit(overloaded{
                 [&](const admin::Grant& c) {
                   require_subject(c.subject);
                   next.grants_[c.subject].insert(c.right);
                 },
                 [&](const admin::Revoke& c) {
                   require_subject(c.subject);
                   auto it = next.grants_.find(c.subject);
                   if (it != next.grants_.end()) {
                     it->second.erase(c.right);
                     if (it->second.empty()) next.grants_.erase(it);
                   }
                 },
                 [&](const admin::AddMember& c) { next.members_.insert(c.who); },
                 [&](const admin::RemoveMember& c) {
                   require_member(c.who);
                   next.members_.erase(c.who);
                   for (auto& [_, members] : next.groups_) members.erase(c.who);
                   next.grants_.erase(SubjectRef::member(c.who));
                 },
                 [&](const admin::CreateGroup& c) {
                   if (next.groups_.count(c.group)) {
                     throw Error(ErrorCode::DuplicateGroup, "group '" + c.group + "' exists");
                   }
                   next.groups_.emplace(c.group, std::set<Identity>{});
                 },
                 [&](const admin::AddToGroup& c) {
                   auto& members = require_group(c.group);
                   require_member(c.who);
                   members.insert(c.who);
                 },
                 [&](const admin::RemoveFromGroup& c) {
                   auto& members = require_group(c.group);
                   if (!members.erase(c.who)) {
                     throw Error(ErrorCode::UnknownSubject, c.who.str() + " is not in '" + c.group + "'");
                   }
                 },
                 [&](const admin::AddCapability& c) {
                   c.capability.validate();
                   next.admin_caps_.push_back(c.capability);
                 },
             },
             cmd);
  ++next.revision_;
  return next;
}

}  // namespace caslite
