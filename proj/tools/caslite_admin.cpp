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

// caslite-admin: VO administration against the CAS server.

#include <iostream>

#include "caslite/auth.hpp"
#include "caslite/vo_policy.hpp"
#include "common.hpp"

using namespace caslite;

int main(int argc, char** argv) {
  CLI::App app{"Administer the VO policy database"};
  std::string server, chain_path;
  app.add_option("--server", server, "HOST:PORT of the CAS server")->required();
  app.add_option("--chain", chain_path, "administrator proxy chain file")->required();
  app.require_subcommand(1);

  std::string subject, action, pattern, who, group, scope;
  std::vector<std::string> powers, groups;
  auto* grant = app.add_subcommand("grant", "grant a right to a member or group:<name>");
  auto* revoke = app.add_subcommand("revoke", "revoke a right from a member or group:<name>");
  for (auto* sub : {grant, revoke}) {
    sub->add_option("subject", subject, "identity or group:<name>")->required();
    sub->add_option("action", action, "read, write, list, delete or create")->required();
    sub->add_option("pattern", pattern, "object pattern, e.g. vo://esg/data/**")->required();
  }
  auto* add_member = app.add_subcommand("add-member", "add a VO member");
  auto* remove_member = app.add_subcommand("remove-member", "remove a VO member");
  for (auto* sub : {add_member, remove_member}) sub->add_option("who", who, "member identity")->required();
  auto* create_group = app.add_subcommand("create-group", "create an empty group");
  create_group->add_option("group", group, "group name")->required();
  auto* add_to = app.add_subcommand("add-to-group", "add a member to a group");
  auto* remove_from = app.add_subcommand("remove-from-group", "remove a member from a group");
  for (auto* sub : {add_to, remove_from}) {
    sub->add_option("group", group, "group name")->required();
    sub->add_option("who", who, "member identity")->required();
  }
  auto* add_cap = app.add_subcommand("add-capability", "delegate administrative powers");
  add_cap->add_option("admin", who, "identity receiving the powers")->required();
  add_cap->add_option("--power", powers, "grant, revoke, manage_membership or manage_group")->required();
  add_cap->add_option("--scope", scope, "namespace for grant and revoke");
  add_cap->add_option("--group", groups, "group the manage_group power applies to");

  return tools::run(app, argc, argv, [&] {
    AdminCommand cmd = [&]() -> AdminCommand {
      if (grant->parsed() || revoke->parsed()) {
        Right r{parse_action(action), ObjectPattern(pattern)};
        if (grant->parsed()) return admin::Grant{SubjectRef::parse(subject), r};
        return admin::Revoke{SubjectRef::parse(subject), r};
      }
      if (add_member->parsed()) return admin::AddMember{Identity(who)};
      if (remove_member->parsed()) return admin::RemoveMember{Identity(who)};
      if (create_group->parsed()) return admin::CreateGroup{group};
      if (add_to->parsed()) return admin::AddToGroup{group, Identity(who)};
      if (remove_from->parsed()) return admin::RemoveFromGroup{group, Identity(who)};
      AdminCapability cap{Identity(who), {}, std::nullopt, {groups.begin(), groups.end()}};
      for (const auto& p : powers) cap.powers.insert(parse_admin_power(p));
      if (!scope.empty()) cap.scope = ObjectPattern(scope);
      cap.validate();
      return admin::AddCapability{cap};
    }();
    CredentialChain chain = read_chain_file(chain_path);
    Json body = unwrap_response(call(Endpoint::parse(server),
                                     signed_request("admin", admin_command_to_json(cmd), chain, system_now())));
    std::cout << "revision " << field::unsigned_integer(body, "revision") << "\n";
    return tools::kExitOk;
  });
}
