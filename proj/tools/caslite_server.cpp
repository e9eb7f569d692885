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

// caslite-server: the VO authority.

#include <iostream>

#include "caslite/cas_server.hpp"
#include "common.hpp"

using namespace caslite;

int main(int argc, char** argv) {
  CLI::App app{"Community authorization server for one VO"};
  std::string listen, db_path, key_path, anchors_path, audit_path, vo_name, owner;
  std::int64_t max_lifetime = kMaxAssertionLifetime.count();
  std::int64_t statement_lifetime = kDefaultStatementLifetime.count();
  app.add_option("--listen", listen, "HOST:PORT to accept requests on")->required();
  app.add_option("--db", db_path, "policy database file")->required();
  app.add_option("--key", key_path, "server credential file (with private key)")->required();
  app.add_option("--anchors", anchors_path, "trust anchors for caller chains")->required();
  app.add_option("--max-lifetime", max_lifetime, "longest credential lifetime in seconds");
  app.add_option("--statement-lifetime", statement_lifetime, "lifetime of signed query statements in seconds");
  app.add_option("--audit", audit_path, "audit log (default: <db>.audit)");
  app.add_option("--vo", vo_name, "VO name, used only when creating a missing database");
  app.add_option("--owner", owner, "owner identity, used only when creating a missing database");

  return tools::run(app, argc, argv, [&] {
    if (max_lifetime <= 0 || statement_lifetime <= 0) {
      throw tools::UsageError("lifetimes must be positive");
    }
    tools::ShutdownSignals signals;
    PolicyStore store(db_path);
    VOPolicyDatabase db = load_or_bootstrap(
        store, vo_name.empty() ? std::nullopt : std::optional<std::string>(vo_name),
        owner.empty() ? std::nullopt : std::optional<Identity>(Identity(owner)));
    CasConfig cfg{read_chain_file(key_path), read_anchor_file(anchors_path), Seconds{max_lifetime},
                  Seconds{statement_lifetime}};
    auto audit = std::make_shared<AuditLog>(audit_path.empty() ? db_path + ".audit" : audit_path);
    auto service = std::make_shared<CasService>(std::move(cfg), std::move(db), store, audit);
    auto server = serve_frames(Endpoint::parse(listen), [service](const Json& r, Timestamp now) {
      return service->handle(r, now);
    });
    tools::announce(server->endpoint());
    signals.wait();
    server->stop();
    return tools::kExitOk;
  });
}
