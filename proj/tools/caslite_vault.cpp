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

// caslite-vault: CAS-enabled object store.

#include <iostream>

#include "caslite/resource_service.hpp"
#include "common.hpp"

using namespace caslite;

int main(int argc, char** argv) {
  CLI::App app{"Object store enforcing site and VO policy"};
  std::string listen, site_path, cas_key, mode = "push", pull_source, groups, anchors, chain_path;
  std::string pull_namespace = "vo://**";
  app.add_option("--listen", listen, "HOST:PORT to accept requests on")->required();
  app.add_option("--site", site_path, "site policy file")->required();
  app.add_option("--cas-key", cas_key, "CAS server public credential file")->required();
  app.add_option("--mode", mode, "push or pull")->check(CLI::IsMember({"push", "pull"}));
  app.add_option("--pull-source", pull_source, "HOST:PORT of the CAS server or a cache mirror");
  app.add_option("--groups", groups, "group rights file for membership assertions");
  app.add_option("--anchors", anchors, "trust anchors for user chains")->required();
  app.add_option("--chain", chain_path, "service credential used to query the pull source");
  app.add_option("--pull-namespace", pull_namespace, "namespace of the pulled statement");

  return tools::run(app, argc, argv, [&] {
    ResourceMode m = parse_resource_mode(mode);
    if (m == ResourceMode::Pull && pull_source.empty()) {
      throw tools::UsageError("--mode pull needs --pull-source");
    }
    tools::ShutdownSignals signals;
    CredentialChain cas = read_chain_file(cas_key);
    ResourceConfig cfg{SitePolicy::load(site_path), cas.eec.keys.public_only(), cas.eec.subject,
                       read_anchor_file(anchors), m, std::nullopt, std::nullopt,
                       ObjectPattern(pull_namespace)};
    if (!groups.empty()) cfg.group_rights = load_group_rights(groups);
    std::shared_ptr<StatementSource> source;
    if (m == ResourceMode::Pull) {
      cfg.pull_source = Endpoint::parse(pull_source);
      std::optional<CredentialChain> chain;
      if (!chain_path.empty()) chain = read_chain_file(chain_path);
      source = std::make_shared<RemoteStatementSource>(*cfg.pull_source, std::move(chain));
    }
    auto service = std::make_shared<ResourceService>(std::move(cfg), source);
    auto server = serve_frames(Endpoint::parse(listen), [service](const Json& r, Timestamp now) {
      return service->handle(r, now);
    });
    tools::announce(server->endpoint());
    signals.wait();
    server->stop();
    return tools::kExitOk;
  });
}
