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

// caslite-cache: read-only mirror of the authority's signed statements.

#include <iostream>

#include "caslite/cache_mirror.hpp"
#include "common.hpp"

using namespace caslite;

int main(int argc, char** argv) {
  CLI::App app{"Caching mirror for signed policy statements"};
  std::string listen, authority, subscriptions, chain_path;
  std::int64_t refresh = 0, max_age = 0;
  app.add_option("--listen", listen, "HOST:PORT to accept requests on")->required();
  app.add_option("--authority", authority, "HOST:PORT of the CAS server")->required();
  app.add_option("--refresh", refresh, "refresh interval in seconds")->required();
  app.add_option("--max-age", max_age, "longest time an entry is served after its fetch")->required();
  app.add_option("--subscriptions", subscriptions, "JSON array of query payloads")->required();
  app.add_option("--chain", chain_path, "credential used to query the authority");

  return tools::run(app, argc, argv, [&] {
    if (refresh <= 0 || refresh >= max_age) {
      throw tools::UsageError("need 0 < --refresh < --max-age");
    }
    tools::ShutdownSignals signals;
    std::optional<CredentialChain> chain;
    if (!chain_path.empty()) chain = read_chain_file(chain_path);
    auto source = std::make_shared<RemoteStatementSource>(Endpoint::parse(authority), std::move(chain));
    auto mirror = std::make_shared<CacheMirror>(Seconds{refresh}, Seconds{max_age}, source);
    Timestamp now = system_now();
    for (const auto& q : load_subscriptions(subscriptions)) mirror->subscribe(q, now);
    MirrorRefresher refresher(*mirror, system_clock());
    auto server = serve_frames(Endpoint::parse(listen), [mirror](const Json& r, Timestamp t) {
      return mirror->handle(r, t);
    });
    tools::announce(server->endpoint());
    signals.wait();
    server->stop();
    return tools::kExitOk;
  });
}
