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

// caslite-proxy-init: local proxy creation from a long-term credential.

#include <iostream>

#include "caslite/credential.hpp"
#include "common.hpp"

using namespace caslite;

int main(int argc, char** argv) {
  CLI::App app{"Create a short-lived proxy credential"};
  std::string eec_path, out;
  std::int64_t hours = 12;
  app.add_option("--eec", eec_path, "end-entity credential file (with private key)")->required();
  app.add_option("--hours", hours, "proxy lifetime in hours");
  app.add_option("--out", out, "proxy chain file")->required();

  return tools::run(app, argc, argv, [&] {
    if (hours <= 0) throw tools::UsageError("--hours must be at least 1");
    CredentialChain eec = read_chain_file(eec_path);
    if (!eec.holder_keys().has_private()) {
      throw Error(ErrorCode::MissingPrivateKey, "'" + eec_path + "' holds no private key");
    }
    Timestamp now = system_now();
    CredentialChain proxy = issue_proxy(eec, Interval{now, now + Seconds{hours * 3600}});
    write_chain_file(out, proxy, true);
    std::cout << Json{{"out", out},
                      {"subject", proxy.eec.subject.str()},
                      {"not_after", format_utc(proxy.links.back().validity.not_after)}}
                     .dump()
              << "\n";
    return tools::kExitOk;
  });
}
