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

// caslite-get-cred: fetch a community credential from the CAS server.

#include <iostream>

#include "caslite/assertion.hpp"
#include "caslite/auth.hpp"
#include "common.hpp"

using namespace caslite;

int main(int argc, char** argv) {
  CLI::App app{"Obtain a CAS credential for the proxy holder"};
  std::string server, chain_path, anchors, out, mode = "assertion", assertion_mode = "rights";
  std::int64_t lifetime = kDefaultAssertionLifetime.count();
  std::vector<std::string> requested;
  app.add_option("--server", server, "HOST:PORT of the CAS server")->required();
  app.add_option("--chain", chain_path, "your proxy chain file")->required();
  app.add_option("--anchors", anchors, "trust anchors used to check the result");
  app.add_option("--mode", mode, "assertion or restricted")->check(CLI::IsMember({"assertion", "restricted"}));
  app.add_option("--assertion-mode", assertion_mode, "rights or membership")
      ->check(CLI::IsMember({"rights", "membership"}));
  app.add_option("--lifetime", lifetime, "credential lifetime in seconds");
  app.add_option("--request", requested, "narrow to this right, e.g. \"read vo://esg/data/**\"");
  app.add_option("--out", out, "output chain file")->required();

  return tools::run(app, argc, argv, [&] {
    if (lifetime <= 0) throw tools::UsageError("--lifetime must be positive");
    if (mode == "restricted" && !requested.empty()) {
      throw tools::UsageError("--request applies to assertion mode only");
    }
    CredentialChain user = read_chain_file(chain_path);
    Endpoint ep = Endpoint::parse(server);
    Timestamp now = system_now();
    CredentialChain result = user;

    if (mode == "assertion") {
      Json payload{{"mode", "assertion"}, {"assertion_mode", assertion_mode}, {"lifetime", lifetime}};
      if (!requested.empty()) {
        RightsSet r;
        for (const auto& s : requested) r.insert(Right::parse(s));
        payload["requested"] = r.to_json();
      }
      Json body = unwrap_response(call(ep, signed_request("get_credential", payload, user, now)));
      PolicyAssertion a = PolicyAssertion::from_json(field::require(body, "assertion"));
      result = embed_in_proxy(user, a);
    } else {
      KeyMaterial keys = KeyMaterial::generate();
      Json payload{{"mode", "restricted_proxy"}, {"lifetime", lifetime}, {"public_key", keys.to_json(false)}};
      Json body = unwrap_response(call(ep, signed_request("get_credential", payload, user, now)));
      result = CredentialChain::from_json(field::require(body, "chain"));
      if (result.links.empty() || !result.holder_keys().same_public(keys)) {
        throw Error(ErrorCode::Malformed, "server returned a chain for a different key");
      }
      result.links.back().subject_keys = keys;
    }

    Json summary{{"out", out}, {"subject", result.eec.subject.str()}};
    if (!anchors.empty()) {
      VerifiedChain v = verify_chain(result, read_anchor_file(anchors), now);
      summary["verified_subject"] = v.subject.str();
    }
    write_chain_file(out, result, true);
    std::cout << summary.dump() << "\n";
    return tools::kExitOk;
  });
}
