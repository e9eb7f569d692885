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

// caslite-ca: test certificate authority for credentials.

#include <iostream>

#include "caslite/credential.hpp"
#include "common.hpp"

using namespace caslite;

int main(int argc, char** argv) {
  CLI::App app{"Minimal certificate authority"};
  app.require_subcommand(1);

  std::string name, ca_out, anchors_out;
  auto* init = app.add_subcommand("init", "create a self-signed trust anchor");
  init->add_option("--name", name, "anchor name (the identity is /CN=<name>)")->required();
  init->add_option("--out", ca_out, "CA credential file (with private key)")->required();
  init->add_option("--anchors-out", anchors_out, "trust anchor file to write alongside");

  std::string ca_path, subject, out;
  std::int64_t days = 365;
  auto* issue = app.add_subcommand("issue", "issue an end-entity credential");
  issue->add_option("--ca", ca_path, "CA credential file")->required();
  issue->add_option("--subject", subject, "subject identity, e.g. /VO=esg/CN=alice")->required();
  issue->add_option("--days", days, "validity in days");
  issue->add_option("--out", out, "credential file (with private key)")->required();

  std::string in, pub_out;
  auto* pub = app.add_subcommand("export-public", "copy a credential file without private keys");
  pub->add_option("--in", in, "credential file")->required();
  pub->add_option("--out", pub_out, "public credential file")->required();

  return tools::run(app, argc, argv, [&] {
    Timestamp now = system_now();
    if (init->parsed()) {
      EndEntityCredential ca = make_ca(name, now);
      write_chain_file(ca_out, CredentialChain{ca, {}}, true);
      if (!anchors_out.empty()) write_anchor_file(anchors_out, std::vector<EndEntityCredential>{ca});
      std::cout << ca.subject.str() << "\n";
    } else if (issue->parsed()) {
      if (days <= 0) throw tools::UsageError("--days must be positive");
      CredentialChain ca = read_chain_file(ca_path);
      if (!ca.links.empty() || !ca.eec.self_signed()) throw Error(ErrorCode::Malformed, "not a CA credential");
      Timestamp end = std::min(now + Seconds{days * 24 * 3600}, ca.eec.validity.not_after);
      EndEntityCredential eec = issue_eec(ca.eec, Identity(subject), Interval{now, end});
      write_chain_file(out, CredentialChain{eec, {}}, true);
      std::cout << eec.subject.str() << "\n";
    } else {
      write_chain_file(pub_out, read_chain_file(in), false);
    }
    return tools::kExitOk;
  });
}
