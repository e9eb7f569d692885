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

// caslite-inspect: human-readable dump of credential and assertion files.

#include <iostream>

#include "caslite/assertion.hpp"
#include "caslite/file_util.hpp"
#include "common.hpp"

using namespace caslite;

namespace {

Json interval_json(const Interval& v) {
  return Json{{"not_before", format_utc(v.not_before)}, {"not_after", format_utc(v.not_after)}};
}

Json assertion_json(const PolicyAssertion& a) {
  Json doc{{"serial", a.serial},
           {"vo", a.vo_name},
           {"issuer", a.issuer.str()},
           {"subject", a.subject.str()},
           {"mode", assertion_mode_name(a.mode)},
           {"validity", interval_json(a.validity)},
           {"db_revision", a.db_revision}};
  if (a.rights) doc["rights"] = a.rights->to_json();
  if (a.groups) doc["groups"] = string_set_to_json(*a.groups);
  return doc;
}

Json chain_json(const CredentialChain& chain) {
  Json links = Json::array();
  for (const auto& link : chain.links) {
    Json l{{"validity", interval_json(link.validity)}};
    if (link.restriction) l["restriction"] = link.restriction->to_json();
    if (link.extension) {
      try {
        l["assertion"] = assertion_json(PolicyAssertion::parse(to_string(*link.extension)));
      } catch (const Error&) {
        l["extension_bytes"] = link.extension->size();
      }
    }
    links.push_back(std::move(l));
  }
  Json doc{{"type", "chain"},
           {"subject", chain.eec.subject.str()},
           {"issuer", chain.eec.issuer.str()},
           {"eec_validity", interval_json(chain.eec.validity)},
           {"links", links},
           {"holds_private_key", chain.holder_keys().has_private()}};
  if (auto v = chain.effective_validity()) doc["validity"] = interval_json(*v);
  // Outermost assertion, decoded with the same rules enforcement uses.
  if (auto a = extract_from_proxy(chain)) doc["assertion"] = assertion_json(*a);
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Show the contents of a credential or assertion file"};
  std::string file;
  app.add_option("file", file, "chain or assertion file")->required();

  return tools::run(app, argc, argv, [&] {
    std::string text = read_file(file);
    Json doc;
    if (text.find("BEGIN CASLITE ASSERTION") != std::string::npos) {
      doc = assertion_json(read_assertion_file(file));
      doc["type"] = "assertion";
    } else {
      doc = chain_json(read_chain_file(file));
    }
    std::cout << doc.dump(2) << "\n";
    return tools::kExitOk;
  });
}
