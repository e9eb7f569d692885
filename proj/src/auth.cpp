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

#include "caslite/auth.hpp"

namespace caslite {

namespace {

std::string proof_message(std::string_view kind, const Json& payload, std::int64_t at) {
  return canonical(Json{{"at", at}, {"kind", kind}, {"payload", payload}, {"type", "caslite.request"}});
}

}  // namespace

Json signed_request(std::string_view kind, Json payload, const CredentialChain& chain,
                    Timestamp now) {
  std::int64_t at = to_unix(now);
  Bytes sig = chain.holder_keys().sign(proof_message(kind, payload, at));
  Json chain_doc = chain.public_copy().to_json(false);
  Json req = make_request(kind, std::move(payload), &chain_doc);
  req["proof"] = Json{{"at", at}, {"signature", hex_encode(sig)}};
  return req;
}

AuthenticatedCaller authenticate_request(const Json& request,
                                         std::span<const EndEntityCredential> anchors,
                                         Timestamp now) {
  try {
    if (!request.is_object() || !request.contains("chain")) {
      throw Error(ErrorCode::AuthFailed, "request carries no credential chain");
    }
    CredentialChain chain = CredentialChain::from_json(request.at("chain"));
    VerifiedChain verified = verify_chain(chain, anchors, now);
    AuthenticatedCaller caller{std::move(chain), std::move(verified)};

    const Json& proof = field::require(request, "proof");
    field::only(proof, {"at", "signature"});
    std::int64_t at = field::integer(proof, "at");
    Timestamp when = from_unix(at);
    if (when > now + kClockSkew || when < now - kClockSkew) {
      throw Error(ErrorCode::AuthFailed, "request proof is outside the clock skew window");
    }
    std::string message =
        proof_message(field::string(request, "kind"), field::require(request, "payload"), at);
    if (!caller.chain.holder_keys().verify(message, field::hex(proof, "signature"))) {
      throw Error(ErrorCode::AuthFailed, "request proof does not verify under the holder key");
    }
    return caller;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AuthFailed) throw;
    throw Error(ErrorCode::AuthFailed, e.what());
  }
}

}  // namespace caslite
