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

#pragma once

#include <span>
#include <string_view>

#include "caslite/credential.hpp"
#include "caslite/wire.hpp"

namespace caslite {

// An authenticated request carries the caller's public chain plus a proof
// that the caller holds the chain's innermost private key:
//   "proof": {"at": <unix seconds>, "signature": hex}
// The signature covers canonical({"at", "kind", "payload", "type"}) with
// type "caslite.request". Proofs older or newer than the clock skew are
// refused, which bounds replay of a captured request.
Json signed_request(std::string_view kind, Json payload, const CredentialChain& chain,
                    Timestamp now);

struct AuthenticatedCaller {
  CredentialChain chain;  // public copy as received
  VerifiedChain verified;
};

// Errors: AuthFailed (missing or bad chain, proof or signature). The
// underlying verification failure is kept in the message.
AuthenticatedCaller authenticate_request(const Json& request,
                                         std::span<const EndEntityCredential> anchors,
                                         Timestamp now);

}  // namespace caslite
