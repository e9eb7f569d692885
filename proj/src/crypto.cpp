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

#include "caslite/crypto.hpp"

#include <sodium.h>

#include <mutex>

#include "caslite/error.hpp"

namespace caslite {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error(ErrorCode::Internal, "libsodium initialisation failed");
  });
}

KeyMaterial KeyMaterial::generate() {
  ensure_sodium();
  Bytes pub(crypto_sign_PUBLICKEYBYTES);
  Bytes sec(crypto_sign_SECRETKEYBYTES);
  crypto_sign_keypair(pub.data(), sec.data());
  return KeyMaterial(kEd25519, std::move(pub), std::move(sec));
}

KeyMaterial::KeyMaterial(std::string algorithm_id, Bytes public_part,
                         std::optional<Bytes> private_part)
    : algorithm_id_(std::move(algorithm_id)),
      public_part_(std::move(public_part)),
      private_part_(std::move(private_part)) {
  if (algorithm_id_ != kEd25519) {
    throw Error(ErrorCode::Malformed, "unsupported key algorithm '" + algorithm_id_ + "'");
  }
  if (public_part_.size() != crypto_sign_PUBLICKEYBYTES) {
    throw Error(ErrorCode::Malformed, "bad public key length");
  }
  if (private_part_ && private_part_->size() != crypto_sign_SECRETKEYBYTES) {
    throw Error(ErrorCode::Malformed, "bad private key length");
  }
  // An Ed25519 secret key embeds its public half in the last 32 bytes.
  if (private_part_ &&
      !std::equal(public_part_.begin(), public_part_.end(),
                  private_part_->begin() + crypto_sign_SEEDBYTES)) {
    throw Error(ErrorCode::Malformed, "private key does not match public key");
  }
}

Bytes KeyMaterial::sign(std::string_view message) const {
  if (!private_part_) throw Error(ErrorCode::MissingPrivateKey, "key has no private part");
  ensure_sodium();
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr,
                       reinterpret_cast<const unsigned char*>(message.data()), message.size(),
                       private_part_->data());
  return sig;
}

bool KeyMaterial::verify(std::string_view message, const Bytes& signature) const {
  if (signature.size() != crypto_sign_BYTES) return false;
  ensure_sodium();
  return crypto_sign_verify_detached(signature.data(),
                                     reinterpret_cast<const unsigned char*>(message.data()),
                                     message.size(), public_part_.data()) == 0;
}

Json KeyMaterial::to_json(bool include_private) const {
  Json doc{{"algorithm", algorithm_id_}, {"public", hex_encode(public_part_)}};
  if (include_private && private_part_) doc["private"] = hex_encode(*private_part_);
  return doc;
}

KeyMaterial KeyMaterial::from_json(const Json& doc) {
  field::only(doc, {"algorithm", "public", "private"});
  std::optional<Bytes> priv;
  if (doc.contains("private")) priv = field::hex(doc, "private");
  return KeyMaterial(field::string(doc, "algorithm"), field::hex(doc, "public"), std::move(priv));
}

}  // namespace caslite
