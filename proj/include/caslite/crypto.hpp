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

#include <optional>
#include <string>

#include "caslite/encoding.hpp"

namespace caslite {

// A signing key pair. Only Ed25519 is implemented; the algorithm tag travels
// with every serialized key so verifiers never guess the scheme.
class KeyMaterial {
 public:
  static constexpr const char* kEd25519 = "ed25519";

  static KeyMaterial generate();

  KeyMaterial(std::string algorithm_id, Bytes public_part,
              std::optional<Bytes> private_part = std::nullopt);

  const std::string& algorithm_id() const { return algorithm_id_; }
  const Bytes& public_part() const { return public_part_; }
  const std::optional<Bytes>& private_part() const { return private_part_; }
  bool has_private() const { return private_part_.has_value(); }

  KeyMaterial public_only() const { return KeyMaterial(algorithm_id_, public_part_); }

  // Throws Error(MissingPrivateKey) without a private part.
  Bytes sign(std::string_view message) const;
  bool verify(std::string_view message, const Bytes& signature) const;

  // {"algorithm": ..., "public": hex} plus "private" when requested and held.
  Json to_json(bool include_private) const;
  static KeyMaterial from_json(const Json& doc);

  bool same_public(const KeyMaterial& other) const {
    return algorithm_id_ == other.algorithm_id_ && public_part_ == other.public_part_;
  }

 private:
  std::string algorithm_id_;
  Bytes public_part_;
  std::optional<Bytes> private_part_;
};

void ensure_sodium();

}  // namespace caslite
