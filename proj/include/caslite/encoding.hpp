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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace caslite {

using Bytes = std::vector<std::uint8_t>;
using Json = nlohmann::json;

Bytes to_bytes(std::string_view s);
std::string to_string(std::span<const std::uint8_t> b);

// Lowercase base16. Decoding rejects uppercase digits and odd lengths so that
// every byte string has exactly one textual form.
std::string hex_encode(std::span<const std::uint8_t> b);
Bytes hex_decode(std::string_view s);

std::string base64_encode(std::span<const std::uint8_t> b);
Bytes base64_decode(std::string_view s);

// Canonical form: UTF-8 JSON, object keys sorted byte-wise, no whitespace,
// integers in minimal decimal form. This is the input to every signature.
// Floating point values are rejected.
std::string canonical(const Json& doc);

// Parses `text` and requires it to already be in canonical form, so two
// distinct byte strings never decode to the same document.
Json parse_canonical(std::string_view text);

// Text framing used for credential and assertion files:
//   -----BEGIN CASLITE <LABEL>-----
//   base64 lines (64 columns)
//   -----END CASLITE <LABEL>-----
std::string frame_text(std::string_view label, std::string_view payload);
// Returns the payload of every block with the given label, in file order.
std::vector<std::string> unframe_text(std::string_view label, std::string_view text);

// Strict field accessors; each throws Error(Malformed) naming the field.
namespace field {
const Json& require(const Json& obj, const char* key);
std::string string(const Json& obj, const char* key);
std::int64_t integer(const Json& obj, const char* key);
std::uint64_t unsigned_integer(const Json& obj, const char* key);
bool boolean(const Json& obj, const char* key);
Bytes hex(const Json& obj, const char* key);
// Rejects keys outside `allowed`.
void only(const Json& obj, std::initializer_list<const char*> allowed);
}  // namespace field

}  // namespace caslite
