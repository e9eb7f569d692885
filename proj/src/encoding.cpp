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

#include "caslite/encoding.hpp"

#include <sodium.h>

#include <sstream>

#include "caslite/error.hpp"

namespace caslite {

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

std::string to_string(std::span<const std::uint8_t> b) {
  return std::string(b.begin(), b.end());
}

std::string hex_encode(std::span<const std::uint8_t> b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (std::uint8_t v : b) {
    out.push_back(kDigits[v >> 4]);
    out.push_back(kDigits[v & 0x0f]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

void reject_floats(const Json& doc) {
  switch (doc.type()) {
    case Json::value_t::number_float:
      throw Error(ErrorCode::Malformed, "floating point values are not canonical");
    case Json::value_t::object:
    case Json::value_t::array:
      for (const auto& v : doc) reject_floats(v);
      break;
    default:
      break;
  }
}

}  // namespace

Bytes hex_decode(std::string_view s) {
  if (s.size() % 2 != 0) throw Error(ErrorCode::Malformed, "odd-length hex string");
  Bytes out;
  out.reserve(s.size() / 2);
  for (std::size_t i = 0; i < s.size(); i += 2) {
    int hi = hex_value(s[i]);
    int lo = hex_value(s[i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::Malformed, "invalid hex digit");
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> b) {
  const auto variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_encoded_len(b.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), b.data(), b.size(), variant);
  out.resize(out.size() - 1);  // trailing NUL
  return out;
}

Bytes base64_decode(std::string_view s) {
  Bytes out(s.size() / 4 * 3 + 3);
  std::size_t len = 0;
  if (sodium_base642bin(out.data(), out.size(), s.data(), s.size(), "\r\n", &len,
                        nullptr, sodium_base64_VARIANT_ORIGINAL) != 0) {
    throw Error(ErrorCode::Malformed, "invalid base64");
  }
  out.resize(len);
  return out;
}

std::string canonical(const Json& doc) {
  reject_floats(doc);
  return doc.dump(-1, ' ', false, Json::error_handler_t::strict);
}

Json parse_canonical(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Malformed, e.what());
  }
  std::string again;
  try {
    again = canonical(doc);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Malformed, e.what());
  }
  if (again != text) throw Error(ErrorCode::Malformed, "document is not in canonical form");
  return doc;
}

std::string frame_text(std::string_view label, std::string_view payload) {
  std::string b64 = base64_encode(to_bytes(payload));
  std::ostringstream out;
  out << "-----BEGIN CASLITE " << label << "-----\n";
  for (std::size_t i = 0; i < b64.size(); i += 64) out << b64.substr(i, 64) << '\n';
  out << "-----END CASLITE " << label << "-----\n";
  return out.str();
}

std::vector<std::string> unframe_text(std::string_view label, std::string_view text) {
  const std::string begin = "-----BEGIN CASLITE " + std::string(label) + "-----";
  const std::string end = "-----END CASLITE " + std::string(label) + "-----";
  std::vector<std::string> blocks;
  std::size_t pos = 0;
  while ((pos = text.find(begin, pos)) != std::string_view::npos) {
    std::size_t body = pos + begin.size();
    std::size_t stop = text.find(end, body);
    if (stop == std::string_view::npos) {
      throw Error(ErrorCode::Malformed, "unterminated CASLITE " + std::string(label) + " block");
    }
    std::string b64;
    for (char c : text.substr(body, stop - body)) {
      if (c != '\n' && c != '\r' && c != ' ' && c != '\t') b64.push_back(c);
    }
    blocks.push_back(to_string(base64_decode(b64)));
    pos = stop + end.size();
  }
  return blocks;
}

namespace field {

const Json& require(const Json& obj, const char* key) {
  if (!obj.is_object()) throw Error(ErrorCode::Malformed, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::Malformed, std::string("missing field '") + key + "'");
  return *it;
}

std::string string(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (!v.is_string()) throw Error(ErrorCode::Malformed, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t integer(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      throw Error(ErrorCode::Malformed, std::string("field '") + key + "' out of range");
    }
    return v.get<std::int64_t>();
  }
  throw Error(ErrorCode::Malformed, std::string("field '") + key + "' must be an integer");
}

std::uint64_t unsigned_integer(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  throw Error(ErrorCode::Malformed, std::string("field '") + key + "' must be a non-negative integer");
}

bool boolean(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (!v.is_boolean()) throw Error(ErrorCode::Malformed, std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

Bytes hex(const Json& obj, const char* key) { return hex_decode(string(obj, key)); }

void only(const Json& obj, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw Error(ErrorCode::Malformed, "expected an object");
  for (const auto& [k, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || k == a;
    if (!known) throw Error(ErrorCode::Malformed, "unexpected field '" + k + "'");
  }
}

}  // namespace field

}  // namespace caslite
