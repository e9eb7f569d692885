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

#include "caslite/error.hpp"

#include <array>
#include <utility>

namespace caslite {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 26> kNames{{
    {ErrorCode::Malformed, "Malformed"},
    {ErrorCode::MalformedPattern, "MalformedPattern"},
    {ErrorCode::UntrustedRoot, "UntrustedRoot"},
    {ErrorCode::BadSignature, "BadSignature"},
    {ErrorCode::Expired, "Expired"},
    {ErrorCode::NotYetValid, "NotYetValid"},
    {ErrorCode::BrokenNesting, "BrokenNesting"},
    {ErrorCode::ValidityOutOfRange, "ValidityOutOfRange"},
    {ErrorCode::ParentUnverifiable, "ParentUnverifiable"},
    {ErrorCode::MissingPrivateKey, "MissingPrivateKey"},
    {ErrorCode::NotAuthorized, "NotAuthorized"},
    {ErrorCode::UnknownSubject, "UnknownSubject"},
    {ErrorCode::DuplicateGroup, "DuplicateGroup"},
    {ErrorCode::NotAMember, "NotAMember"},
    {ErrorCode::LifetimeTooLong, "LifetimeTooLong"},
    {ErrorCode::SubjectMismatch, "SubjectMismatch"},
    {ErrorCode::MalformedExtension, "MalformedExtension"},
    {ErrorCode::AuthFailed, "AuthFailed"},
    {ErrorCode::SourceUnavailable, "SourceUnavailable"},
    {ErrorCode::StaleStatement, "StaleStatement"},
    {ErrorCode::CacheMiss, "CacheMiss"},
    {ErrorCode::StaleEntry, "StaleEntry"},
    {ErrorCode::NotFound, "NotFound"},
    {ErrorCode::Denied, "Denied"},
    {ErrorCode::Io, "Io"},
    {ErrorCode::Internal, "Internal"},
}};

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Internal";
}

std::optional<ErrorCode> error_code_from_name(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

}  // namespace caslite
