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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace caslite {

// Every failure that crosses a module boundary carries one of these codes.
// The names double as the wire-level error codes.
enum class ErrorCode {
  Malformed,
  MalformedPattern,
  UntrustedRoot,
  BadSignature,
  Expired,
  NotYetValid,
  BrokenNesting,
  ValidityOutOfRange,
  ParentUnverifiable,
  MissingPrivateKey,
  NotAuthorized,
  UnknownSubject,
  DuplicateGroup,
  NotAMember,
  LifetimeTooLong,
  SubjectMismatch,
  MalformedExtension,
  AuthFailed,
  SourceUnavailable,
  StaleStatement,
  CacheMiss,
  StaleEntry,
  NotFound,
  Denied,
  Io,
  Internal,
};

std::string_view error_code_name(ErrorCode code);
std::optional<ErrorCode> error_code_from_name(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  // For chain verification failures, `index` names the offending element:
  // 0 is the end-entity credential, i >= 1 is the i-th delegation link.
  Error(ErrorCode code, std::size_t index, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + " at " +
                           std::to_string(index) + ": " + message),
        code_(code),
        index_(index),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
  std::string detail_;
};

}  // namespace caslite
