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

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace caslite {

std::string read_file(const std::filesystem::path& path);

// Writes `contents` to a sibling temp file, fsyncs it, then renames it over
// `path`. Readers see either the old or the new contents, never a mix.
// `before_rename` runs after the temp file is durable and before the rename;
// tests use it to simulate a crash at that point.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents,
                       unsigned mode = 0644,
                       const std::function<void()>& before_rename = {});

}  // namespace caslite
