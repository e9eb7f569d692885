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

// Helpers for tests that drive the command-line tools as real processes.

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "caslite/wire.hpp"

namespace caslite::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Absolute path of a built tool such as "caslite-admin".
std::string tool(const std::string& name);

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_tool(const std::string& name, const std::vector<std::string>& args);

// A long-running tool started with --listen 127.0.0.1:0. The constructor
// waits for its "listening on" line.
class ServerProcess {
 public:
  ServerProcess(const std::string& name, const std::vector<std::string>& args,
                std::chrono::milliseconds startup = std::chrono::seconds(10));
  ~ServerProcess();
  ServerProcess(const ServerProcess&) = delete;
  ServerProcess& operator=(const ServerProcess&) = delete;

  const Endpoint& endpoint() const { return endpoint_; }
  // Sends `sig` and reaps the process; returns its exit status (or 128+sig).
  int stop(int sig = 15);
  bool running() const { return pid_ > 0; }

 private:
  pid_t pid_ = -1;
  int out_fd_ = -1;
  Endpoint endpoint_;
};

}  // namespace caslite::testing
