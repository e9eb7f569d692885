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

#include <csignal>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "caslite/error.hpp"
#include "caslite/wire.hpp"

namespace caslite::tools {

// Exit codes shared by every tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses argv into `app` and runs `body`, mapping parse and usage errors to
// exit 2 and domain errors to exit 1 with "error: CODE: message" on stderr.
int run(CLI::App& app, int argc, char** argv, const std::function<int()>& body);

// Blocks SIGINT and SIGTERM in the calling thread (and threads it starts
// later) so that wait() can collect them.
class ShutdownSignals {
 public:
  ShutdownSignals();
  int wait();

 private:
  sigset_t set_;
};

// Prints "listening on HOST:PORT" and flushes, so wrappers can learn an
// ephemeral port.
void announce(const Endpoint& ep);

}  // namespace caslite::tools
