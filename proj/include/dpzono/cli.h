// Copyright 2026 The dpzono Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPZONO_CLI_H_
#define DPZONO_CLI_H_

#include <ostream>

namespace dpzono {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 2,
  kExitIoFailure = 3,
};

// Entry point of the `dpzono` tool. Subcommands: noise-optimize,
// noise-delta, laplace-range, simulate, sweep. Results go to `out`,
// diagnostics to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace dpzono

#endif  // DPZONO_CLI_H_
