//
// Copyright 2026 The panpriv Authors
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
//

// Entry point of the panpriv command-line tool, split from main() so the
// argument handling can be driven from tests.

#ifndef PANPRIV_TOOLS_CLI_H_
#define PANPRIV_TOOLS_CLI_H_

#include <istream>
#include <ostream>

#include "absl/status/status.h"

namespace panpriv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;

// kExitIo for statuses that describe a file or device problem, kExitUsage for
// everything else.
int ExitCodeFor(const absl::Status& status);

// Runs one command. `in` backs `estimate` when no --input is given.
int RunCli(int argc, const char* const* argv, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace panpriv

#endif  // PANPRIV_TOOLS_CLI_H_
