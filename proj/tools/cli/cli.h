//
// Copyright 2026 The dpsynth Authors
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

#ifndef DPSYNTH_TOOLS_CLI_CLI_H_
#define DPSYNTH_TOOLS_CLI_CLI_H_

#include <iostream>

namespace dpsynth::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCapacity = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitDomainMismatch = 5;

// Parses argv and runs one subcommand: synth, evaluate, accountant,
// pretrain, best-mixture-error or gen-toy.
int RunCli(int argc, const char* const* argv, std::ostream& out = std::cout,
           std::ostream& err = std::cerr);

}  // namespace dpsynth::cli

#endif  // DPSYNTH_TOOLS_CLI_CLI_H_
