// Copyright 2026 The Waveline Authors. All Rights Reserved.
//
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

#ifndef WAVELINE_CLI_H_
#define WAVELINE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace waveline::cli {

inline constexpr char kToolVersion[] = "0.1.0";
inline constexpr int kFormatVersion = 1;

// Runs one command line (without the program name). Results go to `out` or
// to the files named by flags, progress and errors to `err`. Returns 0 on
// success, 1 on usage errors, 2 on input errors, 3 on internal errors.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace waveline::cli

#endif  // WAVELINE_CLI_H_
