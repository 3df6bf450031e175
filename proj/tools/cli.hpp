// Copyright 2026 The rdl Authors
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rdl/coder.hpp"
#include "rdl/image_io.hpp"

namespace rdl::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIoOrParse = 2,
  kContract = 3,
};

// Runs one invocation. args excludes the program name. Regular output goes to
// out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Tiles the atoms of D (each reshaped to a square block and min-max
// normalized) on a ceil(sqrt(K))-column grid with 1-pixel white separators.
Image dictionary_atlas(const Dictionary& D);

}  // namespace rdl::cli
