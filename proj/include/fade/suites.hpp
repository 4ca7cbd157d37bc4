// Copyright 2026 The fade-upsampling Authors. All Rights Reserved.
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

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fade {

struct SuiteResult {
  std::string name;
  bool passed = true;
  /// Human-readable report, one line per check.
  std::vector<std::string> lines;
};

/// Names accepted by run_suite: equivalence, gradcheck, identities, cost.
std::span<const std::string_view> suite_names();

/// Runs a named property suite. `seeds` = 0 selects the suite default
/// (equivalence 100, gradcheck 5, identities 10; cost ignores it).
/// Throws ConfigError for unknown names.
SuiteResult run_suite(std::string_view name, int seeds = 0);

}  // namespace fade
