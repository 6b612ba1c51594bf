// Copyright 2026 The sievegap Authors
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

#include <string>
#include <vector>

#include <json.hpp>

namespace sievegap {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportDigits = 12;

// Rounds every floating-point value to kReportDigits significant digits in place;
// non-finite values become null.
void quantize(nlohmann::json& j);

std::vector<std::string> command_names();

// Runs config["command"] with the parameters in config. Missing optional keys are
// filled with their defaults and the resolved config is echoed under "config".
// Throws InvalidArgument for unknown or badly typed parameters.
nlohmann::json run_command(const nlohmann::json& config);

}  // namespace sievegap
