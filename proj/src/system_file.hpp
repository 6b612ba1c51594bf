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
#include <string_view>

#include "sieve_system.hpp"

namespace sievegap {

// Definition file, JSON with optional trailing commas and // comments:
//   {"kind": "polynomial", "binomial_coeffs": [1, 0, 2]}
//   {"kind": "polynomial", "poly": "n^2+1", "small_primes": "empty_up_to_degree"}
//   {"kind": "table", "entries": [[2, [0]], [3, [0, 1]]]}
//   {"kind": "eratosthenes"} / {"kind": "twin"}
SievingSystem parse_system_definition(std::string_view text);
SievingSystem load_system_file(const std::string& path);

// A builtin name ("eratosthenes", "twin", "poly:...", "poly-strict:...") or a file path.
SievingSystem resolve_system(const std::string& spec);

}  // namespace sievegap
