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

#include <gmpxx.h>

namespace sievegap {

// g(delta) = (4+delta) 10^{2 delta} / log(1/(2 delta)), increasing on (0, 1/2).
long double delta_boundary(long double delta);

// sup{delta in (0, 1/2) : g(delta) < rho}, capped at 1/2. The bisection runs on
// log(delta), so rel_tol is relative: for small rho the answer is astronomically small.
long double c_rho(long double rho, long double rel_tol = 1e-12L);

struct ConstantsReport {
    double rho = 0;
    double c_rho = 0;
    double lower_bound = 0;  // e^{-1-4/rho}
    bool delta1_check = false;
    double tol = 0;
};

ConstantsReport constants_report(double rho, double rel_tol = 1e-9);

// Proportion of permutations of d letters with a fixed point: sum_{k=1}^d (-1)^{k+1}/k!
mpq_class rho_derangement(unsigned d);

}  // namespace sievegap
