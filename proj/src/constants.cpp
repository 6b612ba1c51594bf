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

#include "constants.hpp"

#include <cmath>

#include "primes.hpp"

namespace sievegap {

long double delta_boundary(long double delta) {
    return (4.0L + delta) * std::pow(10.0L, 2.0L * delta) / std::log(1.0L / (2.0L * delta));
}

long double c_rho(long double rho, long double rel_tol) {
    if (!(rho > 0)) throw DomainError("c_rho: rho must be positive");
    if (!(rel_tol > 0)) throw InvalidArgument("c_rho: tolerance must be positive");
    // g -> infinity at 1/2, so only rho beyond any finite bound would cap
    long double lo = std::log(1e-4000L);
    long double hi = std::log(0.5L);
    if (delta_boundary(std::exp(lo)) >= rho) return 0;
    for (int iter = 0; iter < 200 && hi - lo > rel_tol; ++iter) {
        const long double mid = 0.5L * (lo + hi);
        if (delta_boundary(std::exp(mid)) < rho) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::exp(lo);
}

ConstantsReport constants_report(double rho, double rel_tol) {
    ConstantsReport rep;
    rep.rho = rho;
    rep.tol = rel_tol;
    const long double c = c_rho(rho, rel_tol);
    rep.c_rho = static_cast<double>(c);
    rep.lower_bound = std::exp(-1.0 - 4.0 / rho);
    const long double probe = c * (1.0L - rel_tol);
    rep.delta1_check = probe > 0 && delta_boundary(probe) < rho;
    return rep;
}

mpq_class rho_derangement(unsigned d) {
    if (d < 1) throw InvalidArgument("rho_derangement: need d >= 1");
    mpq_class sum = 0;
    mpz_class fact = 1;
    for (unsigned k = 1; k <= d; ++k) {
        fact *= k;
        mpq_class term(1, fact);
        term.canonicalize();
        if (k % 2 == 1) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    return sum;
}

}  // namespace sievegap
