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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace sievegap {

// An integer-valued polynomial stored in the binomial basis
//   f(n) = sum_j a_j * C(n, j),  a_j in Z.
// Every polynomial Z -> Z has this form, including ones whose standard
// coefficients are not integers, e.g. (n^7 - n + 7)/7.
class Polynomial {
public:
    Polynomial() = default;

    static Polynomial from_binomial(std::vector<mpz_class> coeffs);
    // Standard basis c_0 + c_1 n + ... ; rejects polynomials that are not integer-valued.
    static Polynomial from_standard(const std::vector<mpq_class>& coeffs);

    // Accepts "n^2+1", "3*n^3 - 2n + 7", "(n^7 - n + 7)/7", "1/2 n^2 + 1/2 n",
    // or "binom:a0,a1,...,ad" for binomial-basis coefficients. Either n or x is the variable.
    static Polynomial parse(std::string_view text);

    int degree() const { return static_cast<int>(binom_.size()) - 1; }
    const std::vector<mpz_class>& binomial_coeffs() const { return binom_; }
    std::vector<mpq_class> standard_coeffs() const;

    // Sign of the leading standard coefficient (0 for the zero polynomial).
    int leading_sign() const;

    mpz_class eval(const mpz_class& n) const;
    // Exact value if every intermediate fits in signed 128 bits.
    std::optional<__int128> eval_i128(int64_t n) const;

    // f(0), ..., f(p-1) mod p via forward differences; valid for any prime p.
    std::vector<uint64_t> values_mod(uint64_t p) const;

    // {n mod p : f(n) = 0 mod p}, sorted. Exhaustive evaluation over all residues.
    std::vector<uint64_t> roots_mod_bruteforce(uint64_t p) const;
    // Same set via gcd with x^p - x and equal-degree splitting. Requires p > degree.
    std::vector<uint64_t> roots_mod_fast(uint64_t p) const;

    std::string to_string() const;

private:
    void trim();
    std::vector<mpz_class> binom_;
};

}  // namespace sievegap
