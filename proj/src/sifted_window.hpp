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
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "sieve_system.hpp"

namespace sievegap {

// A shift b stored as residues b mod p. Primes absent from the table count as b = 0 mod p.
class ShiftVector {
public:
    ShiftVector() = default;
    explicit ShiftVector(uint64_t cutoff) : cutoff_(cutoff) {}

    // Reduces r mod p. Inserting in increasing p order is O(1).
    void set(uint64_t p, uint64_t r);
    uint64_t get(uint64_t p) const;
    bool contains(uint64_t p) const;
    void erase_above(uint64_t p);

    uint64_t cutoff() const { return cutoff_; }
    void set_cutoff(uint64_t x) { cutoff_ = x; }
    size_t size() const { return entries_.size(); }
    const std::vector<std::pair<uint64_t, uint64_t>>& entries() const { return entries_; }

    // b mod p for every prime p <= x with I_p nonempty.
    static ShiftVector from_integer(const SievingSystem& sys, uint64_t x, const mpz_class& b);
    // The CRT representative in [0, P) where P is the product of the stored primes.
    mpz_class to_integer() const;

    bool operator==(const ShiftVector&) const = default;

private:
    uint64_t cutoff_ = 0;
    std::vector<std::pair<uint64_t, uint64_t>> entries_;
};

// Text format: one "p residue" pair per line, '#' starts a comment.
ShiftVector read_shift_file(const std::string& path);
void write_shift_file(const std::string& path, const ShiftVector& shift);

constexpr uint64_t kMaxWindow = uint64_t{1} << 31;

// Membership bitmap of (S_{z,x} + b) on [lo, hi].
class SiftedWindow {
public:
    SiftedWindow() = default;
    SiftedWindow(int64_t lo, int64_t hi, uint64_t z, uint64_t x);

    int64_t lo() const { return lo_; }
    int64_t hi() const { return hi_; }
    uint64_t z() const { return z_; }
    uint64_t x() const { return x_; }
    uint64_t size() const { return size_; }

    bool member(int64_t n) const {
        const uint64_t i = static_cast<uint64_t>(n - lo_);
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    uint64_t count() const;
    std::vector<int64_t> members() const;
    // Smallest member >= n, if any.
    std::optional<int64_t> next_member(int64_t n) const;

    std::vector<uint64_t>& words() { return words_; }
    const std::vector<uint64_t>& words() const { return words_; }

private:
    int64_t lo_ = 0;
    int64_t hi_ = -1;
    uint64_t z_ = 1;
    uint64_t x_ = 1;
    uint64_t size_ = 0;
    std::vector<uint64_t> words_;
};

// Throws DomainError at the first degenerate prime in (z, x] and
// InvalidArgument for windows above kMaxWindow.
SiftedWindow sift(const SievingSystem& sys, uint64_t x, const ShiftVector& shift, int64_t lo, int64_t hi,
                  uint64_t z = 1);

struct GapResult {
    uint64_t length = 0;
    int64_t left = 0;
    uint64_t members = 0;
    // set when the window holds fewer than two members; length is then the window length
    bool sentinel = false;
};

// Largest difference between consecutive members; ties go to the leftmost.
GapResult largest_gap(const SiftedWindow& window);

// largest_gap over [lo, hi] sifted in pieces of at most `chunk` entries, so the
// window may exceed kMaxWindow. Agrees with the single-window answer.
GapResult largest_gap_chunked(const SievingSystem& sys, uint64_t x, const ShiftVector& shift, int64_t lo,
                              int64_t hi, uint64_t z = 1, uint64_t chunk = kMaxWindow);

// Single-integer membership test for (S_{z,x} + b).
bool is_member(const SievingSystem& sys, const ShiftVector& shift, int64_t n, uint64_t z, uint64_t x);

bool verify_empty(const SievingSystem& sys, uint64_t x, const ShiftVector& shift, int64_t lo, int64_t hi);

}  // namespace sievegap
