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

#include "sifted_window.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include "parallel.hpp"
#include "primes.hpp"

namespace sievegap {

void ShiftVector::set(uint64_t p, uint64_t r) {
    if (p < 2) throw InvalidArgument("shift: modulus must be prime");
    r %= p;
    if (entries_.empty() || entries_.back().first < p) {
        entries_.emplace_back(p, r);
        return;
    }
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(p, uint64_t{0}));
    if (it != entries_.end() && it->first == p) {
        it->second = r;
    } else {
        entries_.insert(it, {p, r});
    }
}

uint64_t ShiftVector::get(uint64_t p) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(p, uint64_t{0}));
    return (it != entries_.end() && it->first == p) ? it->second : 0;
}

bool ShiftVector::contains(uint64_t p) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(p, uint64_t{0}));
    return it != entries_.end() && it->first == p;
}

void ShiftVector::erase_above(uint64_t p) {
    auto it = std::upper_bound(entries_.begin(), entries_.end(), std::make_pair(p, UINT64_MAX));
    entries_.erase(it, entries_.end());
}

ShiftVector ShiftVector::from_integer(const SievingSystem& sys, uint64_t x, const mpz_class& b) {
    ShiftVector out(x);
    for (uint64_t p : primes_up_to(x)) {
        if (sys.class_count(p) == 0) continue;
        out.set(p, mpz_fdiv_ui(b.get_mpz_t(), p));
    }
    return out;
}

mpz_class ShiftVector::to_integer() const {
    mpz_class value = 0, modulus = 1;
    for (const auto& [p, r] : entries_) {
        const uint64_t cur = mpz_fdiv_ui(value.get_mpz_t(), p);
        const uint64_t m_mod = mpz_fdiv_ui(modulus.get_mpz_t(), p);
        const uint64_t t = mulmod((r + p - cur) % p, invmod(m_mod, p), p);
        value += modulus * static_cast<unsigned long>(t);
        modulus *= static_cast<unsigned long>(p);
    }
    return value;
}

ShiftVector read_shift_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open shift file '" + path + "'");
    ShiftVector out;
    std::string line;
    size_t lineno = 0;
    uint64_t cutoff = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        uint64_t p = 0, r = 0;
        if (!(ss >> p)) continue;
        std::string extra;
        if (!(ss >> r) || (ss >> extra)) {
            throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected 'p residue'");
        }
        if (!is_prime_u64(p) || r >= p) {
            throw InvalidArgument(path + ":" + std::to_string(lineno) + ": bad pair " + std::to_string(p) + " " +
                                  std::to_string(r));
        }
        out.set(p, r);
        cutoff = std::max(cutoff, p);
    }
    out.set_cutoff(cutoff);
    return out;
}

void write_shift_file(const std::string& path, const ShiftVector& shift) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write shift file '" + path + "'");
    out << "# cutoff " << shift.cutoff() << "\n";
    for (const auto& [p, r] : shift.entries()) out << p << ' ' << r << '\n';
}

SiftedWindow::SiftedWindow(int64_t lo, int64_t hi, uint64_t z, uint64_t x) : lo_(lo), hi_(hi), z_(z), x_(x) {
    size_ = hi >= lo ? static_cast<uint64_t>(hi - lo) + 1 : 0;
    words_.assign((size_ + 63) / 64, ~uint64_t{0});
    if (size_ % 64 != 0) words_.back() = (uint64_t{1} << (size_ % 64)) - 1;
}

uint64_t SiftedWindow::count() const {
    uint64_t c = 0;
    for (uint64_t w : words_) c += static_cast<uint64_t>(std::popcount(w));
    return c;
}

std::vector<int64_t> SiftedWindow::members() const {
    std::vector<int64_t> out;
    for (size_t wi = 0; wi < words_.size(); ++wi) {
        uint64_t w = words_[wi];
        while (w) {
            const int bit = std::countr_zero(w);
            out.push_back(lo_ + static_cast<int64_t>(wi * 64 + static_cast<size_t>(bit)));
            w &= w - 1;
        }
    }
    return out;
}

std::optional<int64_t> SiftedWindow::next_member(int64_t n) const {
    if (n > hi_) return std::nullopt;
    if (n < lo_) n = lo_;
    uint64_t i = static_cast<uint64_t>(n - lo_);
    size_t wi = i >> 6;
    uint64_t w = words_[wi] & (~uint64_t{0} << (i & 63));
    while (true) {
        if (w) return lo_ + static_cast<int64_t>(wi * 64 + static_cast<size_t>(std::countr_zero(w)));
        if (++wi >= words_.size()) return std::nullopt;
        w = words_[wi];
    }
}

namespace {

uint64_t floor_mod(int64_t a, uint64_t p) {
    const auto m = static_cast<int64_t>(p);
    int64_t r = a % m;
    if (r < 0) r += m;
    return static_cast<uint64_t>(r);
}

constexpr uint64_t kChunkBits = uint64_t{1} << 18;

}  // namespace

SiftedWindow sift(const SievingSystem& sys, uint64_t x, const ShiftVector& shift, int64_t lo, int64_t hi,
                  uint64_t z) {
    if (z < 1 || z > x) throw InvalidArgument("sift: need 1 <= z <= x");
    if (hi >= lo && static_cast<uint64_t>(hi - lo) + 1 > kMaxWindow) {
        throw InvalidArgument("sift: window exceeds 2^31 entries; split it into chunks");
    }
    SiftedWindow win(lo, hi, z, x);
    if (win.size() == 0) return win;

    struct Rule {
        uint64_t p;
        std::vector<uint64_t> targets;  // (r + b) mod p for r in I_p
    };
    std::vector<Rule> rules;
    for (uint64_t p : primes_in(z, x)) {
        const auto res = sys.residues(p);
        if (res.empty()) continue;
        if (res.size() == p) throw DomainError("sift: system is degenerate at p=" + std::to_string(p));
        Rule rule{p, {}};
        const uint64_t b = shift.get(p);
        rule.targets.reserve(res.size());
        for (uint64_t r : res) rule.targets.push_back((r + b) % p);
        rules.push_back(std::move(rule));
    }

    auto& words = win.words();
    const uint64_t n_chunks = (win.size() + kChunkBits - 1) / kChunkBits;
    // chunks are word-aligned, so each worker owns disjoint words
    parallel_for(n_chunks, [&](size_t c) {
        const uint64_t first = c * kChunkBits;
        const uint64_t last = std::min(win.size(), first + kChunkBits);
        const int64_t chunk_lo = lo + static_cast<int64_t>(first);
        for (const auto& rule : rules) {
            const uint64_t lo_mod = floor_mod(chunk_lo, rule.p);
            for (uint64_t t : rule.targets) {
                for (uint64_t i = first + (t + rule.p - lo_mod) % rule.p; i < last; i += rule.p) {
                    words[i >> 6] &= ~(uint64_t{1} << (i & 63));
                }
            }
        }
    });
    return win;
}

GapResult largest_gap(const SiftedWindow& window) {
    GapResult out;
    std::optional<int64_t> prev;
    for (size_t wi = 0; wi < window.words().size(); ++wi) {
        uint64_t w = window.words()[wi];
        while (w) {
            const int64_t n = window.lo() + static_cast<int64_t>(wi * 64 + static_cast<size_t>(std::countr_zero(w)));
            w &= w - 1;
            ++out.members;
            if (prev) {
                const auto gap = static_cast<uint64_t>(n - *prev);
                if (gap > out.length) {
                    out.length = gap;
                    out.left = *prev;
                }
            }
            prev = n;
        }
    }
    if (out.members < 2) {
        out.sentinel = true;
        out.length = window.size();
        out.left = window.lo();
    }
    return out;
}

GapResult largest_gap_chunked(const SievingSystem& sys, uint64_t x, const ShiftVector& shift, int64_t lo,
                              int64_t hi, uint64_t z, uint64_t chunk) {
    if (lo > hi) throw InvalidArgument("largest_gap: empty window");
    if (chunk < 1 || chunk > kMaxWindow) throw InvalidArgument("largest_gap: chunk must be in [1, 2^31]");
    GapResult out;
    std::optional<int64_t> prev;
    const auto step = static_cast<int64_t>(chunk);
    for (int64_t a = lo;; a += step) {
        const int64_t b = hi - a < step ? hi : a + step - 1;
        const auto w = sift(sys, x, shift, a, b, z);
        for (int64_t n : w.members()) {
            ++out.members;
            if (prev && static_cast<uint64_t>(n - *prev) > out.length) {
                out.length = static_cast<uint64_t>(n - *prev);
                out.left = *prev;
            }
            prev = n;
        }
        if (b == hi) break;
    }
    if (out.members < 2) {
        out.sentinel = true;
        out.length = static_cast<uint64_t>(hi - lo) + 1;
        out.left = lo;
    }
    return out;
}

bool is_member(const SievingSystem& sys, const ShiftVector& shift, int64_t n, uint64_t z, uint64_t x) {
    for (uint64_t p : primes_in(z, x)) {
        const auto res = sys.residues(p);
        if (res.empty()) continue;
        const uint64_t r = (floor_mod(n, p) + p - shift.get(p)) % p;
        if (std::binary_search(res.begin(), res.end(), r)) return false;
    }
    return true;
}

bool verify_empty(const SievingSystem& sys, uint64_t x, const ShiftVector& shift, int64_t lo, int64_t hi) {
    if (lo > hi) return true;
    const int64_t step = static_cast<int64_t>(kMaxWindow / 2);
    for (int64_t a = lo; a <= hi; a += step) {
        const int64_t b = std::min(hi, a + step - 1);
        if (sift(sys, x, shift, a, b).count() != 0) return false;
        if (b == hi) break;
    }
    return true;
}

}  // namespace sievegap
