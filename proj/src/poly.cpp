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

#include "poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "primes.hpp"

namespace sievegap {

namespace {

using ModPoly = std::vector<uint64_t>;  // coefficients low -> high, mod p

void mp_trim(ModPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

ModPoly mp_monic(ModPoly a, uint64_t p) {
    mp_trim(a);
    if (a.empty()) return a;
    const uint64_t inv = invmod(a.back(), p);
    for (auto& c : a) c = mulmod(c, inv, p);
    return a;
}

// remainder of a modulo monic m
ModPoly mp_rem(ModPoly a, const ModPoly& m, uint64_t p) {
    mp_trim(a);
    const size_t dm = m.size() - 1;
    while (a.size() > dm && !a.empty()) {
        const uint64_t lead = a.back();
        const size_t shift = a.size() - 1 - dm;
        if (lead != 0) {
            for (size_t i = 0; i <= dm; ++i) {
                a[shift + i] = (a[shift + i] + p - mulmod(lead, m[i], p)) % p;
            }
        }
        a.pop_back();
        mp_trim(a);
    }
    return a;
}

// quotient of a by monic m (exact division expected)
ModPoly mp_div(ModPoly a, const ModPoly& m, uint64_t p) {
    mp_trim(a);
    const size_t dm = m.size() - 1;
    if (a.size() <= dm) return {};
    ModPoly q(a.size() - dm, 0);
    while (a.size() > dm) {
        const uint64_t lead = a.back();
        const size_t shift = a.size() - 1 - dm;
        q[shift] = lead;
        if (lead != 0) {
            for (size_t i = 0; i <= dm; ++i) {
                a[shift + i] = (a[shift + i] + p - mulmod(lead, m[i], p)) % p;
            }
        }
        a.pop_back();
    }
    mp_trim(q);
    return q;
}

ModPoly mp_mul(const ModPoly& a, const ModPoly& b, uint64_t p) {
    if (a.empty() || b.empty()) return {};
    ModPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
        }
    }
    mp_trim(r);
    return r;
}

ModPoly mp_powmod(ModPoly base, uint64_t e, const ModPoly& m, uint64_t p) {
    ModPoly result{1};
    base = mp_rem(std::move(base), m, p);
    while (e > 0) {
        if (e & 1) result = mp_rem(mp_mul(result, base, p), m, p);
        base = mp_rem(mp_mul(base, base, p), m, p);
        e >>= 1;
    }
    return result;
}

ModPoly mp_gcd(ModPoly a, ModPoly b, uint64_t p) {
    a = mp_monic(std::move(a), p);
    b = mp_monic(std::move(b), p);
    while (!b.empty()) {
        ModPoly r = mp_rem(a, b, p);
        a = std::move(b);
        b = mp_monic(std::move(r), p);
    }
    return a;
}

ModPoly mp_sub(ModPoly a, const ModPoly& b, uint64_t p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
    mp_trim(a);
    return a;
}

// g: monic, squarefree, product of distinct linear factors over F_p (p odd)
void split_linear(const ModPoly& g, uint64_t p, uint64_t& salt, std::vector<uint64_t>& roots) {
    const size_t deg = g.size() - 1;
    if (deg == 0) return;
    if (deg == 1) {
        roots.push_back((p - g[0]) % p);
        return;
    }
    for (;;) {
        salt = salt * 6364136223846793005ull + 1442695040888963407ull;
        const uint64_t a = (salt >> 17) % p;
        ModPoly shifted{a, 1};
        ModPoly t = mp_powmod(shifted, (p - 1) / 2, g, p);
        t = mp_sub(std::move(t), ModPoly{1}, p);
        ModPoly h = mp_gcd(g, t, p);
        const size_t dh = h.empty() ? 0 : h.size() - 1;
        if (dh == 0 || dh == deg) continue;
        split_linear(h, p, salt, roots);
        split_linear(mp_monic(mp_div(g, h, p), p), p, salt, roots);
        return;
    }
}

// falling factorial x(x-1)...(x-j+1) as integer polynomials, j = 0..d
std::vector<std::vector<mpz_class>> falling_factorials(int d) {
    std::vector<std::vector<mpz_class>> out;
    out.push_back({mpz_class(1)});
    for (int j = 1; j <= d; ++j) {
        const auto& prev = out.back();
        std::vector<mpz_class> next(prev.size() + 1, 0);
        for (size_t i = 0; i < prev.size(); ++i) {
            next[i + 1] += prev[i];
            next[i] -= prev[i] * (j - 1);
        }
        out.push_back(std::move(next));
    }
    return out;
}

uint64_t mod_of(const mpz_class& v, uint64_t p) {
    return mpz_fdiv_ui(v.get_mpz_t(), p);
}

// ---- expression parser over Q[n] ----

using QPoly = std::vector<mpq_class>;

void q_trim(QPoly& a) {
    while (a.size() > 1 && a.back() == 0) a.pop_back();
    if (a.empty()) a.push_back(0);
}

QPoly q_add(QPoly a, const QPoly& b, int sign) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
    q_trim(a);
    return a;
}

QPoly q_mul(const QPoly& a, const QPoly& b) {
    QPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    q_trim(r);
    return r;
}

class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    QPoly parse() {
        QPoly r = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw InvalidArgument("polynomial parse error at offset " + std::to_string(pos_) + ": " +
                              msg + " in \"" + std::string(s_) + "\"");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool starts_primary() {
        skip();
        if (pos_ >= s_.size()) return false;
        const char c = s_[pos_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == 'n' || c == 'x' || c == '(';
    }

    QPoly expr() {
        QPoly acc;
        if (peek('-')) {
            ++pos_;
            acc = q_add(QPoly{0}, term(), -1);
        } else {
            if (peek('+')) ++pos_;
            acc = term();
        }
        for (;;) {
            if (peek('+')) {
                ++pos_;
                acc = q_add(std::move(acc), term(), +1);
            } else if (peek('-')) {
                ++pos_;
                acc = q_add(std::move(acc), term(), -1);
            } else {
                return acc;
            }
        }
    }

    QPoly term() {
        QPoly acc = factor();
        for (;;) {
            if (peek('*')) {
                ++pos_;
                acc = q_mul(acc, factor());
            } else if (peek('/')) {
                ++pos_;
                QPoly d = factor();
                if (d.size() != 1 || d[0] == 0) fail("division only by nonzero constants");
                for (auto& c : acc) c /= d[0];
            } else if (starts_primary()) {
                acc = q_mul(acc, factor());
            } else {
                return acc;
            }
        }
    }

    QPoly factor() {
        QPoly base = primary();
        if (peek('^')) {
            ++pos_;
            skip();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected exponent");
            const int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
            if (e > 64) fail("exponent too large");
            QPoly r{1};
            for (int i = 0; i < e; ++i) r = q_mul(r, base);
            return r;
        }
        return base;
    }

    QPoly primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            QPoly r = expr();
            if (!peek(')')) fail("expected ')'");
            ++pos_;
            return r;
        }
        if (c == 'n' || c == 'x') {
            ++pos_;
            return QPoly{0, 1};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return QPoly{mpq_class(mpz_class(std::string(s_.substr(start, pos_ - start))))};
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    size_t pos_ = 0;
};

}  // namespace

void Polynomial::trim() {
    while (binom_.size() > 1 && binom_.back() == 0) binom_.pop_back();
    if (binom_.empty()) binom_.push_back(0);
}

Polynomial Polynomial::from_binomial(std::vector<mpz_class> coeffs) {
    Polynomial f;
    f.binom_ = std::move(coeffs);
    f.trim();
    return f;
}

Polynomial Polynomial::from_standard(const std::vector<mpq_class>& coeffs) {
    const int d = coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1;
    // values f(0..d), then forward differences at 0
    std::vector<mpq_class> values(d + 1);
    for (int k = 0; k <= d; ++k) {
        mpq_class v = 0;
        mpq_class pw = 1;
        for (int i = 0; i <= d; ++i) {
            v += coeffs[i] * pw;
            pw *= k;
        }
        values[k] = v;
    }
    std::vector<mpz_class> binom(d + 1);
    for (int j = 0; j <= d; ++j) {
        if (values[0].get_den() != 1) {
            throw InvalidArgument("polynomial is not integer-valued (difference " +
                                  std::to_string(j) + " is " + values[0].get_str() + ")");
        }
        binom[j] = values[0].get_num();
        for (int k = 0; k + 1 < static_cast<int>(values.size()); ++k) values[k] = values[k + 1] - values[k];
        values.pop_back();
    }
    return from_binomial(std::move(binom));
}

Polynomial Polynomial::parse(std::string_view text) {
    auto trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
    if (trimmed.rfind("binom:", 0) == 0) {
        std::vector<mpz_class> coeffs;
        std::string body(trimmed.substr(6));
        std::replace(body.begin(), body.end(), '[', ' ');
        std::replace(body.begin(), body.end(), ']', ' ');
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char ch) { return std::isspace(ch); }),
                       item.end());
            if (item.empty()) continue;
            mpz_class v;
            if (v.set_str(item, 10) != 0) throw InvalidArgument("bad binomial coefficient '" + item + "'");
            coeffs.push_back(v);
        }
        if (coeffs.empty()) throw InvalidArgument("binom: needs at least one coefficient");
        return from_binomial(std::move(coeffs));
    }
    ExprParser parser(trimmed);
    return from_standard(parser.parse());
}

std::vector<mpq_class> Polynomial::standard_coeffs() const {
    const int d = degree();
    const auto falling = falling_factorials(d);
    std::vector<mpq_class> out(d + 1, 0);
    mpz_class fact = 1;
    for (int j = 0; j <= d; ++j) {
        if (j > 0) fact *= j;
        for (size_t i = 0; i < falling[j].size(); ++i) {
            out[i] += mpq_class(binom_[j] * falling[j][i], fact);
        }
    }
    for (auto& c : out) c.canonicalize();
    return out;
}

int Polynomial::leading_sign() const { return sgn(binom_.back()); }

mpz_class Polynomial::eval(const mpz_class& n) const {
    mpz_class result = 0;
    mpz_class c = 1;  // C(n, j)
    for (size_t j = 0; j < binom_.size(); ++j) {
        result += binom_[j] * c;
        c *= (n - static_cast<long>(j));
        mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), j + 1);
    }
    return result;
}

std::optional<__int128> Polynomial::eval_i128(int64_t n) const {
    __int128 result = 0;
    __int128 c = 1;
    for (size_t j = 0; j < binom_.size(); ++j) {
        if (!mpz_fits_slong_p(binom_[j].get_mpz_t())) return std::nullopt;
        const __int128 a = binom_[j].get_si();
        __int128 term;
        if (__builtin_mul_overflow(a, c, &term)) return std::nullopt;
        if (__builtin_add_overflow(result, term, &result)) return std::nullopt;
        if (j + 1 == binom_.size()) break;
        __int128 next;
        if (__builtin_mul_overflow(c, static_cast<__int128>(n) - static_cast<__int128>(j), &next)) return std::nullopt;
        c = next / static_cast<__int128>(j + 1);
    }
    return result;
}

std::vector<uint64_t> Polynomial::values_mod(uint64_t p) const {
    const size_t d = binom_.size();
    std::vector<uint64_t> diffs(d);
    for (size_t k = 0; k < d; ++k) diffs[k] = mod_of(binom_[k], p);
    std::vector<uint64_t> values(p);
    for (uint64_t n = 0; n < p; ++n) {
        values[n] = diffs[0];
        for (size_t k = 0; k + 1 < d; ++k) {
            diffs[k] += diffs[k + 1];
            if (diffs[k] >= p) diffs[k] -= p;
        }
    }
    return values;
}

std::vector<uint64_t> Polynomial::roots_mod_bruteforce(uint64_t p) const {
    const auto values = values_mod(p);
    std::vector<uint64_t> roots;
    for (uint64_t n = 0; n < p; ++n)
        if (values[n] == 0) roots.push_back(n);
    return roots;
}

std::vector<uint64_t> Polynomial::roots_mod_fast(uint64_t p) const {
    const int d = degree();
    if (p <= static_cast<uint64_t>(d)) {
        throw InvalidArgument("roots_mod_fast requires p > degree");
    }
    // standard coefficients mod p: sum_j a_j * falling_j(x) / j!
    const auto falling = falling_factorials(d);
    ModPoly f(d + 1, 0);
    uint64_t fact = 1;
    for (int j = 0; j <= d; ++j) {
        if (j > 0) fact = mulmod(fact, static_cast<uint64_t>(j), p);
        const uint64_t scale = mulmod(mod_of(binom_[j], p), invmod(fact, p), p);
        if (scale == 0) continue;
        for (size_t i = 0; i < falling[j].size(); ++i) {
            f[i] = (f[i] + mulmod(scale, mod_of(falling[j][i], p), p)) % p;
        }
    }
    mp_trim(f);
    std::vector<uint64_t> roots;
    if (f.empty()) {
        roots.resize(p);
        for (uint64_t r = 0; r < p; ++r) roots[r] = r;
        return roots;
    }
    f = mp_monic(std::move(f), p);
    if (f.size() == 1) return roots;
    if (p == 2) {
        // degree 1 only (p > d)
        roots.push_back((2 - f[0]) % 2);
        return roots;
    }
    // g = gcd(f, x^p - x) collects the distinct linear factors
    ModPoly xp = mp_powmod(ModPoly{0, 1}, p, f, p);
    ModPoly g = mp_gcd(f, mp_sub(std::move(xp), ModPoly{0, 1}, p), p);
    uint64_t salt = p * 0x9E3779B97F4A7C15ull + 1;
    split_linear(g, p, salt, roots);
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::string Polynomial::to_string() const {
    const auto coeffs = standard_coeffs();
    std::string out;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
        const mpq_class& c = coeffs[i];
        if (c == 0) continue;
        const bool negative = c < 0;
        const mpq_class mag = abs(c);
        if (out.empty()) {
            if (negative) out += "-";
        } else {
            out += negative ? " - " : " + ";
        }
        std::string var = i == 0 ? "" : (i == 1 ? "n" : "n^" + std::to_string(i));
        if (mag == 1 && i > 0) {
            out += var;
        } else if (mag.get_den() == 1) {
            out += mag.get_str() + var;
        } else {
            out += "(" + mag.get_str() + ")" + var;
        }
    }
    return out.empty() ? "0" : out;
}

}  // namespace sievegap
