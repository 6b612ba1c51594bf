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

#include "sievegap.h"

#include <new>
#include <string>

#include "constants.hpp"
#include "parallel.hpp"
#include "primes.hpp"
#include "report.hpp"
#include "sieve_system.hpp"
#include "sifted_window.hpp"
#include "system_file.hpp"

struct sg_system {
    sievegap::SievingSystem sys;
};

struct sg_shift {
    sievegap::ShiftVector shift;
};

struct sg_report {
    std::string text;
};

namespace {

thread_local std::string tl_error;

template <class F>
int guarded(F&& f) {
    try {
        f();
        tl_error.clear();
        return SG_OK;
    } catch (const sievegap::DomainError& e) {
        tl_error = e.what();
        return SG_ERR_DOMAIN;
    } catch (const sievegap::InvalidArgument& e) {
        tl_error = e.what();
        return SG_ERR_INVALID_ARGUMENT;
    } catch (const nlohmann::json::exception& e) {
        tl_error = e.what();
        return SG_ERR_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        tl_error = "out of memory";
        return SG_ERR_INTERNAL;
    } catch (const std::exception& e) {
        tl_error = e.what();
        return SG_ERR_INTERNAL;
    } catch (...) {
        tl_error = "unknown error";
        return SG_ERR_INTERNAL;
    }
}

int null_arg(const char* what) {
    tl_error = std::string(what) + " is NULL";
    return SG_ERR_INVALID_ARGUMENT;
}

const sievegap::ShiftVector& shift_or_zero(const sg_shift* s, sievegap::ShiftVector& zero) {
    return s ? s->shift : zero;
}

}  // namespace

extern "C" {

const char* sg_version(void) { return sievegap::kVersion; }

const char* sg_last_error(void) { return tl_error.c_str(); }

int sg_set_threads(unsigned threads) {
    sievegap::set_thread_cap(threads);
    return SG_OK;
}

int sg_system_open(const char* spec, sg_system** out) {
    if (!spec || !out) return null_arg("argument");
    return guarded([&] { *out = new sg_system{sievegap::resolve_system(spec)}; });
}

void sg_system_free(sg_system* sys) { delete sys; }

int sg_system_sigma(const sg_system* sys, uint64_t z, uint64_t x, double* out) {
    if (!sys || !out) return null_arg("argument");
    return guarded([&] { *out = sievegap::sigma(sys->sys, z, x).to_double(); });
}

int sg_system_rho_hat(const sg_system* sys, uint64_t x, double* out) {
    if (!sys || !out) return null_arg("argument");
    return guarded([&] { *out = sievegap::estimate_rho(sys->sys, x); });
}

int sg_system_residues(const sg_system* sys, uint64_t p, uint64_t* buf, size_t cap, size_t* count) {
    if (!sys || !count || (cap > 0 && !buf)) return null_arg("argument");
    return guarded([&] {
        const auto r = sys->sys.residues(p);
        *count = r.size();
        for (size_t i = 0; i < r.size() && i < cap; ++i) buf[i] = r[i];
    });
}

int sg_shift_zero(uint64_t cutoff, sg_shift** out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = new sg_shift{sievegap::ShiftVector(cutoff)}; });
}

int sg_shift_read(const char* path, sg_shift** out) {
    if (!path || !out) return null_arg("argument");
    return guarded([&] { *out = new sg_shift{sievegap::read_shift_file(path)}; });
}

int sg_shift_write(const sg_shift* shift, const char* path) {
    if (!shift || !path) return null_arg("argument");
    return guarded([&] { sievegap::write_shift_file(path, shift->shift); });
}

int sg_shift_set(sg_shift* shift, uint64_t p, uint64_t residue) {
    if (!shift) return null_arg("shift");
    return guarded([&] {
        if (!sievegap::is_prime_u64(p)) throw sievegap::InvalidArgument(std::to_string(p) + " is not prime");
        shift->shift.set(p, residue);
    });
}

void sg_shift_free(sg_shift* shift) { delete shift; }

int sg_largest_gap(const sg_system* sys, uint64_t x, const sg_shift* shift, int64_t lo, int64_t hi, uint64_t z,
                   uint64_t* gap, int64_t* left, uint64_t* members, int* sentinel) {
    if (!sys || !gap || !left || !members || !sentinel) return null_arg("argument");
    return guarded([&] {
        sievegap::ShiftVector zero(x);
        const auto g = sievegap::largest_gap_chunked(sys->sys, x, shift_or_zero(shift, zero), lo, hi, z);
        *gap = g.length;
        *left = g.left;
        *members = g.members;
        *sentinel = g.sentinel ? 1 : 0;
    });
}

int sg_verify_empty(const sg_system* sys, uint64_t x, const sg_shift* shift, int64_t lo, int64_t hi, int* empty) {
    if (!sys || !empty) return null_arg("argument");
    return guarded([&] {
        sievegap::ShiftVector zero(x);
        *empty = sievegap::verify_empty(sys->sys, x, shift_or_zero(shift, zero), lo, hi) ? 1 : 0;
    });
}

int sg_c_rho(double rho, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = static_cast<double>(sievegap::c_rho(static_cast<long double>(rho))); });
}

int sg_run(const char* config_json, sg_report** out) {
    if (!config_json || !out) return null_arg("argument");
    *out = nullptr;
    return guarded([&] {
        nlohmann::json cfg;
        try {
            cfg = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw sievegap::InvalidArgument(std::string("run config: ") + e.what());
        }
        auto report = sievegap::run_command(cfg);
        *out = new sg_report{report.dump(2)};
    });
}

const char* sg_report_json(const sg_report* report) { return report ? report->text.c_str() : ""; }

void sg_report_free(sg_report* report) { delete report; }

const char* sg_commands(void) {
    static const std::string names = [] {
        std::string s;
        for (const auto& n : sievegap::command_names()) s += (s.empty() ? "" : ",") + n;
        return s;
    }();
    return names.c_str();
}

}  // extern "C"
