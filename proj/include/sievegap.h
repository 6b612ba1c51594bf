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

#ifndef SIEVEGAP_H
#define SIEVEGAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SIEVEGAP_BUILDING)
#    define SG_API __declspec(dllexport)
#  else
#    define SG_API __declspec(dllimport)
#  endif
#else
#  define SG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning int uses these. */
#define SG_OK 0
#define SG_ERR_DOMAIN 1           /* degenerate system, out-of-range request, failed search */
#define SG_ERR_INVALID_ARGUMENT 2 /* bad parameters or malformed input */
#define SG_ERR_INTERNAL 3

typedef struct sg_system sg_system;
typedef struct sg_shift sg_shift;
typedef struct sg_report sg_report;

SG_API const char* sg_version(void);

/* Message for the last failing call on this thread; "" after a success. */
SG_API const char* sg_last_error(void);

/* 0 = all available cores. Results do not depend on the cap. */
SG_API int sg_set_threads(unsigned threads);

/* Builtin name ("eratosthenes", "twin", "poly:n^2+1", "poly-strict:...") or a definition file path. */
SG_API int sg_system_open(const char* spec, sg_system** out);
SG_API void sg_system_free(sg_system* sys);
/* prod over primes p in (z, x] of (1 - |I_p|/p) */
SG_API int sg_system_sigma(const sg_system* sys, uint64_t z, uint64_t x, double* out);
SG_API int sg_system_rho_hat(const sg_system* sys, uint64_t x, double* out);
/* Sorted I_p into buf (capacity cap); *count receives |I_p| even when cap is too small. */
SG_API int sg_system_residues(const sg_system* sys, uint64_t p, uint64_t* buf, size_t cap, size_t* count);

/* b = 0 with the given cutoff. */
SG_API int sg_shift_zero(uint64_t cutoff, sg_shift** out);
SG_API int sg_shift_read(const char* path, sg_shift** out);
SG_API int sg_shift_write(const sg_shift* shift, const char* path);
SG_API int sg_shift_set(sg_shift* shift, uint64_t p, uint64_t residue);
SG_API void sg_shift_free(sg_shift* shift);

/* Largest gap between consecutive members of (S_{z,x} + b) in [lo, hi]. shift may be NULL (b = 0).
   *sentinel is set when fewer than two members exist; *gap is then hi - lo + 1. */
SG_API int sg_largest_gap(const sg_system* sys, uint64_t x, const sg_shift* shift, int64_t lo, int64_t hi,
                          uint64_t z, uint64_t* gap, int64_t* left, uint64_t* members, int* sentinel);
SG_API int sg_verify_empty(const sg_system* sys, uint64_t x, const sg_shift* shift, int64_t lo, int64_t hi,
                           int* empty);

SG_API int sg_c_rho(double rho, double* out);

/* Runs a subcommand described by a JSON RunConfig, e.g.
   {"command": "gaps", "system": "eratosthenes", "x": 5, "window": "1..31"}. */
SG_API int sg_run(const char* config_json, sg_report** out);
/* Report text, valid until sg_report_free. */
SG_API const char* sg_report_json(const sg_report* report);
SG_API void sg_report_free(sg_report* report);
/* Comma-separated list of subcommand names. */
SG_API const char* sg_commands(void);

#ifdef __cplusplus
}
#endif

#endif
