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

#include <stdio.h>
#include <string.h>

#include "sievegap.h"

static int failures = 0;

#define EXPECT(cond)                                                \
    do {                                                            \
        if (!(cond)) {                                              \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                             \
        }                                                           \
    } while (0)

int main(void) {
    sg_system* era = NULL;
    EXPECT(sg_system_open("eratosthenes", &era) == SG_OK);

    uint64_t gap = 0, members = 0;
    int64_t left = 0;
    int sentinel = -1;
    EXPECT(sg_largest_gap(era, 5, NULL, 1, 31, 1, &gap, &left, &members, &sentinel) == SG_OK);
    EXPECT(gap == 6 && left == 1 && members == 9 && sentinel == 0);

    /* b = 1 mod 2, 3, 5 moves every member up by one */
    sg_shift* b = NULL;
    EXPECT(sg_shift_zero(5, &b) == SG_OK);
    EXPECT(sg_shift_set(b, 2, 1) == SG_OK);
    EXPECT(sg_shift_set(b, 3, 1) == SG_OK);
    EXPECT(sg_shift_set(b, 5, 1) == SG_OK);
    EXPECT(sg_shift_set(b, 4, 1) == SG_ERR_INVALID_ARGUMENT);
    EXPECT(sg_largest_gap(era, 5, b, 2, 32, 1, &gap, &left, &members, &sentinel) == SG_OK);
    EXPECT(gap == 6 && left == 2);
    int empty = -1;
    EXPECT(sg_verify_empty(era, 5, b, 3, 7, &empty) == SG_OK);
    EXPECT(empty == 1);
    EXPECT(sg_verify_empty(era, 5, b, 2, 7, &empty) == SG_OK);
    EXPECT(empty == 0);
    EXPECT(sg_verify_empty(era, 5, b, 9, 3, &empty) == SG_OK && empty == 1);

    double s = 0;
    EXPECT(sg_system_sigma(era, 1, 7, &s) == SG_OK);
    EXPECT(s > 8.0 / 35 - 1e-15 && s < 8.0 / 35 + 1e-15);

    uint64_t res[4];
    size_t count = 0;
    sg_system* f = NULL;
    EXPECT(sg_system_open("poly:n^2+1", &f) == SG_OK);
    EXPECT(sg_system_residues(f, 5, res, 4, &count) == SG_OK);
    EXPECT(count == 2 && res[0] == 2 && res[1] == 3);
    EXPECT(sg_system_residues(f, 6, res, 4, &count) == SG_ERR_DOMAIN);
    EXPECT(strlen(sg_last_error()) > 0);

    double c = 0;
    EXPECT(sg_c_rho(1.0, &c) == SG_OK && c > 1.0 / 128);
    EXPECT(sg_c_rho(0.0, &c) == SG_ERR_DOMAIN);

    sg_system* bad = NULL;
    EXPECT(sg_system_open("no-such-system", &bad) == SG_ERR_INVALID_ARGUMENT);
    EXPECT(bad == NULL);

    sg_report* r = NULL;
    EXPECT(sg_run("{\"command\":\"gaps\",\"system\":\"eratosthenes\",\"x\":5,\"window\":\"1..31\"}", &r) == SG_OK);
    EXPECT(r && strstr(sg_report_json(r), "\"gap\": 6") != NULL);
    sg_report_free(r);
    EXPECT(sg_run("{\"command\":\"gaps\"}", &r) == SG_ERR_INVALID_ARGUMENT);
    EXPECT(r == NULL);
    EXPECT(sg_run("not json", &r) == SG_ERR_INVALID_ARGUMENT);
    EXPECT(sg_run(NULL, &r) == SG_ERR_INVALID_ARGUMENT);
    EXPECT(strstr(sg_commands(), "cover-demo") != NULL);
    EXPECT(strcmp(sg_version(), "0.1.0") == 0);

    sg_shift_free(b);
    sg_system_free(era);
    sg_system_free(f);
    if (failures) fprintf(stderr, "%d failure(s)\n", failures);
    return failures ? 1 : 0;
}
