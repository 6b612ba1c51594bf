"""Regenerates composite_runs.json with sympy's primality test."""
import json
import sys

from sympy import isprime


def longest_run(f, X):
    best_start, best_len, run = 0, 0, 0
    for n in range(1, X + 1):
        if isprime(f(n)):
            run = 0
            continue
        run += 1
        if run > best_len:
            best_len, best_start = run, n - run + 1
    return best_start, best_len


cases = [
    ("n", 30, lambda n: n),
    ("n^2", 100, lambda n: n * n),
    ("n^2+1", 10000, lambda n: n * n + 1),
    ("n^2+1", 1000000, lambda n: n * n + 1),
    ("n^3+2", 10000, lambda n: n ** 3 + 2),
]
out = []
for name, X, f in cases:
    start, length = longest_run(f, X)
    out.append({"poly": name, "X": X, "start": start, "length": length})
json.dump(out, sys.stdout, indent=1)
print()
