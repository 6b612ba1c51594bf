# Direct products over primes for the Eratosthenes and n^2+1 systems.
import json

import mpmath
from sympy import primerange

mpmath.mp.dps = 40


def track(kind, checkpoints):
    out = []
    prod = mpmath.mpf(1)
    last = 1
    for c in checkpoints:
        for p in primerange(last + 1, c + 1):
            if kind == "eratosthenes":
                k = 1
            else:  # n^2+1: one root mod 2, two when p = 1 mod 4
                k = 1 if p == 2 else (2 if p % 4 == 1 else 0)
            prod *= 1 - mpmath.mpf(k) / p
        last = c
        out.append({"x": c, "sigma": mpmath.nstr(prod, 25), "sigma_log_x": mpmath.nstr(prod * mpmath.log(c), 25)})
    return out


data = {
    "eratosthenes": track("eratosthenes", [10000, 100000, 1000000]),
    "poly:n^2+1": track("poly", [10000, 100000]),
}
with open("mertens.json", "w") as f:
    json.dump(data, f, indent=1)
    f.write("\n")
