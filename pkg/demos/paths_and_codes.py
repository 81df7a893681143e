"""Binary codes, random-walk paths and their Schauder coefficients.

A code of length n is a walk with slopes +-1/sqrt(n) on the grid k/n.  A
Gaussian path is built level by level from Schauder tents, and the round trip
back to coefficients is exact on dyadic points.
"""
import numpy as np

from localtime_lab import (
    brownian_path,
    complexity_proxy,
    decode_code,
    encode_path,
    random_code,
    schauder_coefficients,
    schauder_partial_sum,
)

# a short code and its path
p = decode_code("1101")
print("code 1101 ->", np.round(p.values, 4))
print("re-encoded:", encode_path(p, 4))

# a long seeded code looks incompressible
code = random_code(4096, seed=11)
print(f"4096-bit code, compression ratio proxy = {complexity_proxy(code):.3f}")

# Gaussian path on the 2**-10 grid, then back through the coefficients
w = brownian_path(10, seed=1)
xi = schauder_coefficients(w.values, 9)
back = schauder_partial_sum(xi, 9)
print("w(1) =", w.values[-1], " xi_0 =", xi.xi0)
print("max |round trip error| =", np.abs(back.values - w.values).max())

# coarse partial sums agree with the path on their own grid
for m in (2, 5, 8):
    coarse = schauder_partial_sum(xi, m)
    step = 2 ** (9 - m)
    print(f"m={m}: max error on level-{m + 1} grid =",
          np.abs(coarse.values - w.values[::step]).max())
