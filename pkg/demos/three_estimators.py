"""Local time at zero from three directions on a single path.

Occupation density:  time in [-eps, eps] divided by 2 eps.
Tanaka:              |w(t)| minus the dyadic Riemann integral of sign(w) dw.
Sign changes:        sum of |w| at grid points where the sign flips.
"""
from localtime_lab import (
    brownian_path,
    cross_validate,
    local_time_curve,
    local_time_occupation,
    local_time_sign_change,
    local_time_tanaka,
)

w = brownian_path(18, seed=2026)

print(" m   occupation     tanaka   signChange")
for m in (8, 10, 12, 14, 16, 18):
    occ = local_time_occupation(w, 1.0, (m + 1) // 2)
    tan = local_time_tanaka(w, 1.0, 1e-12, m).value
    sc = local_time_sign_change(w, 1.0, m)
    print(f"{m:2d}  {occ:10.5f} {tan:10.5f} {sc:12.5f}")

# all three in one call, with pairwise gaps
report = cross_validate(w, 1.0, 14, 7, 1e-6)
print({k: round(v, 5) if isinstance(v, float) else v for k, v in report.items()})

# L(t) as a function of t: nondecreasing, flat away from the zero set
curve = local_time_curve(w, "signchange", 16, 4)
for t, value in zip(curve.times, curve.values):
    print(f"L({t:.4f}) = {value:.4f}")
