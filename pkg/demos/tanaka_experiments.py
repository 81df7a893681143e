"""Small versions of the seeded experiments.

Each report is deterministic for a given config; the CLI runs the same thing
with ``localtime-lab converge|dist|bound|identity``.
"""
import json

from localtime_lab.experiments import build_config, render, run

# discrete identity on fuzzed sequences
print(json.loads(render(run(build_config("identity", seeds=5000)), build_config("identity")))["summary"])

# estimator agreement as the grid refines
cfg = build_config("converge", seeds=10, levels="8..13", path_level=15)
conv = run(cfg)
for row in conv["rows"]:
    print(f"m={row['m']:2d}  mean L: occ {row['occupation']:.4f}  tanaka {row['tanaka']:.4f}"
          f"  signs {row['signChange']:.4f}  max gap {row['maxPairwiseDev']:.4f}")
print("fitted log2 slope:", round(conv["summary"]["fittedRateExponent"], 3))

# mean of L(1) against sqrt(2/pi)
dist = run(build_config("dist", seeds=5000, levels="10..10"))
print({k: round(v, 4) if isinstance(v, float) else v for k, v in dist["summary"].items()})

# mollifier mean-square gap against eps/(3 sqrt(2 pi))
for row in run(build_config("bound", seeds=2000, levels="2..6", path_level=10))["rows"]:
    print(f"n={row['n']}  estimate {row['estimate']:.3e}  bound {row['bound']:.3e}  ok={row['ok']}")
