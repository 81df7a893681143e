"""``localtime-lab`` command line.

Exit codes: 0 success, 2 configuration error, 3 numeric-contract failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, LocalTimeLabError
from .experiments import (
    build_config,
    contract_ok,
    format_number,
    read_config_file,
    run,
    write_report,
)
from .fileio import read_path, write_code, write_path, write_sidecar
from .integration import IntegrandSpec, pathwise_integral
from .local_time import (
    local_time_curve,
    local_time_occupation,
    local_time_sign_change,
    local_time_tanaka,
)
from .occupation import OccupationQuery, occupation_density_estimate, occupation_time
from .path_model import decode_code
from .sampler import GENERATOR, brownian_path, complexity_proxy, random_code

EXIT_CONFIG = 2
EXIT_CONTRACT = 3

METHOD_ALIASES = {"occ": "occupation", "tanaka": "tanaka", "signs": "signchange"}
PROXY_NOTE = "compression-ratio heuristic; not a Kolmogorov complexity certificate"


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int, help="seed (experiments: seed base)")
    p.add_argument("--output", help="output file, or json/csv for single-query commands")
    p.add_argument("--format", choices=("csv", "json"), help="report format")
    p.add_argument("--quiet", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="localtime-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a seeded path (and code)")
    g.add_argument("--kind", choices=("brownian", "code"), default="brownian")
    g.add_argument("--level", type=int, default=10, help="brownian path grid level")
    g.add_argument("--n", type=int, default=1024, help="code length")
    g.add_argument("--codec", default="zlib")

    o = sub.add_parser("occupation", parents=[common], help="occupation time / density")
    o.add_argument("--path", required=True)
    o.add_argument("--t", type=float, default=1.0)
    o.add_argument("--x", type=float, default=0.0)
    win = o.add_mutually_exclusive_group(required=True)
    win.add_argument("--eps", type=float)
    win.add_argument("--n", type=int)

    i = sub.add_parser("integrate", parents=[common], help="pathwise stochastic integral")
    i.add_argument("--spec", required=True, help="sign|indplus|indminus|mollified:EPS|const:C")
    i.add_argument("--path", required=True)
    i.add_argument("--t", type=float, default=1.0)
    i.add_argument("--tol", type=float, default=1e-6)
    i.add_argument("--max-level", type=int, default=20)

    lt = sub.add_parser("localtime", parents=[common], help="local time estimators")
    lt.add_argument("--path", required=True)
    lt.add_argument("--method", choices=("occ", "tanaka", "signs", "all"), default="all")
    lt.add_argument("--t", type=float, default=1.0)
    lt.add_argument("--m", type=int, default=12)
    lt.add_argument("--n", type=int, default=6)
    lt.add_argument("--x", type=float, default=0.0)
    lt.add_argument("--tol", type=float, default=1e-6)
    lt.add_argument("--curve", type=int, metavar="LEVEL")

    for kind, help_text in (("converge", "estimator convergence study"),
                            ("dist", "distribution of L(1)"),
                            ("bound", "mollifier expectation bound"),
                            ("identity", "discrete Tanaka identity fuzz")):
        e = sub.add_parser(kind, parents=[common], help=help_text)
        e.add_argument("--seeds", type=int)
        e.add_argument("--levels", help="level range, e.g. 10..18")
        e.add_argument("--t", type=float)
        e.add_argument("--tol", type=float)
        e.add_argument("--n", type=int)
        e.add_argument("--path-level", type=int)
        e.add_argument("--workers", type=int)
    return parser


def _emit(text: str, target: str | None):
    if target:
        Path(target).write_text(text)
    else:
        sys.stdout.write(text)


def _query_output(args):
    """Single-query commands accept ``--output json|csv`` as a format choice."""
    if args.output in ("json", "csv"):
        return args.output, None
    return args.format or "json", args.output


def _csv(header, row):
    return ",".join(header) + "\n" + ",".join(format_number(v) for v in row) + "\n"


def cmd_generate(args):
    seed = args.seed if args.seed is not None else 0
    if not args.output:
        raise ConfigError("output", "generate needs --output PATH")
    base = Path(args.output)
    meta = {"seed": seed, "generator": GENERATOR}
    if args.kind == "code":
        code = random_code(args.n, seed)
        write_code(code, base.with_suffix(".code"))
        write_path(decode_code(code), base)
        meta["n"] = args.n
        if args.n >= 64:
            meta["codecName"] = args.codec
            meta["complexityProxy"] = complexity_proxy(code, args.codec)
            meta["complexityProxyNote"] = PROXY_NOTE
    else:
        write_path(brownian_path(args.level, seed), base)
        meta["maxLevel"] = args.level - 1
        meta["pathLevel"] = args.level
    write_sidecar(meta, base.with_suffix(".json"))
    if not args.quiet:
        print(f"wrote {base}", file=sys.stderr)
    return 0


def cmd_occupation(args):
    path = read_path(args.path)
    fmt, target = _query_output(args)
    if args.eps is not None:
        occ = occupation_time(path, OccupationQuery(args.t, args.x, args.eps))
        eps, value = args.eps, occ
    else:
        eps = 2.0 ** -args.n
        occ = occupation_time(path, OccupationQuery(args.t, args.x, eps))
        value = occupation_density_estimate(path, args.t, args.x, args.n)
    if fmt == "json":
        _emit(json.dumps(value) + "\n", target)
    else:
        _emit(_csv(["t", "x", "epsilon", "occupation_time", "density"],
                   [args.t, args.x, eps, occ, occ / (2 * eps)]), target)
    return 0


def cmd_integrate(args):
    try:
        spec = IntegrandSpec.parse(args.spec)
    except ValueError as exc:
        raise ConfigError("spec", str(exc)) from None
    path = read_path(args.path)
    res = pathwise_integral(spec, path, args.t, args.tol, args.max_level)
    fmt, target = _query_output(args)
    row = {"spec": str(spec), "t": args.t, "value": res.value, "gridLevel": res.grid_level,
           "cauchyGap": res.cauchy_gap, "converged": res.converged}
    if fmt == "json":
        _emit(json.dumps(row, sort_keys=True) + "\n", target)
    else:
        _emit(_csv(list(row), list(row.values())), target)
    return 0


def cmd_localtime(args):
    path = read_path(args.path)
    fmt, target = _query_output(args)
    if args.curve is not None:
        if args.method == "all":
            raise ConfigError("method", "--curve needs a single --method")
        method = METHOD_ALIASES[args.method]
        level = args.n if method == "occupation" else args.m
        curve = local_time_curve(path, method, level, args.curve, args.x)
        lines = ["k,t,L"] + [f"{k},{t:.17g},{v:.17g}"
                             for k, (t, v) in enumerate(zip(curve.times.tolist(), curve.values.tolist()))]
        _emit("\n".join(lines) + "\n", target)
        return 0
    shifted = path.shifted(args.x)
    out = {}
    if args.method in ("occ", "all"):
        out["occupation"] = local_time_occupation(path, args.t, args.n, args.x)
    if args.method in ("tanaka", "all"):
        tan = local_time_tanaka(shifted, args.t, args.tol, args.m)
        out["tanaka"] = tan.value
        out["tanakaConverged"] = tan.converged
        out["tanakaCauchyGap"] = tan.cauchy_gap
    if args.method in ("signs", "all"):
        out["signChange"] = local_time_sign_change(shifted, args.t, args.m)
    if fmt == "json":
        _emit(json.dumps(out, sort_keys=True) + "\n", target)
    else:
        _emit(_csv(list(out), list(out.values())), target)
    return 0


def cmd_experiment(args):
    file_values = read_config_file(args.config) if args.config else {}
    cfg = build_config(args.command, file_values, seeds=args.seeds, seed_base=args.seed,
                       levels=args.levels, t=args.t, tol=args.tol, n=args.n,
                       path_level=args.path_level, workers=args.workers,
                       output_path=args.output, output_format=args.format)
    report = run(cfg)
    text = write_report(report, cfg)
    if not cfg.output_path:
        sys.stdout.write(text)
    if not args.quiet:
        print(json.dumps(report["summary"], sort_keys=True, default=str), file=sys.stderr)
    return 0 if contract_ok(report) else EXIT_CONTRACT


COMMANDS = {"generate": cmd_generate, "occupation": cmd_occupation,
            "integrate": cmd_integrate, "localtime": cmd_localtime}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS.get(args.command, cmd_experiment)
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error [{exc.field}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LocalTimeLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
