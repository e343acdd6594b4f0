"""Command-line experiments.

Every subcommand writes one JSON header line (lambda, d, epsilon, kernel,
seed, ...), then its rows (CSV with a column line, or one JSON object per
line), then one JSON footer line with the verdict.  Exit status is 0 when
every exact check passed, 1 on a failed check (the witness is written to
stderr), 2 on a usage error.

CSV columns
  gen-cells     code, level, measure, vertices (exact "a/b+c/d*sqrt3")
  epsilon       lambda, epsilon, epsilon_deg, below_pi_over_6, sector_violations
  kernel-check  suite, checked, applicable, failures
  t1-verify     level, points, nonzero
  norm-probe    level, nodes, norm, max_row_sum, antisymmetry
  pv-demo       epsilon, value, kind, i
  ball-measure  center, radius, lower, upper, upper_ratio, lower_ratio
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from fractions import Fraction

import numpy as np

from .exactfield import parse_rational
from .gasket import (
    GasketParams,
    GasketPoint,
    ball_measure_bounds,
    iter_cells,
    iter_codes,
    parse_periodic_code,
    random_point,
)
from .kernel import (
    VARIANTS,
    GeometryError,
    K2Violation,
    KernelSpec,
    check_k2,
    check_sector_conditions,
    kernel_eval_exact,
    sample_k2_triples,
)
from .operator import CellFunction, build_matrix, operator_norm, truncated_apply_exact
from .pv import AnnulusNotFound, brute_force_check, oscillation_exact, pv_trace

AD_RATIO = 3.01
MAX_DEPTH = {"gen-cells": 8, "t1-verify": 8, "norm-probe": 8, "pv-demo": 40, "epsilon": 8}


class CheckFailed(Exception):
    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, Fraction):
        return str(v)
    return v


def _jsonable(v):
    # JSON keeps floats as numbers (repr round-trips); exact values become strings
    return v if isinstance(v, (float, int, bool, str, type(None))) else _fmt(v)


class Emitter:
    def __init__(self, stream, fmt: str, columns: list[str]):
        self.stream = stream
        self.fmt = fmt
        self.columns = columns
        self._csv = csv.writer(stream, lineterminator="\n") if fmt == "csv" else None

    def header(self, data: dict):
        self.stream.write(json.dumps({k: _jsonable(v) for k, v in data.items()}, sort_keys=True) + "\n")
        if self._csv:
            self._csv.writerow(self.columns)

    def row(self, *values):
        if self._csv:
            self._csv.writerow([_fmt(v) for v in values])
        else:
            vals = [_jsonable(v) for v in values]
            self.stream.write(json.dumps(dict(zip(self.columns, vals)), sort_keys=True) + "\n")

    def footer(self, data: dict):
        self.stream.write(json.dumps(data, sort_keys=True, default=_fmt) + "\n")


# -- subcommands ----------------------------------------------------------


def cmd_gen_cells(args, spec, out):
    out.header({**spec.header(), "seed": args.seed, "depth": args.depth})
    n = 0
    for c in iter_cells(args.depth, spec.params):
        j = c.to_json()
        out.row(j["code"], j["level"], j["measure"], json.dumps(j["vertices"]))
        n += 1
    out.footer({"status": "ok", "cells": n})


def cmd_epsilon(args, spec, out):
    out.header({**spec.header(), "seed": args.seed, "depth": args.depth})
    violations = check_sector_conditions(spec.params, args.depth)
    below = spec.epsilon < math.pi / 6
    out.row(spec.header()["lambda"], spec.epsilon, math.degrees(spec.epsilon), below, len(violations))
    if violations or not below:
        raise CheckFailed("sector conditions violated", {"violations": violations[:10]})
    out.footer({"status": "ok"})


def cmd_kernel_check(args, spec, out):
    if spec.variant != "plateau":
        raise CheckFailed("kernel-check needs the plateau kernel", {"kernel": spec.variant})
    rng = random.Random(args.seed)
    params = spec.params
    out.header({**spec.header(), "seed": args.seed, "samples": args.samples})
    for _ in range(args.samples):
        x, y = random_point(rng, params), random_point(rng, params)
        if x.point == y.point:
            continue
        kxy, kyx = kernel_eval_exact(x.point, y.point, spec), kernel_eval_exact(y.point, x.point, spec)
        if kxy != -kyx:
            raise CheckFailed("antisymmetry", {"x": x.code_text(), "y": y.code_text()})
        r = math.sqrt(float((y.point - x.point).norm_sq()))
        if abs(float(kxy)) * r**params.d > params.regularity_c + 1e-9:
            raise CheckFailed("size estimate", {"x": x.code_text(), "y": y.code_text()})
    out.row("antisymmetry", args.samples, args.samples, 0)
    out.row("size", args.samples, args.samples, 0)
    applicable = 0
    for x, z, y in sample_k2_triples(rng, params, args.samples):
        try:
            if check_k2(x.point, z.point, y.point, spec) == "holds":
                applicable += 1
        except K2Violation as exc:
            raise CheckFailed("k2", {"x": x.code_text(), "z": z.code_text(), "y": y.code_text()}) from exc
    out.row("k2", args.samples, applicable, 0)
    out.footer({"status": "ok", "failures": 0})


def cmd_t1_verify(args, spec, out):
    if spec.variant != "plateau":
        raise CheckFailed("t1-verify needs the plateau kernel", {"kernel": spec.variant})
    params = spec.params
    one = CellFunction.constant(0)
    js = (1, 2, 3) if args.vertices == "all" else (1,)
    points = [GasketPoint.vertex(c, j, params) for c in iter_codes(args.depth) for j in js]
    out.header({**spec.header(), "seed": args.seed, "depth": args.depth, "vertices": args.vertices})
    nonzero_total = 0
    witness = None
    for n in range(1, args.depth + 1):
        nonzero = 0
        for x in points:
            v = truncated_apply_exact(one, x, n, spec)
            if v != 0:
                nonzero += 1
                witness = witness or {"x": x.code_text(), "n": n, "value": str(v)}
        nonzero_total += nonzero
        out.row(n, len(points), nonzero)
    if witness:
        raise CheckFailed(f"T^n(1) != 0 at {nonzero_total} (point, level) pairs", witness)
    report = f"{nonzero_total} nonzero (all exact zero), {len(points)} points x {args.depth} levels"
    out.footer({"status": "ok", "report": report})


def cmd_norm_probe(args, spec, out):
    out.header({**spec.header(), "seed": args.seed, "max_level": args.max_level})
    norms = []
    for n in range(1, args.max_level + 1):
        a = build_matrix(n, spec)
        nm = operator_norm(a, seed=args.seed)
        norms.append(nm)
        scale = float(np.abs(a.entries).max()) if a.size > 1 else 1.0
        out.row(n, a.size, nm, float(np.abs(a.entries.sum(axis=1)).max()), float(np.abs(a.entries + a.entries.T).max()) / scale)
    out.footer({"status": "ok", "sup_norm": max(norms)})


def cmd_pv_demo(args, spec, out):
    if spec.variant != "plateau":
        raise CheckFailed("pv-demo needs the plateau kernel", {"kernel": spec.variant})
    z = parse_periodic_code(args.code, spec.params)
    out.header({**spec.header(), "seed": args.seed, "code": z.code_text(), "depth": args.depth})
    try:
        rows, certs = pv_trace(z, args.depth, spec, m=args.m)
    except AnnulusNotFound as exc:
        raise CheckFailed(str(exc), {"undecided": [list(c) for c in exc.undecided[:10]]}) from exc
    for r in rows:
        out.row(r.epsilon, r.value, r.kind, r.i)
    bundle = []
    for c in certs:
        osc = oscillation_exact(c, spec)
        problems = brute_force_check(c) if args.verify else []
        if problems or osc != Fraction(1, 3**c.m):
            raise CheckFailed("certificate", {**c.to_json(), "problems": problems})
        bundle.append({**c.to_json(), "oscillation": str(osc)})
    if args.certs:
        with open(args.certs, "w") as fh:
            json.dump(bundle, fh, indent=1, sort_keys=True)
    out.footer({"status": "ok", "certificates": bundle})


def cmd_ball_measure(args, spec, out):
    rng = random.Random(args.seed)
    params = spec.params
    out.header({**spec.header(), "seed": args.seed, "samples": args.samples})
    worst = 0.0
    for _ in range(args.samples):
        x = random_point(rng, params, prefix_len=10)
        r = Fraction(rng.randint(1, 10**6), 10**6)
        b = ball_measure_bounds(x.point, r, params)
        rd = float(r) ** params.d
        up, lo = float(b.upper) / rd, rd / float(b.lower) if b.lower else math.inf
        worst = max(worst, up, lo)
        out.row(x.code_text(), r, b.lower, b.upper, up, lo)
    if worst > AD_RATIO:
        raise CheckFailed("AD regularity bound exceeded", {"worst_ratio": worst})
    out.footer({"status": "ok", "worst_ratio": worst})


COMMANDS = {
    "gen-cells": (cmd_gen_cells, ["code", "level", "measure", "vertices"]),
    "epsilon": (cmd_epsilon, ["lambda", "epsilon", "epsilon_deg", "below_pi_over_6", "sector_violations"]),
    "kernel-check": (cmd_kernel_check, ["suite", "checked", "applicable", "failures"]),
    "t1-verify": (cmd_t1_verify, ["level", "points", "nonzero"]),
    "norm-probe": (cmd_norm_probe, ["level", "nodes", "norm", "max_row_sum", "antisymmetry"]),
    "pv-demo": (cmd_pv_demo, ["epsilon", "value", "kind", "i"]),
    "ball-measure": (cmd_ball_measure, ["center", "radius", "lower", "upper", "upper_ratio", "lower_ratio"]),
}


def _lambda(text: str) -> GasketParams:
    try:
        return GasketParams(parse_rational(text))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gasket-si",
        description="Singular integrals on lambda-Sierpinski gaskets.",
        epilog=__doc__.split("\n\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="params", type=_lambda, default="1/4", help="contraction ratio p/q in (0, 1/3)")
    common.add_argument("--kernel", choices=VARIANTS, default="plateau")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write to FILE instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-cells", parents=[common], help="dump exact cells")
    p.add_argument("--depth", type=int, default=2)
    p = sub.add_parser("epsilon", parents=[common], help="sector half-width and sector conditions")
    p.add_argument("--depth", type=int, default=6)
    p = sub.add_parser("kernel-check", parents=[common], help="antisymmetry, size and k2 suites")
    p.add_argument("--samples", type=int, default=1000)
    p = sub.add_parser("t1-verify", parents=[common], help="exact T^n(1) = 0 on cell vertices")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--vertices", choices=("first", "all"), default="first", help="first vertex of each cell, or all three")
    p = sub.add_parser("norm-probe", parents=[common], help="operator norms of the level-n matrices")
    p.add_argument("--max-level", type=int, default=5)
    p = sub.add_parser("pv-demo", parents=[common], help="certified annuli and the truncation trace")
    p.add_argument("--code", default="(12)^inf", help='eventually periodic code, e.g. "(3)(12)^inf"')
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--m", type=int, default=None, help="fix m instead of searching")
    p.add_argument("--certs", help="also write the certificate bundle to FILE")
    p.add_argument("--no-verify", dest="verify", action="store_false", help="skip the brute-force re-check")
    p = sub.add_parser("ball-measure", parents=[common], help="AD-regularity ratios on random balls")
    p.add_argument("--samples", type=int, default=50)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key in ("depth", "max_level"):
        cap = MAX_DEPTH.get(args.command)
        val = getattr(args, key, None)
        if val is not None and (val < 0 or (cap is not None and val > cap)):
            parser.error(f"--{key.replace('_', '-')} must lie in [0, {cap}]")
    if getattr(args, "samples", 1) < 1:
        parser.error("--samples must be positive")
    if isinstance(args.params, str):
        args.params = _lambda(args.params)
    spec = KernelSpec.build(args.params, args.kernel)
    func, columns = COMMANDS[args.command]
    buf = io.StringIO()
    status = 0
    try:
        func(args, spec, Emitter(buf, args.format, columns))
    except (CheckFailed, GeometryError) as exc:
        witness = getattr(exc, "witness", {})
        sys.stderr.write(json.dumps({"error": str(exc), "witness": witness}, sort_keys=True, default=str) + "\n")
        status = 1
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
