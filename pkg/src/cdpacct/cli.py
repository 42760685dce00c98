"""Command-line front end for the accounting engine.

Subcommands
    compose    combine a ledger of mechanisms into one budget
    curve      tabulate a tradeoff curve as CSV
    calibrate  pick a Gaussian noise scale for a target guarantee
    group      scale a budget to groups of k individuals
    convert    translate one privacy guarantee into another
    mi-demo    mutual-information bounds on a product channel
    verify     run a named property suite against the oracles

Exit codes: 0 success, 1 verification failure, 2 usage or schema error,
3 I/O error.  Numeric output uses 12 significant digits in lowercase
scientific notation, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from . import accountant as acct
from . import bounds, mechanisms, oracle
from .divergence import OutcomeDist
from .verify import SUITES, Case, run_suite

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3

REPORT_DELTAS = (1e-5, 1e-6, 1e-8)


class CliError(Exception):
    """Fatal CLI failure carrying the process exit code."""

    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.11e}"


def _thread_count() -> int:
    raw = os.environ.get("CDP_ACCT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise CliError(EXIT_USAGE, f"CDP_ACCT_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    try:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {out_path}: {exc}")


def load_ledger(path: str) -> list[acct.LedgerEntry]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read ledger {path}: {exc}")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE, f"{path}:{exc.lineno}: ledger is not valid JSON: {exc.msg}")
    if not isinstance(doc, dict) or "entries" not in doc:
        raise CliError(EXIT_USAGE, f"{path}: ledger must be an object with an 'entries' list")
    items = doc["entries"]
    if not isinstance(items, list):
        raise CliError(EXIT_USAGE, f"{path}: 'entries' must be a list")
    if not items:
        raise CliError(EXIT_USAGE, f"{path}: empty ledger")
    entries = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise CliError(EXIT_USAGE, f"{path}: entry {i}: must be an object")
        extra = set(item) - {"kind", "params", "label"}
        if extra:
            raise CliError(EXIT_USAGE, f"{path}: entry {i}: unknown keys {sorted(extra)}")
        if "kind" not in item or "params" not in item:
            raise CliError(EXIT_USAGE, f"{path}: entry {i}: needs 'kind' and 'params'")
        if not isinstance(item["params"], dict):
            raise CliError(EXIT_USAGE, f"{path}: entry {i}: 'params' must be an object")
        label = item.get("label", "")
        if not isinstance(label, str):
            raise CliError(EXIT_USAGE, f"{path}: entry {i}: 'label' must be a string")
        try:
            entries.append(acct.LedgerEntry(item["kind"], item["params"], label))
        except (ValueError, TypeError) as exc:
            raise CliError(EXIT_USAGE, f"{path}: entry {i}: {exc}")
    return entries


def _budget_report(params: acct.ZcdpParams, header: str) -> str:
    lines = [
        f"{header} xi={fmt(params.xi)} rho={fmt(params.rho)} delta_approx={fmt(params.delta_approx)}"
    ]
    for delta in REPORT_DELTAS:
        eps = acct.eps_for_delta(params, delta)
        lines.append(f"dp point at delta={fmt(delta)}: eps={fmt(eps)}")
    return "\n".join(lines) + "\n"


def cmd_compose(args: argparse.Namespace) -> int:
    entries = load_ledger(args.ledger)
    composed = acct.compose([acct.entry_to_zcdp(e) for e in entries])
    _emit(_budget_report(composed, f"composed {len(entries)} entries:"), args.out)
    return EXIT_OK


def _parse_grid(spec: str) -> tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise CliError(EXIT_USAGE, f"grid must look like LO:HI:N, got {spec!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise CliError(EXIT_USAGE, f"grid must look like LO:HI:N, got {spec!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise CliError(EXIT_USAGE, f"grid needs finite LO < HI, got {spec!r}")
    if n < 2:
        raise CliError(EXIT_USAGE, f"grid needs at least 2 points, got {n}")
    return lo, hi, n


def _eps_exact_gaussian(eta: float, delta_target: float) -> float:
    if delta_target >= oracle.delta_exact_gaussian(eta, 0.0):
        return 0.0
    hi = 1.0
    for _ in range(200):
        if oracle.delta_exact_gaussian(eta, hi) <= delta_target:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if oracle.delta_exact_gaussian(eta, mid) <= delta_target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return hi


def _delta_of_eps_fn(params: acct.ZcdpParams, method: str) -> Callable[[float], float]:
    xi, rho, da = params.xi, params.rho, params.delta_approx
    plain = acct.ZcdpParams(xi, rho)

    def base(eps: float) -> float:
        if method == "exact_gaussian":
            return oracle.delta_exact_gaussian(rho, eps)
        if rho == 0.0:
            return 0.0 if eps >= xi else 1.0
        if eps < xi + rho:
            return 1.0
        if method == "simple":
            return min(1.0, math.exp(-((eps - xi - rho) ** 2) / (4.0 * rho)))
        return acct.zcdp_to_dp_refined(plain, eps)

    return lambda eps: min(1.0, da + (1.0 - da) * base(eps))


def _eps_of_delta_fn(params: acct.ZcdpParams, method: str) -> Callable[[float], float]:
    xi, rho, da = params.xi, params.rho, params.delta_approx

    def value(delta: float) -> float:
        if method == "refined":
            return acct.eps_for_delta(params, delta)
        prime = (delta - da) / (1.0 - da) if da < 1.0 else 1.0
        if prime <= 0.0:
            return math.inf
        if prime >= 1.0:
            return 0.0
        if method == "exact_gaussian":
            return _eps_exact_gaussian(rho, prime)
        if rho == 0.0:
            return xi
        return xi + rho + math.sqrt(4.0 * rho * math.log(1.0 / prime))

    return value


def cmd_curve(args: argparse.Namespace) -> int:
    entries = load_ledger(args.ledger)
    params = acct.compose([acct.entry_to_zcdp(e) for e in entries])
    lo, hi, n = _parse_grid(args.grid)
    if args.target == "eps_of_delta" and not (0.0 < lo and hi < 1.0):
        raise CliError(EXIT_USAGE, "eps_of_delta grid must lie inside (0, 1)")
    if args.target == "delta_of_eps" and lo < 0.0:
        raise CliError(EXIT_USAGE, "delta_of_eps grid must be non-negative")
    if args.method == "exact_gaussian":
        if params.xi != 0.0 or params.rho <= 0.0:
            raise CliError(
                EXIT_USAGE,
                "exact_gaussian requires a ledger with xi=0 and rho>0",
            )
    if args.target == "delta_of_eps":
        evaluate = _delta_of_eps_fn(params, args.method)
    else:
        evaluate = _eps_of_delta_fn(params, args.method)
    xs = [float(x) for x in np.linspace(lo, hi, n)]
    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(evaluate, xs))
    else:
        values = [evaluate(x) for x in xs]
    lines = ["x,value,method"]
    lines.extend(f"{fmt(x)},{fmt(v)},{args.method}" for x, v in zip(xs, values))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    if args.sensitivity is None:
        raise CliError(EXIT_USAGE, "calibrate requires --sensitivity")
    dp_mode = args.eps is not None or args.delta is not None
    if args.rho is not None and dp_mode:
        raise CliError(EXIT_USAGE, "give either --rho or --eps with --delta, not both")
    if args.rho is not None:
        sigma = mechanisms.calibrate_sigma_for_rho(args.sensitivity, args.rho)
        achieved = mechanisms.gaussian_rho(mechanisms.GaussianMech(args.sensitivity, sigma))
        text = f"sigma={fmt(sigma)}\nrho={fmt(achieved)} (target {fmt(args.rho)})\n"
    elif args.eps is not None and args.delta is not None:
        sigma = mechanisms.calibrate_sigma_for_dp(args.sensitivity, args.eps, args.delta)
        achieved = mechanisms.gaussian_rho(mechanisms.GaussianMech(args.sensitivity, sigma))
        delta_at = acct.zcdp_to_dp_refined(acct.ZcdpParams(0.0, achieved), args.eps)
        text = (
            f"sigma={fmt(sigma)}\n"
            f"rho={fmt(achieved)}\n"
            f"delta at eps={fmt(args.eps)}: {fmt(delta_at)} (target {fmt(args.delta)})\n"
        )
    else:
        raise CliError(EXIT_USAGE, "calibrate needs --rho, or --eps together with --delta")
    _emit(text, args.out)
    return EXIT_OK


def cmd_group(args: argparse.Namespace) -> int:
    if args.k is None or args.k < 1:
        raise CliError(EXIT_USAGE, "group requires --k >= 1")
    if args.ledger is not None:
        entries = load_ledger(args.ledger)
        params = acct.compose([acct.entry_to_zcdp(e) for e in entries])
    elif args.rho is not None:
        params = acct.ZcdpParams(0.0, args.rho)
    else:
        raise CliError(EXIT_USAGE, "group needs --ledger or --rho")
    scaled = acct.group_privacy(params, args.k)
    _emit(_budget_report(scaled, f"group of {args.k}:"), args.out)
    return EXIT_OK


def cmd_convert(args: argparse.Namespace) -> int:
    have = (args.eps is not None, args.delta is not None, args.rho is not None)
    lines = []
    if have == (True, False, False):
        linear, quadratic = acct.pure_dp_to_zcdp(args.eps)
        lines.append(f"pure dp eps={fmt(args.eps)}")
        lines.append(f"zcdp (linear form): xi={fmt(linear.xi)} rho={fmt(linear.rho)}")
        lines.append(f"zcdp (quadratic form): xi={fmt(quadratic.xi)} rho={fmt(quadratic.rho)}")
    elif have == (True, True, False):
        pt = acct.DpPoint(args.eps, args.delta)
        quad = acct.dp_to_approx_zcdp(pt)
        lin = acct.dp_to_approx_zcdp_maxdiv(pt)
        lines.append(f"approx dp eps={fmt(pt.eps)} delta={fmt(pt.delta)}")
        lines.append(
            f"approx zcdp (quadratic form): xi={fmt(quad.xi)} rho={fmt(quad.rho)}"
            f" delta_approx={fmt(quad.delta_approx)}"
        )
        lines.append(
            f"approx zcdp (linear form): xi={fmt(lin.xi)} rho={fmt(lin.rho)}"
            f" delta_approx={fmt(lin.delta_approx)}"
        )
    elif have == (False, True, True):
        params = acct.ZcdpParams(0.0, args.rho)
        simple = acct.zcdp_to_dp_simple(params, args.delta)
        refined_eps = acct.eps_for_delta(params, args.delta)
        lines.append(f"zcdp rho={fmt(args.rho)} at delta={fmt(args.delta)}")
        lines.append(f"eps (simple): {fmt(simple.eps)}")
        lines.append(f"eps (refined): {fmt(refined_eps)}")
    elif have == (True, False, True):
        params = acct.ZcdpParams(0.0, args.rho)
        refined = acct.zcdp_to_dp_refined(params, args.eps) if args.eps >= args.rho else 1.0
        implied = (
            math.exp(-((args.eps - args.rho) ** 2) / (4.0 * args.rho))
            if args.rho > 0.0 and args.eps >= args.rho
            else 1.0
        )
        lines.append(f"zcdp rho={fmt(args.rho)} at eps={fmt(args.eps)}")
        lines.append(f"delta (refined): {fmt(refined)}")
        lines.append(f"delta (simple): {fmt(implied)}")
    else:
        raise CliError(
            EXIT_USAGE,
            "convert needs --eps, or --eps with --delta, or --rho with --delta or --eps",
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_mi_demo(args: argparse.Namespace) -> int:
    eps = args.eps if args.eps is not None else 0.8
    n = args.k if args.k is not None else 3
    if not 1 <= n <= 8:
        raise CliError(EXIT_USAGE, "mi-demo supports --k between 1 and 8")
    if eps <= 0.0:
        raise CliError(EXIT_USAGE, "mi-demo needs --eps > 0")
    plus, minus = mechanisms.randomized_response(eps)
    bit = bounds.FiniteChannel((1, -1), {1: plus, -1: minus})
    channel = bounds.product_channel([bit] * n)
    params = acct.ZcdpParams(0.0, 0.5 * eps * eps)
    uniform = OutcomeDist.uniform(channel.inputs)
    mi_ind = bounds.mutual_information(uniform, channel)
    bound_ind = bounds.mi_bound(params, n, "independent")
    corr = OutcomeDist(((1,) * n, (-1,) * n), (0.5, 0.5))
    mi_corr = bounds.mutual_information(corr, channel)
    bound_gen = bounds.mi_bound(params, n, "general")
    rows = [
        ("independent prior", mi_ind, bound_ind),
        ("correlated prior", mi_corr, bound_gen),
    ]
    lines = [f"randomized response per-bit eps={fmt(eps)}, n={n} bits, rho={fmt(params.rho)}"]
    ok = True
    for name, mi, bound in rows:
        verdict = "ok" if mi <= bound else "VIOLATED"
        ok = ok and mi <= bound
        lines.append(f"{name}: mi={fmt(mi)} bound={fmt(bound)} {verdict}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def _json_number(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(fmt(x))
    return fmt(x)


def _verify_report(suite: str, cases: list[Case]) -> str:
    rows = []
    for c in cases:
        rows.append(
            "    {"
            + f'"name": {json.dumps(c.name)}, '
            + f'"pass": {"true" if c.ok else "false"}, '
            + f'"lhs": {_json_number(c.lhs)}, '
            + f'"rhs": {_json_number(c.rhs)}'
            + "}"
        )
    body = ",\n".join(rows)
    return (
        "{\n"
        + f'  "suite": {json.dumps(suite)},\n'
        + '  "cases": [\n'
        + body
        + "\n  ]\n}\n"
    )


def cmd_verify(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else 20240801
    cases = run_suite(args.suite, seed)
    width = max(len(c.name) for c in cases)
    table = []
    for c in cases:
        badge = "PASS" if c.ok else "FAIL"
        table.append(f"{badge} {c.name:<{width}} lhs={fmt(c.lhs)} rhs={fmt(c.rhs)}")
    sys.stdout.write("\n".join(table) + "\n")
    report = _verify_report(args.suite, cases)
    if args.out is not None:
        _emit(report, args.out)
    else:
        sys.stdout.write(report)
    return EXIT_OK if all(c.ok for c in cases) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdpacct",
        description="Concentrated differential privacy accounting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--ledger", type=str, default=None, help="path to a JSON ledger")
        p.add_argument("--out", type=str, default=None, help="write output here instead of stdout")
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--rho", type=float, default=None)
        p.add_argument("--sensitivity", type=float, default=None)
        p.add_argument("--k", type=int, default=None)
        p.add_argument(
            "--method",
            choices=("simple", "refined", "exact_gaussian"),
            default="refined",
        )
        p.add_argument("--grid", type=str, default="0.5:5.0:10", help="LO:HI:N")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("compose", help="compose a ledger into one budget")
    common(p)
    p.set_defaults(fn=cmd_compose, needs_ledger=True)

    p = sub.add_parser("curve", help="tabulate a tradeoff curve as CSV")
    p.add_argument(
        "target",
        nargs="?",
        choices=("delta_of_eps", "eps_of_delta"),
        default="delta_of_eps",
    )
    common(p)
    p.set_defaults(fn=cmd_curve, needs_ledger=True)

    p = sub.add_parser("calibrate", help="pick a Gaussian noise scale")
    common(p)
    p.set_defaults(fn=cmd_calibrate, needs_ledger=False)

    p = sub.add_parser("group", help="scale a budget to groups of k")
    common(p)
    p.set_defaults(fn=cmd_group, needs_ledger=False)

    p = sub.add_parser("convert", help="translate between privacy notions")
    common(p)
    p.set_defaults(fn=cmd_convert, needs_ledger=False)

    p = sub.add_parser("mi-demo", help="mutual-information bounds on a product channel")
    common(p)
    p.set_defaults(fn=cmd_mi_demo, needs_ledger=False)

    p = sub.add_parser("verify", help="run a named property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    common(p)
    p.set_defaults(fn=cmd_verify, needs_ledger=False)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "needs_ledger", False) and args.ledger is None:
        parser.error(f"{args.command} requires --ledger")
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
