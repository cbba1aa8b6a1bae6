"""Command line entry point: ``capbound {bound,verify,search,reduce,count}``.

Exit codes: 0 success, 1 property violation, 2 usage error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import io
import itertools
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Optional

import mpmath

from . import bounds, counting, verify
from .errors import CapboundError, GuardExceeded
from .ff import field_of_order, make_field
from .fmt import fmt_real
from .grid_ideal import Grid, build_basis, reduce
from .poly import VarLayout, parse, to_json as poly_to_json
from .search import PhiImage, PointSet, PolyMap, kth_power_difference_witness, max_ap_free, phi_image

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class UsageError(CapboundError):
    pass


# ---- value parsing -------------------------------------------------------------

_RANGE = re.compile(r"^(-?\d+)\.\.(-?\d+)$")


def parse_number(text: str):
    """Integer, rational "8/3" or decimal "2.5" (decimals become exact fractions)."""
    text = text.strip()
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}")
    return v.numerator if v.denominator == 1 else v


def parse_values(text: str) -> list:
    """"5", "1..20" or "2,3,4"."""
    mt = _RANGE.match(text.strip())
    if mt:
        lo, hi = int(mt.group(1)), int(mt.group(2))
        if hi < lo:
            raise UsageError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [parse_number(t) for t in text.split(",")]


# ---- output --------------------------------------------------------------------

def _cell(v, digits):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, str)):
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    return fmt_real(v, digits)


def render_reports(reports, fmt: str, digits: int) -> str:
    if fmt == "json":
        objs = [r.to_json(digits) for r in reports]
        return json.dumps(objs[0] if len(objs) == 1 else objs, indent=2) + "\n"
    if fmt == "csv":
        pkeys = list(reports[0].params)
        mkeys = []
        for r in reports:
            mkeys += [k for k in r.meta if k not in mkeys]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", *pkeys, "value", "exact", "x_star", "bracket_lo", "bracket_hi", *mkeys])
        for r in reports:
            lo, hi = r.bracket if r.bracket else (None, None)
            w.writerow(
                [r.name, *(_cell(r.params[k], digits) for k in pkeys), _cell(r.value, digits),
                 _cell(r.exact, digits), _cell(r.x_star, digits), _cell(lo, digits), _cell(hi, digits),
                 *(_cell(r.meta.get(k), digits) for k in mkeys)]
            )
        return buf.getvalue()
    lines = []
    for r in reports:
        ps = " ".join(f"{k}={_cell(v, digits)}" for k, v in r.params.items())
        line = f"{r.name} {ps}: {_cell(r.value, digits)}"
        if r.exact is not None and r.exact != r.value:
            line += f" (exact {r.exact})"
        if r.x_star is not None:
            line += f" x*={_cell(r.x_star, digits)}"
        if r.meta:
            line += " [" + ", ".join(f"{k}={_cell(v, digits)}" for k, v in r.meta.items()) + "]"
        lines.append(line)
    return "\n".join(lines) + "\n"


def emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CAPBOUND_THREADS", "1")))
    except ValueError:
        return 1


def _call_reporter(args):
    name, kwargs = args
    return bounds.REPORTERS[name](**kwargs)


# ---- subcommands -----------------------------------------------------------------

BOUND_PARAMS = ("t", "d", "n", "m", "k", "q", "s", "r", "degP", "m_prime", "d_prime")


def cmd_bound(ns) -> int:
    reporter = bounds.REPORTERS[ns.name]
    sig = inspect.signature(reporter)
    required = [p for p in sig.parameters.values() if p.default is inspect.Parameter.empty]
    grids = {}
    for p in sig.parameters.values():
        if p.name == "log_base":
            continue
        raw = getattr(ns, p.name, None)
        if raw is None:
            if p.default is inspect.Parameter.empty:
                raise UsageError(f"bound {ns.name} needs --{p.name.replace('_', '-')} "
                                 f"(parameters: {', '.join(q.name for q in required)})")
            continue
        grids[p.name] = parse_values(raw)
    if ns.log_base != "e" and "log_base" in sig.parameters:
        grids["log_base"] = [ns.log_base]
    for key in grids:
        if key not in ("d", "s", "r", "log_base"):
            if any(not isinstance(v, int) for v in grids[key]):
                raise UsageError(f"--{key} must be an integer")
    names = list(grids)
    jobs = [(ns.name, dict(zip(names, combo))) for combo in itertools.product(*(grids[k] for k in names))]
    threads = _threads()
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            reports = list(ex.map(_call_reporter, jobs))
    else:
        reports = [_call_reporter(j) for j in jobs]
    if ns.name == "main_ap2" and len(reports) > 1:
        # n0: smallest n from which every tabulated row beats the comparison bound
        n0 = None
        for r in sorted(reports, key=lambda r: -r.params["n"]):
            if r.meta["beats_green"]:
                n0 = r.params["n"]
            else:
                break
        for r in reports:
            r.meta["crossover_n0"] = n0
    emit(render_reports(reports, ns.format, ns.precision), ns.output)
    return EXIT_OK


def _case_json(c: verify.Case, digits: int) -> dict:
    def conv(v):
        if isinstance(v, (mpmath.mpf, float)):
            return fmt_real(v, digits)
        if isinstance(v, Fraction):
            return str(v)
        return v

    return {"case": c.name, "ok": c.ok, **{k: conv(v) for k, v in c.detail.items()}}


def cmd_verify(ns) -> int:
    suite = verify.SUITES[ns.suite]
    kwargs = {}
    params = inspect.signature(suite).parameters
    if ns.max_n is not None:
        if "max_n" not in params:
            raise UsageError(f"suite {ns.suite} has no --max-n")
        kwargs["max_n"] = ns.max_n
    if ns.max_q is not None:
        if "max_t" not in params:
            raise UsageError(f"suite {ns.suite} has no --max-q")
        kwargs["max_t"] = ns.max_q
    for key in ("q", "n", "k"):
        v = getattr(ns, key)
        if v is not None:
            if key not in params:
                raise UsageError(f"suite {ns.suite} has no --{key}")
            kwargs[key] = v
    if ns.suite == "main-chain" and kwargs.get("n", 2) >= 4 and not ns.allow_slow:
        raise GuardExceeded("main-chain with n >= 4 runs for several minutes; pass --allow-slow")
    cases = list(suite(**kwargs))
    failed = [c for c in cases if not c.ok]
    if ns.format == "json":
        out = json.dumps({"suite": ns.suite, "passed": not failed,
                          "cases": [_case_json(c, ns.precision) for c in cases]}, indent=2) + "\n"
    else:
        lines = []
        for c in cases:
            d = _case_json(c, ns.precision)
            extra = ", ".join(f"{k}={v}" for k, v in d.items() if k not in ("case", "ok") and not isinstance(v, dict))
            lines.append(f"{'PASS' if c.ok else 'FAIL'} {ns.suite}: {c.name}" + (f" ({extra})" if extra else ""))
            if not c.ok:
                lines.append("  counterexample: " + json.dumps(d))
        lines.append(f"{ns.suite}: {len(cases) - len(failed)}/{len(cases)} passed")
        out = "\n".join(lines) + "\n"
    emit(out, ns.output)
    return EXIT_OK if not failed else EXIT_VIOLATION


def _read_pointset(path: str, F) -> PointSet:
    with (sys.stdin if path == "-" else open(path, encoding="utf-8")) as fh:
        return PointSet.from_json(json.load(fh), F)


def cmd_search(ns) -> int:
    if ns.kind == "capset":
        res = max_ap_free(ns.q, ns.n, ns.method)
        out = {"q": ns.q, "n": ns.n, "size": res.size, "nodes": res.nodes, "witness": res.witness.to_json()}
    elif ns.kind == "kpower":
        if ns.k is None or ns.points is None:
            raise UsageError("search kpower needs --k and --points")
        F = field_of_order(ns.q)
        S = _read_pointset(ns.points, F)
        w = kth_power_difference_witness(S, ns.k)
        out = {"k": ns.k, "free": w is None,
               "witness": None if w is None else {"p": list(w[0]), "q": list(w[1]), "h": list(w[2])}}
    else:  # image
        if ns.phi is None or ns.m_prime is None:
            raise UsageError("search image needs --phi and --m-prime")
        F = field_of_order(ns.q)
        comps = [parse(e, ns.m_prime, F) for e in ns.phi.split(";")]
        dp = ns.d_prime if ns.d_prime is not None else max(int(c.degree) if not c.is_zero() else 0 for c in comps)
        img: PhiImage = phi_image(PolyMap(tuple(comps), ns.m_prime, dp))
        out = {"image": img.image.to_json(), "preimage_zero_count": img.preimage_zero_count, "gcd_ok": img.gcd_ok}
    emit(json.dumps(out) + "\n", ns.output)
    return EXIT_OK


_VAR_INDEX = re.compile(r"\b[a-z](\d+)(?:_(\d+))?\b")


def _infer_n(expr: str) -> int:
    n = 1
    for a, b in _VAR_INDEX.findall(expr):
        n = max(n, int(b) if b else int(a))
    return n


def cmd_reduce(ns) -> int:
    F = make_field(ns.p, ns.e)
    if ns.grid == "full":
        n = ns.n or _infer_n(ns.poly)
        grid = Grid.full(F, n)
    else:
        try:
            alph = json.loads(ns.grid)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--grid must be 'full' or a JSON list of lists: {exc}")
        grid = Grid(F, tuple(tuple(int(a) for a in A) for A in alph))
    lay = VarLayout(ns.m, grid.n)
    P = parse(ns.poly, lay, F)
    H = reduce(P, build_basis(grid, ns.m))
    if ns.format == "json":
        emit(json.dumps(poly_to_json(H)) + "\n", ns.output)
    else:
        emit(str(H) + "\n", ns.output)
    return EXIT_OK


def cmd_count(ns) -> int:
    if ns.kind == "bnst":
        v = counting.count_B_exact(ns.n, parse_number(ns.s), ns.t)
    elif ns.kind == "D":
        v = counting.count_D(ns.n, ns.k)
    elif ns.kind == "binomial":
        v = counting.binomial(ns.a, ns.b)
    else:
        caps = tuple(int(c) for c in ns.caps.split(","))
        thr = None if ns.threshold is None else Fraction(parse_number(ns.threshold))
        v = counting.count_capped_degree(counting.CountQuery(caps, thr))
    emit(json.dumps({"count": v}) + "\n" if ns.format == "json" else f"{v}\n", ns.output)
    return EXIT_OK


# ---- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capbound", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="text"):
        p.add_argument("--format", choices=("json", "csv", "text"), default=fmt_default)
        p.add_argument("--precision", type=int, default=6, help="significant digits for reals")
        p.add_argument("--output", "-o", default=None, help="write to file instead of stdout")

    b = sub.add_parser("bound", help="evaluate a named bound (ranges like --n 1..20 give tables)")
    b.add_argument("name", choices=sorted(bounds.REPORTERS))
    for key in BOUND_PARAMS:
        b.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)
    b.add_argument("--log-base", choices=("e", "2"), default="e", help="log base in c(k, q)")
    common(b)
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(verify.SUITES))
    v.add_argument("--max-n", type=int, default=None)
    v.add_argument("--max-q", type=int, default=None)
    v.add_argument("--q", type=int, default=None)
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--k", type=int, default=None)
    v.add_argument("--allow-slow", action="store_true")
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="brute-force oracles")
    s.add_argument("kind", choices=("capset", "kpower", "image"))
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--method", choices=("bnb", "exhaustive"), default="bnb")
    s.add_argument("--points", default=None, help="PointSet JSON file ('-' for stdin)")
    s.add_argument("--phi", default=None, help="';'-separated component expressions")
    s.add_argument("--m-prime", dest="m_prime", type=int, default=None)
    s.add_argument("--d-prime", dest="d_prime", type=int, default=None)
    common(s, "json")
    s.set_defaults(func=cmd_search)

    r = sub.add_parser("reduce", help="normal form modulo the vanishing ideal of a grid power")
    r.add_argument("--p", type=int, required=True)
    r.add_argument("--e", type=int, default=1)
    r.add_argument("--grid", default="full", help="'full' or JSON alphabets, e.g. [[0,1],[0,1]]")
    r.add_argument("--n", type=int, default=None, help="dimension for --grid full")
    r.add_argument("--m", type=int, default=1)
    r.add_argument("--poly", required=True)
    common(r)
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("count", help="exact monomial counts")
    c.add_argument("kind", choices=("bnst", "D", "capped", "binomial"))
    c.add_argument("--n", type=int)
    c.add_argument("--s")
    c.add_argument("--t", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--a", type=int)
    c.add_argument("--b", type=int)
    c.add_argument("--caps")
    c.add_argument("--threshold")
    common(c)
    c.set_defaults(func=cmd_count)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        return ns.func(ns)
    except GuardExceeded as exc:
        print(f"capbound {ns.command}: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"capbound {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
