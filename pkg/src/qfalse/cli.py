"""Command-line front end.

Exit status is 0 when every check passes, 1 on a mathematical mismatch and 2
on usage or domain errors. JSON goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from . import bailey, catalog, dilog
from .builders import NahmSpec, nahm_sum
from .errors import DomainError, QFalseError
from .report import dumps
from .series import as_rational, format_rational

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ENV_ORDER = "QFALSE_DEFAULT_ORDER"


@dataclass(frozen=True)
class RunConfig:
    default_order: Fraction = Fraction(50)
    output: str = "text"
    jobs: int = 1
    seed: Optional[int] = None  # recorded only; no computation here is random

    def __post_init__(self):
        if self.jobs < 1:
            raise DomainError("jobs must be >= 1")
        if self.default_order <= 0:
            raise DomainError("order must be positive")


def _order(text: str) -> Fraction:
    try:
        v = as_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("order must be positive")
    return v


def default_order() -> Fraction:
    raw = os.environ.get(ENV_ORDER)
    if raw is None:
        return Fraction(50)
    try:
        return _order(raw)
    except argparse.ArgumentTypeError as exc:
        raise DomainError(f"{ENV_ORDER}: {exc}") from None


def parse_range(text: str, k: Optional[int] = None) -> List[int]:
    """``"3"``, ``"1..3"``, ``"-3..3"``, ``"0,2,5"``; the symbol ``k`` stands for the current k."""
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if k is not None:
            part = part.replace("k", str(k))
        try:
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise DomainError(f"bad range {text!r}") from None
    return out


def _emit(obj) -> None:
    print(dumps(obj))


def _status_code(passed: bool) -> int:
    return EXIT_PASS if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# subcommands


def _family_params(args, k, i, ell) -> catalog.FamilyParams:
    return catalog.FamilyParams(args.order, k=k, i=i, ell=ell)


def cmd_verify(args) -> int:
    fid = catalog.FamilyId.parse(args.family)
    report = catalog.verify_family(fid, _family_params(args, args.k, args.i, args.l))
    if args.json:
        _emit(report.to_json(timing=not args.no_timing))
    else:
        print(report.summary())
    if report.status == "error":
        print(f"error: {report.message}", file=sys.stderr)
    return _status_code(report.passed)


def _run_one(task):
    fid_value, order, k, i, ell = task
    report = catalog.verify_family(catalog.FamilyId(fid_value), catalog.FamilyParams(order, k=k, i=i, ell=ell))
    return report


def _sweep_tasks(args) -> List[tuple]:
    fid = catalog.FamilyId.parse(args.family)
    schema = {info.id: info.params for info in catalog.list_families()}[fid]
    if "k" in schema and args.k is None:
        raise DomainError(f"{fid.slug} sweep needs --k")
    ks = parse_range(args.k) if "k" in schema else [None]
    tasks = []
    for k in ks:
        i_vals = parse_range(args.i if args.i is not None else "0..k", k) if "i" in schema else [None]
        ells = parse_range(args.l if args.l is not None else "0", k) if "ell" in schema else [None]
        for i in i_vals:
            if i is not None and not 0 <= i <= k:
                continue
            for ell in ells:
                tasks.append((fid.value, args.order, k, i, ell))
    if not tasks:
        raise DomainError("the parameter ranges are empty")
    for t in tasks:  # fail fast on invalid tuples before spawning workers
        catalog.validate(fid, catalog.FamilyParams(t[1], k=t[2], i=t[3], ell=t[4]))
    return tasks


def _sort_key(report) -> tuple:
    p = report.params
    return tuple((0, p[name]) if name in p else (-1, 0) for name in ("k", "i", "ell"))


def cmd_sweep(args) -> int:
    tasks = _sweep_tasks(args)
    if args.jobs < 1:
        raise DomainError("--jobs must be >= 1")
    if args.jobs == 1:
        reports = [_run_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one, tasks))
    reports.sort(key=_sort_key)
    if args.json:
        _emit([r.to_json(timing=not args.no_timing) for r in reports])
    else:
        for r in reports:
            print(r.summary())
        n_pass = sum(r.passed for r in reports)
        print(f"{n_pass}/{len(reports)} passed", file=sys.stderr)
    return _status_code(all(r.passed for r in reports))


def cmd_bailey(args) -> int:
    if args.bailey_cmd == "verify-pair":
        pair = bailey.pair_by_name(args.pair, args.ell)
        report = bailey.verify_pair(pair, args.nmax, args.order)
    elif args.bailey_cmd == "chain":
        report = bailey.verify_chain(bailey.pair_by_name(args.pair), args.k, args.order)
    else:
        pair = bailey.pair_general(args.ell)
        inst = bailey.LatticeInstance(pair, args.k, args.i, bailey.rho_exponent(pair, args.rho))
        report = bailey.verify_lattice(inst, args.order)
    if args.json:
        _emit(report.to_json(timing=not args.no_timing))
    else:
        print(report.summary())
    return _status_code(report.passed)


def cmd_dilog(args) -> int:
    ident = dilog.DilogIdentityId.parse(args.identity)
    k = args.x if ident is dilog.DilogIdentityId.FIVE_TERM and args.x is not None else args.k
    if k is None:
        raise DomainError(f"{ident.value} needs --k (or --x for five-term)")
    report = dilog.verify_dilog_identity(ident, k, args.tol)
    if args.json:
        _emit(report.to_json(timing=not args.no_timing))
    else:
        print(report.summary())
    return _status_code(report.passed)


def cmd_series(args) -> int:
    try:
        with open(args.spec_file) as fh:
            spec = NahmSpec.from_json(json.load(fh))
    except OSError as exc:
        raise DomainError(f"cannot read {args.spec_file}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"{args.spec_file} is not valid JSON: {exc}") from None
    s = nahm_sum(spec, args.order)
    if args.json:
        _emit({"order": format_rational(s.prec),
               "coefficients": [[format_rational(e), format_rational(c)] for e, c in s.items()]})
    else:
        sys.stdout.write(s.dump())
    return EXIT_PASS


def cmd_families(args) -> int:
    rows = [{"id": f.id.value, "name": f.id.slug, "params": list(f.params), "anchor": f.anchor}
            for f in catalog.list_families()]
    if args.json:
        _emit(rows)
    else:
        for r in rows:
            print(f"{r['name']:18s} ({', '.join(r['params']) or '-'})  {r['anchor']}")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep usage errors on exit code 2 with a clean message
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser(order_default: Fraction) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=_order, default=order_default,
                        help="truncation order, 'n' or 'n/d' (default %(default)s)")
    common.add_argument("--json", action="store_true", help="emit JSON on stdout")
    common.add_argument("--no-timing", action="store_true", help="report elapsed_ms as 0")

    p = _Parser(prog="qfalse", description="Exact q-series checks of false theta and multisum identities.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="check one identity instance")
    v.add_argument("family")
    v.add_argument("--k", type=int)
    v.add_argument("--i", type=int)
    v.add_argument("--l", type=int, help="shift parameter ell")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", parents=[common], help="check a grid of parameters")
    s.add_argument("family")
    s.add_argument("--k", help="range such as 1..3")
    s.add_argument("--i", help="range, may use k (default 0..k)")
    s.add_argument("--l", help="range such as -3..3 (default 0)")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bailey", help="Bailey pair, chain and lattice checks")
    bsub = b.add_subparsers(dest="bailey_cmd", required=True, parser_class=_Parser)
    vp = bsub.add_parser("verify-pair", parents=[common])
    vp.add_argument("pair", choices=["b3", "general"])
    vp.add_argument("--ell", type=int, default=0)
    vp.add_argument("--nmax", type=int, default=10)
    ch = bsub.add_parser("chain", parents=[common])
    ch.add_argument("pair", choices=["b3"])
    ch.add_argument("--k", type=int, required=True)
    la = bsub.add_parser("lattice", parents=[common])
    la.add_argument("--ell", type=int, required=True)
    la.add_argument("--k", type=int, required=True)
    la.add_argument("--i", type=int, required=True)
    la.add_argument("--rho", choices=["half", "one"], required=True)
    for sp in (vp, ch, la):
        sp.set_defaults(func=cmd_bailey)

    d = sub.add_parser("dilog", help="dilogarithm sum rules")
    d.add_argument("identity")
    d.add_argument("--k", type=int)
    d.add_argument("--x", type=int, help="argument of the five-term instance")
    d.add_argument("--tol", type=float)
    d.add_argument("--json", action="store_true")
    d.add_argument("--no-timing", action="store_true")
    d.set_defaults(func=cmd_dilog)

    se = sub.add_parser("series", parents=[common], help="expand a multi-sum given as JSON")
    se.add_argument("--spec-file", required=True)
    se.set_defaults(func=cmd_series)

    f = sub.add_parser("families", help="list identity families")
    f.add_argument("--json", action="store_true")
    f.set_defaults(func=cmd_families)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser(default_order())
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse paths
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code if code in (EXIT_PASS, EXIT_USAGE) else EXIT_USAGE
    except (QFalseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
