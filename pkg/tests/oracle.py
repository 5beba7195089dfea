"""Independent reference implementations used only by the tests.

Nothing here imports the evaluator internals: series are plain dicts
``{Fraction exponent: int coefficient}`` and sums are enumerated over full
boxes without pruning.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Optional, Sequence

import numpy as np

Poly = Dict[Fraction, Fraction]


def poly_mul(a: Poly, b: Poly, prec: Fraction) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if e < prec:
                out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def geometric(d: Fraction, sign: int, prec: Fraction) -> Poly:
    """``1 / (1 - sign q^d)`` truncated."""
    out: Poly = {}
    m = 0
    while m * d < prec:
        out[m * d] = Fraction(sign ** m)
        m += 1
    return out


def poch(sign: int, c: Fraction, n: Optional[int], prec: Fraction, inverse: bool = False) -> Poly:
    """``prod_{j<n} (1 - sign q^(c+j))`` or its inverse, one factor at a time."""
    out: Poly = {Fraction(0): Fraction(1)}
    j = 0
    while (n is None or j < n) and c + j < prec:
        d = c + j
        if inverse:
            out = poly_mul(out, geometric(d, sign, prec), prec)
        else:
            out = poly_mul(out, {Fraction(0): Fraction(1), d: Fraction(-sign)}, prec)
        j += 1
    return out


def partitions(m: int) -> int:
    """Count partitions of ``m`` by listing them."""

    def count(rest: int, largest: int) -> int:
        if rest == 0:
            return 1
        return sum(count(rest - p, p) for p in range(min(rest, largest), 0, -1))

    return count(m, m)


def exponent(spec, n: Sequence[int]) -> Fraction:
    k = spec.dim
    e = Fraction(spec.const)
    for a in range(k):
        e += spec.lin[a] * n[a]
        for b in range(k):
            e += spec.quad[a][b] * n[a] * n[b] / 2
    return e


def _box_bound(spec, prec: Fraction) -> int:
    """Side of a box whose faces all have exponent >= prec.

    For convex exponents the set ``{E < prec}`` is convex, so it lies inside
    any box whose boundary it does not meet; for the nonnegative linear
    witness forms the exponent already exceeds ``prec`` on the far faces.
    """
    side = 2
    qf = np.array([[float(x) for x in r] for r in spec.quad])
    bf = np.array([float(x) for x in spec.lin])
    while True:
        ok = True
        for face in range(spec.dim):
            grid = np.array(list(itertools.product(range(side + 1), repeat=spec.dim - 1)), dtype=float)
            if spec.dim == 1:
                pts = np.full((1, 1), float(side))
            else:
                pts = np.insert(grid, face, side, axis=1)
            vals = 0.5 * np.einsum("ij,jk,ik->i", pts, qf, pts) + pts @ bf + float(spec.const)
            if vals.min() < float(prec) + 1e-9:
                ok = False
                break
        if ok:
            return side
        side += 1
        if side > 400:
            raise RuntimeError("no finite box found")


def box_sum(spec, prec: Fraction) -> Poly:
    """Sum the spec over the whole box with no pruning (numpy filters exponents)."""
    prec = Fraction(prec)
    side = _box_bound(spec, prec)
    pts = np.array(list(itertools.product(range(side + 1), repeat=spec.dim)), dtype=np.int64)
    qf = np.array([[float(x) for x in r] for r in spec.quad])
    bf = np.array([float(x) for x in spec.lin])
    vals = 0.5 * np.einsum("ij,jk,ik->i", pts, qf, pts) + pts @ bf + float(spec.const)
    keep = pts[vals < float(prec) + 1e-6]
    total: Poly = {}
    cache: Dict[tuple, Poly] = {}
    for row in keep:
        n = [int(x) for x in row]
        if any(sum(v * x for v, x in zip(p.vector, n)) % p.modulus for p in spec.parities):
            continue
        e = exponent(spec, n)
        if e >= prec:
            continue
        budget = prec - e
        term: Poly = {Fraction(0): Fraction(1)}
        lengths = []
        for f in spec.factors:
            L = None if f.length == "INF" else f.length(n)
            lengths.append(L)
        if any(L is not None and L < 0 and f.location == "denominator" for f, L in zip(spec.factors, lengths)):
            continue
        for f, L in zip(spec.factors, lengths):
            if L is not None and L < 0:
                raise ValueError("negative numerator length")
            key = (f.sign, f.offset, L, f.location)
            if key not in cache:
                cache[key] = poch(f.sign, f.offset, L, prec, inverse=f.location == "denominator")
            for _ in range(f.power):
                term = poly_mul(term, cache[key], budget)
        sgn = -1 if spec.signs and sum(s * x for s, x in zip(spec.signs, n)) % 2 else 1
        total = poly_add(total, {e + k: sgn * v for k, v in term.items()})
    return total


def bilateral(weight, alpha, beta, gamma, prec, ell=0, window=60) -> Poly:
    """Direct bilateral enumeration over ``|n| <= window``."""
    out: Poly = {}
    for n in range(-window, window + 1):
        if weight == "sgn":
            w = 1 if n >= 0 else -1
        elif weight == "odd":
            w = 2 * n + 1
        elif weight == "one":
            w = 1
        else:
            w = 1 if n >= abs(ell) else (-1 if n <= -abs(ell) - 1 else 0)
        e = Fraction(alpha) * n * n + Fraction(beta) * n + Fraction(gamma)
        if w and e < prec:
            out[e] = out.get(e, 0) + w
    return {e: c for e, c in out.items() if c}


def as_poly(series) -> Poly:
    """Convert a package series for comparison with oracle output."""
    return {e: c for e, c in series.items()}
