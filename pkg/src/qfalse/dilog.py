"""Dilogarithms, TBA fixed points and the dilogarithm sum rules they feed."""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, DomainError
from .report import NumericReport
from .series import as_rational, format_rational

PI2 = math.pi ** 2
GOLDEN_A = (math.sqrt(5.0) - 1.0) / 2.0


def li2(x: float) -> float:
    """Classical dilogarithm on ``[0, 1]``."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"li2 is only evaluated on [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return PI2 / 6
    if x > 0.5:
        return PI2 / 6 - math.log(x) * math.log1p(-x) - li2(1.0 - x)
    terms = []
    p = x
    n = 1
    while True:
        t = p / (n * n)
        terms.append(t)
        if t < 1e-18:
            break
        n += 1
        p *= x
    return math.fsum(terms)


def rogers_l(x: float) -> float:
    """Rogers dilogarithm ``Li2(x) + log(x) log(1-x) / 2`` with ``L(0) = 0`` and ``L(1) = pi^2/6``."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"rogers_l is only evaluated on [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return PI2 / 6
    if x > 0.5:
        return PI2 / 6 - rogers_l(1.0 - x)
    return li2(x) + 0.5 * math.log(x) * math.log1p(-x)


# ---------------------------------------------------------------------------
# TBA systems


@dataclass(frozen=True)
class TBASystem:
    """``(1 - Q_i)^e_i = prod_j Q_j^M_ij`` with ``e_i = 2`` where ``squared_mask`` is set."""

    matrix: Tuple[Tuple[Fraction, ...], ...]
    squared_mask: Tuple[bool, ...]

    def __post_init__(self):
        m = tuple(tuple(as_rational(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "squared_mask", tuple(bool(b) for b in self.squared_mask))
        k = len(m)
        if k == 0 or any(len(r) != k for r in m):
            raise DomainError("TBA matrix must be square and non-empty")
        if len(self.squared_mask) != k:
            raise DomainError("mask length must match the matrix")
        if any(m[i][j] != m[j][i] for i in range(k) for j in range(i)):
            raise DomainError("TBA matrix must be symmetric")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def exponents(self) -> np.ndarray:
        return np.array([2.0 if b else 1.0 for b in self.squared_mask])

    @classmethod
    def b_system(cls, k: int) -> "TBASystem":
        """``B_ij = 2 min(i, j)``, last equation squared."""
        _need(k >= 1, "k must be >= 1")
        return cls(tuple(tuple(Fraction(2 * min(i, j)) for j in range(1, k + 1)) for i in range(1, k + 1)),
                   tuple(i == k - 1 for i in range(k)))

    @classmethod
    def c_system(cls, k: int) -> "TBASystem":
        """``C_ij = 2 min(i, j) - 1``, last equation squared."""
        _need(k >= 1, "k must be >= 1")
        return cls(tuple(tuple(Fraction(2 * min(i, j) - 1) for j in range(1, k + 1)) for i in range(1, k + 1)),
                   tuple(i == k - 1 for i in range(k)))

    @classmethod
    def augmented(cls, k: int) -> "TBASystem":
        """B-system bordered by an extra variable entering every row with exponent -1."""
        _need(k >= 1, "k must be >= 1")
        b = cls.b_system(k).matrix
        rows = [list(r) + [Fraction(-1)] for r in b]
        rows.append([Fraction(-1)] * k + [Fraction(1)])
        return cls(tuple(tuple(r) for r in rows), tuple(i == k - 1 for i in range(k + 1)))

    def residuals(self, q: Sequence[float]) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        m = np.array([[float(x) for x in r] for r in self.matrix])
        lhs = (1.0 - q) ** self.exponents
        rhs = np.exp(m @ np.log(q))
        return lhs - rhs

    def to_json(self) -> dict:
        return {"matrix": [[format_rational(x) for x in r] for r in self.matrix],
                "mask": list(self.squared_mask)}

    @classmethod
    def from_json(cls, obj: dict) -> "TBASystem":
        try:
            return cls(tuple(tuple(as_rational(x) for x in r) for r in obj["matrix"]), tuple(obj["mask"]))
        except KeyError as exc:
            raise DomainError(f"TBA system JSON lacks {exc}") from None


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def solve_tba(system: TBASystem, tol: float = 1e-13, max_iter: int = 200) -> np.ndarray:
    """Damped Newton iteration in ``u = log Q`` starting from ``Q = 1/2``.

    A step is accepted only if it keeps every ``Q_i`` in ``(0, 1)`` and lowers
    the residual norm; otherwise it is halved.
    """
    m = np.array([[float(x) for x in r] for r in system.matrix])
    e = system.exponents
    k = system.dim

    def f(u):
        return e * np.log1p(-np.exp(u)) - m @ u

    u = np.full(k, math.log(0.5))
    r = f(u)
    norm = float(np.linalg.norm(r))
    for _ in range(max_iter):
        if norm <= tol:
            break
        eu = np.exp(u)
        jac = -np.diag(e * eu / (-np.expm1(u))) - m
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Jacobian: {exc}", residual=norm) from None
        t = 1.0
        while t > 1e-12:
            cand = u + t * step
            if np.all(cand < 0):
                rc = f(cand)
                nc = float(np.linalg.norm(rc))
                if nc < norm:
                    u, r, norm = cand, rc, nc
                    break
            t *= 0.5
        else:
            break
    q = np.exp(u)
    res = float(np.max(np.abs(system.residuals(q))))
    if res > 1e-12 or not np.all((q > 0) & (q < 1)):
        raise ConvergenceError(f"TBA iteration stalled with residual {res:.3e}", residual=res)
    return q


class TBAKind(enum.Enum):
    B = "B"
    C = "C"
    AUGMENTED = "AUGMENTED"


def tba_system(kind: TBAKind, k: int) -> TBASystem:
    kind = TBAKind(kind)
    return {TBAKind.B: TBASystem.b_system, TBAKind.C: TBASystem.c_system,
            TBAKind.AUGMENTED: TBASystem.augmented}[kind](k)


def closed_form_tba(kind: TBAKind, k: int) -> np.ndarray:
    """Explicit fixed points of the B, C and augmented systems."""
    kind = TBAKind(kind)
    if kind is TBAKind.B:
        _need(k >= 2, "the B-system closed form needs k >= 2")
        q = [1 - 1 / (r + 1) ** 2 for r in range(1, k)] + [k / (k + 1)]
    elif kind is TBAKind.C:
        _need(k >= 1, "k must be >= 1")
        a = GOLDEN_A
        if k == 1:
            q = [1 - 1 / (a + 1)]
        else:
            q = [a] + [1 - 1 / (a + r) ** 2 for r in range(2, k)] + [1 - 1 / (a + k)]
    else:
        _need(k >= 1, "k must be >= 1")
        q = [1 - 4 / (2 * r + 1) ** 2 for r in range(1, k)] + [(2 * k - 1) / (2 * k + 1), 0.25]
    return np.array(q)


# ---------------------------------------------------------------------------
# identities


class DilogIdentityId(enum.Enum):
    KIRILLOV = "KIRILLOV"
    TBA_DILOG = "TBA_DILOG"
    SUPER_KIRILLOV = "SUPER_KIRILLOV"
    FIVE_TERM = "FIVE_TERM"
    GOLDEN = "GOLDEN"
    SUPER_KIRILLOV_INF = "SUPER_KIRILLOV_INF"
    MELZER = "MELZER"

    @classmethod
    def parse(cls, name: str) -> "DilogIdentityId":
        key = name.strip().upper().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown dilogarithm identity {name!r}") from None


DEFAULT_TOL = {
    DilogIdentityId.FIVE_TERM: 1e-12,
    DilogIdentityId.SUPER_KIRILLOV_INF: 1e-3,
}

_MIN_K = {
    DilogIdentityId.KIRILLOV: 2,
    DilogIdentityId.TBA_DILOG: 2,
    DilogIdentityId.SUPER_KIRILLOV: 1,
    DilogIdentityId.FIVE_TERM: 2,
    DilogIdentityId.GOLDEN: 1,
    DilogIdentityId.SUPER_KIRILLOV_INF: 1,
    DilogIdentityId.MELZER: 2,
}

CROSS_CHECK_TOL = 1e-11


def _tba_sum(q: Sequence[float], squared_last: int) -> float:
    """``2 (L(1) - L(Q_last)) + sum_{others} (L(1) - L(Q_r))`` over the first ``squared_last + 1`` entries."""
    l1 = PI2 / 6
    parts = [2 * (l1 - rogers_l(q[squared_last]))]
    parts += [l1 - rogers_l(q[r]) for r in range(len(q)) if r != squared_last]
    return math.fsum(parts)


def _cross_check(kind: TBAKind, k: int) -> Tuple[np.ndarray, Optional[str]]:
    q = solve_tba(tba_system(kind, k))
    gap = float(np.max(np.abs(q - closed_form_tba(kind, k))))
    msg = None if gap <= CROSS_CHECK_TOL else f"solver and closed form differ by {gap:.3e}"
    return q, msg


def identity_value(ident: DilogIdentityId, k: int) -> Tuple[float, float, Optional[str]]:
    """``(value, target, note)``; the note is set when an internal cross-check fails."""
    L = rogers_l
    if ident is DilogIdentityId.KIRILLOV:
        v = math.fsum([2 * L(1 / (k + 1))] + [L(1 / r ** 2) for r in range(2, k + 1)])
        return v, PI2 / 6, None
    if ident is DilogIdentityId.TBA_DILOG:
        q, msg = _cross_check(TBAKind.B, k)
        return _tba_sum(q, k - 1), PI2 / 6, msg
    if ident is DilogIdentityId.SUPER_KIRILLOV:
        v = math.fsum([2 * L(2 / (2 * k + 1))] + [L(4 / (2 * r + 1) ** 2) for r in range(1, k)]
                      + [L(0.75), -L(0.5)])
        q, msg = _cross_check(TBAKind.AUGMENTED, k)
        via_tba = _tba_sum(q, k - 1) - L(0.5)
        if msg is None and abs(via_tba - v) > 1e-10:
            msg = f"TBA route gives {via_tba!r}"
        return v, PI2 / 4, msg
    if ident is DilogIdentityId.FIVE_TERM:
        x = float(k)
        v = math.fsum([L(1 - 1 / x ** 2), 2 * L(1 / x), 2 * L(x / (x + 1))])
        return v, PI2 / 2, None
    if ident is DilogIdentityId.GOLDEN:
        q, msg = _cross_check(TBAKind.C, k)
        return _tba_sum(q, k - 1), PI2 / 5, msg
    if ident is DilogIdentityId.SUPER_KIRILLOV_INF:
        v = math.fsum([L(4 / (2 * r + 1) ** 2) for r in range(1, k + 1)] + [L(0.75), -L(0.5)])
        return v, PI2 / 4, None
    if ident is DilogIdentityId.MELZER:
        s2 = math.sin(math.pi / (2 * k)) ** 2
        parts = [L(s2 / math.sin((2 * r + 1) * math.pi / (4 * k)) ** 2) for r in range(1, k)]
        parts += [L(1 - 1 / (4 * math.cos(math.pi / (4 * k)) ** 2)), -L(0.5)]
        return math.fsum(parts), PI2 * (k - 1) / (4 * k), None
    raise DomainError(f"unknown identity {ident}")


def verify_dilog_identity(ident: DilogIdentityId, k: int, tol: Optional[float] = None) -> NumericReport:
    """Evaluate one sum rule; ``k`` is the argument ``x`` for FIVE_TERM and the cutoff ``R`` for the infinite sum."""
    ident = DilogIdentityId(ident)
    if k < _MIN_K[ident]:
        raise DomainError(f"{ident.value} needs k >= {_MIN_K[ident]} (got {k})")
    tol = DEFAULT_TOL.get(ident, 1e-10) if tol is None else float(tol)
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    t0 = time.perf_counter()
    key = "x" if ident is DilogIdentityId.FIVE_TERM else "k"
    try:
        value, target, note = identity_value(ident, k)
    except ConvergenceError as exc:
        ms = int((time.perf_counter() - t0) * 1000)
        return NumericReport(ident.value, {key: k}, math.nan, math.nan, tol, "error", ms, message=str(exc))
    ok = abs(value - target) <= tol and note is None
    ms = int((time.perf_counter() - t0) * 1000)
    return NumericReport(ident.value, {key: k}, value, target, tol, "pass" if ok else "fail", ms, message=note)
