"""Series constructors: q-Pochhammer symbols, bilateral theta-type sums and
parity-constrained multi-dimensional hypergeometric (Nahm-type) sums.

Conventions: ``(a; q^m)_n = prod_{j<n} (1 - a q^{mj})``. A
:class:`PochhammerFactor` with ``sign=+1`` and offset ``c`` stands for
``(q^c)_L`` and with ``sign=-1`` for ``(-q^c)_L``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import series as qs
from .errors import (
    DivergenceError,
    DomainError,
    NegativeLengthError,
    WitnessViolationError,
)
from .series import QSeries, RationalLike, as_rational, format_rational

INF = "INF"


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _slot_scale(*values: Fraction) -> int:
    d = 1
    for v in values:
        d = _lcm(d, Fraction(v).denominator)
    return d


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")


# ---------------------------------------------------------------------------
# dense integer kernels (scale-D slot lists)


def _times_binomial(a: list, d: int, sign: int) -> None:
    """In place: a <- a * (1 - sign q^d), truncated to len(a)."""
    for s in range(len(a) - 1, d - 1, -1):
        if a[s - d]:
            a[s] -= sign * a[s - d]


def _over_binomial(a: list, d: int, sign: int) -> None:
    """In place: a <- a / (1 - sign q^d), truncated to len(a)."""
    for s in range(d, len(a)):
        if a[s - d]:
            a[s] += sign * a[s - d]


def _step_exponents(c: Fraction, n: Optional[int], prec: Fraction, step: Fraction = Fraction(1)):
    j = 0
    while n is None or j < n:
        e = c + step * j
        if e >= prec:
            break
        yield e
        j += 1


# ---------------------------------------------------------------------------
# Pochhammer symbols


def pochhammer_finite(sign: int, c: RationalLike, n: int, prec: RationalLike,
                      step: RationalLike = 1) -> QSeries:
    """``prod_{j=0}^{n-1} (1 - sign q^(c + step*j))`` truncated at ``prec``."""
    _check_sign(sign)
    c, prec, step = as_rational(c), as_rational(prec), as_rational(step)
    if n < 0:
        raise NegativeLengthError(f"Pochhammer length {n} is negative")
    if c < 0:
        raise DomainError("negative offset would create a Laurent tail")
    scale = _slot_scale(c, prec, step)
    a = [0] * int(prec * scale)
    if a:
        a[0] = 1
    for e in _step_exponents(c, n, prec, step):
        if e == 0:
            # factor (1 - sign) is a constant
            a = [(1 - sign) * v for v in a]
            continue
        _times_binomial(a, int(e * scale), sign)
    return QSeries.from_dense(a, scale)


def pochhammer_infinite(sign: int, c: RationalLike, prec: RationalLike,
                        step: RationalLike = 1) -> QSeries:
    """``(sign-adjusted q^c; q^step)_inf``; factors at or above ``prec`` are 1."""
    _check_sign(sign)
    c, prec, step = as_rational(c), as_rational(prec), as_rational(step)
    if c <= 0 or step <= 0:
        raise DivergenceError(f"infinite product needs positive offset and step, got c={c}, step={step}")
    scale = _slot_scale(c, prec, step)
    a = [0] * int(prec * scale)
    if a:
        a[0] = 1
    for e in _step_exponents(c, None, prec, step):
        _times_binomial(a, int(e * scale), sign)
    return QSeries.from_dense(a, scale)


def pochhammer_inverse(sign: int, c: RationalLike, n: Optional[int], prec: RationalLike) -> QSeries:
    """``1 / prod_{j<n} (1 - sign q^(c+j))`` (``n=None`` for the infinite product)."""
    _check_sign(sign)
    c, prec = as_rational(c), as_rational(prec)
    if n is not None and n < 0:
        raise NegativeLengthError(f"Pochhammer length {n} is negative")
    if c <= 0:
        raise DivergenceError("inverse Pochhammer needs a positive offset")
    scale = _slot_scale(c, prec)
    a = [0] * int(prec * scale)
    if a:
        a[0] = 1
    for e in _step_exponents(c, n, prec):
        _over_binomial(a, int(e * scale), sign)
    return QSeries.from_dense(a, scale)


def euler_inverse(prec: RationalLike) -> QSeries:
    """``1/(q)_inf``: the partition generating function."""
    prec = as_rational(prec)
    if prec <= 0:
        raise DomainError("precision must be positive")
    return qs.invert(pochhammer_infinite(1, 1, prec))


def triple_pochhammer_infinite(c1: RationalLike, c2: RationalLike, c3: RationalLike,
                               m: RationalLike, prec: RationalLike) -> QSeries:
    """``(q^c1, q^c2, q^c3; q^m)_inf``."""
    m = as_rational(m)
    if m <= 0:
        raise DivergenceError("step must be positive")
    out = qs.one(prec)
    for c in (c1, c2, c3):
        if as_rational(c) <= 0:
            raise DivergenceError(f"offset {c} must be positive")
        out = qs.mul(out, pochhammer_infinite(1, c, prec, step=m))
    return out


# ---------------------------------------------------------------------------
# bilateral sums


class Weight(enum.Enum):
    ONE = "one"
    SGN = "sgn"
    ODD = "odd"
    SGN_SHIFTED = "sgn_shifted"


@dataclass(frozen=True)
class BilateralSpec:
    """Sum over ``n in Z`` of ``w(n) q^(alpha n^2 + beta n + gamma)``.

    ``alternating`` adds a ``(-1)^n`` factor and ``one_plus_qn`` multiplies each
    term by ``(1 + q^n)``. For ``SGN_SHIFTED`` the weight is +1 on ``n >= |ell|``,
    -1 on ``n <= -|ell|-1`` and 0 in between.
    """

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    weight: Weight = Weight.SGN
    ell: int = 0
    alternating: bool = False
    one_plus_qn: bool = False

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.alpha <= 0:
            raise DomainError("alpha must be positive for the sum to truncate")

    @classmethod
    def completed_square(cls, alpha: RationalLike, shift: RationalLike, offset: RationalLike = 0,
                         **kw) -> "BilateralSpec":
        """Exponent written as ``alpha (n + shift)^2 + offset``."""
        alpha, shift, offset = as_rational(alpha), as_rational(shift), as_rational(offset)
        return cls(alpha, 2 * alpha * shift, alpha * shift * shift + offset, **kw)

    def exponent(self, n: int) -> Fraction:
        return self.alpha * n * n + self.beta * n + self.gamma

    def weight_at(self, n: int) -> int:
        w = self.weight
        if w is Weight.ONE:
            v = 1
        elif w is Weight.SGN:
            v = 1 if n >= 0 else -1
        elif w is Weight.ODD:
            v = 2 * n + 1
        else:
            m = abs(self.ell)
            v = 1 if n >= m else (-1 if n <= -m - 1 else 0)
        if self.alternating and n % 2:
            v = -v
        return v

    def valuation(self) -> Fraction:
        """Least exponent carrying a nonzero weight (before any cancellation)."""
        m = abs(self.ell) if self.weight is Weight.SGN_SHIFTED else 0
        best = None
        for t in ([0, 1] if self.one_plus_qn else [0]):
            beta = self.beta + t
            vertex = -beta / (2 * self.alpha)
            # a convex exponent is least at the vertex or, when that is excluded, at an edge of the support
            for n in (math.floor(vertex), math.ceil(vertex), m, -m - 1, 0):
                if self.weight_at(n):
                    e = self.alpha * n * n + beta * n + self.gamma
                    best = e if best is None or e < best else best
        return best


def _window(alpha: Fraction, beta: Fraction, gamma: Fraction, prec: Fraction) -> range:
    # integers n with alpha n^2 + beta n + gamma < prec (a superset, padded by one)
    disc = float(beta) ** 2 - 4 * float(alpha) * float(gamma - prec)
    if disc < 0:
        return range(0)
    r = math.sqrt(disc)
    lo = math.floor((-float(beta) - r) / (2 * float(alpha))) - 1
    hi = math.ceil((-float(beta) + r) / (2 * float(alpha))) + 1
    return range(lo, hi + 1)


def bilateral_sum(spec: BilateralSpec, prec: RationalLike) -> QSeries:
    """Truncated bilateral sum; every contributing exponent must be ``>= 0``."""
    prec = as_rational(prec)
    shifts = [0, 1] if spec.one_plus_qn else [0]
    terms: Dict[Fraction, int] = {}
    for t in shifts:
        beta = spec.beta + t
        for n in _window(spec.alpha, beta, spec.gamma, prec):
            e = spec.alpha * n * n + beta * n + spec.gamma
            if e >= prec:
                continue
            w = spec.weight_at(n)
            if not w:
                continue
            if e < 0:
                raise DomainError(f"term n={n} has negative exponent {e}")
            terms[e] = terms.get(e, 0) + w
    return QSeries.from_terms(terms, prec)


# ---------------------------------------------------------------------------
# multi-sums


@dataclass(frozen=True)
class AffineLength:
    """``coeffs . n + const``; evaluation must land on an integer."""

    coeffs: Tuple[Fraction, ...]
    const: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rational(c) for c in self.coeffs))
        object.__setattr__(self, "const", as_rational(self.const))

    def __call__(self, n: Sequence[int]) -> int:
        v = self.const + sum(c * x for c, x in zip(self.coeffs, n) if c)
        if v.denominator != 1:
            raise DomainError(f"length {v} at n={tuple(n)} is not an integer")
        return v.numerator

    @property
    def last_index(self) -> int:
        """Largest index with a nonzero coefficient, -1 for a constant."""
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1


@dataclass(frozen=True)
class PochhammerFactor:
    sign: int
    offset: Fraction
    length: object  # AffineLength or INF
    location: str = "denominator"
    power: int = 1

    def __post_init__(self):
        _check_sign(self.sign)
        object.__setattr__(self, "offset", as_rational(self.offset))
        if self.offset <= 0:
            raise DomainError("factor offset must be positive")
        if self.location not in ("numerator", "denominator"):
            raise DomainError(f"bad factor location {self.location!r}")
        if self.power < 1:
            raise DomainError("factor power must be >= 1")
        if self.length != INF and not isinstance(self.length, AffineLength):
            raise DomainError("length must be an AffineLength or INF")

    @property
    def is_denominator(self) -> bool:
        return self.location == "denominator"

    def series(self, length: Optional[int], prec: Fraction) -> QSeries:
        """The factor's own series (inverted when in the denominator) at ``length``."""
        if self.is_denominator:
            s = pochhammer_inverse(self.sign, self.offset, length, prec)
        elif length is None:
            s = pochhammer_infinite(self.sign, self.offset, prec)
        else:
            s = pochhammer_finite(self.sign, self.offset, length, prec)
        return s ** self.power if self.power > 1 else s


def qpoch(dim: int, coeffs: Dict[int, RationalLike], const: RationalLike = 0, *, sign: int = 1,
          offset: RationalLike = 1, location: str = "denominator", power: int = 1) -> PochhammerFactor:
    """Shorthand: factor with length ``sum coeffs[i]*n_i + const`` over ``dim`` indices."""
    vec = [Fraction(0)] * dim
    for i, c in coeffs.items():
        vec[i] = as_rational(c)
    return PochhammerFactor(sign, as_rational(offset), AffineLength(tuple(vec), as_rational(const)),
                            location, power)


@dataclass(frozen=True)
class Parity:
    vector: Tuple[int, ...]
    modulus: int = 2

    def __post_init__(self):
        object.__setattr__(self, "vector", tuple(int(v) for v in self.vector))
        if self.modulus < 2:
            raise DomainError("parity modulus must be >= 2")

    def holds(self, n: Sequence[int]) -> bool:
        return sum(v * x for v, x in zip(self.vector, n)) % self.modulus == 0

    @property
    def last_index(self) -> int:
        for i in range(len(self.vector) - 1, -1, -1):
            if self.vector[i]:
                return i
        return -1


class BoundKind(enum.Enum):
    LINEAR = "LINEAR"
    QUADRATIC = "QUADRATIC"


@dataclass(frozen=True)
class NahmSpec:
    """Declarative multi-sum

    ``sum_{n >= 0, parities} (-1)^(signs.n) q^(n.Q.n/2 + lin.n + const) * factors``.

    ``bound_hint`` selects how termination is certified: LINEAR needs a
    positive ``witness`` vector ``c`` with ``E(n) - const >= c.n``; QUADRATIC
    needs ``quad`` positive definite.
    """

    dim: int
    quad: Tuple[Tuple[Fraction, ...], ...]
    lin: Tuple[Fraction, ...]
    const: Fraction = Fraction(0)
    factors: Tuple[PochhammerFactor, ...] = ()
    parities: Tuple[Parity, ...] = ()
    bound_hint: BoundKind = BoundKind.QUADRATIC
    witness: Optional[Tuple[Fraction, ...]] = None
    signs: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        k = self.dim
        if k < 1:
            raise DomainError("dim must be >= 1")
        quad = tuple(tuple(as_rational(x) for x in row) for row in self.quad)
        if len(quad) != k or any(len(r) != k for r in quad):
            raise DomainError("quad must be dim x dim")
        for i in range(k):
            for j in range(i):
                if quad[i][j] != quad[j][i]:
                    raise DomainError("quad must be symmetric")
        lin = tuple(as_rational(x) for x in self.lin)
        if len(lin) != k:
            raise DomainError("lin must have length dim")
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "const", as_rational(self.const))
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "parities", tuple(self.parities))
        object.__setattr__(self, "bound_hint", BoundKind(self.bound_hint))
        signs = tuple(self.signs) if self.signs is not None else (0,) * k
        object.__setattr__(self, "signs", tuple(int(s) % 2 for s in signs))
        for f in self.factors:
            if f.length != INF and len(f.length.coeffs) != k:
                raise DomainError("factor length has the wrong number of coefficients")
        for p in self.parities:
            if len(p.vector) != k:
                raise DomainError("parity vector has the wrong length")
        if self.bound_hint is BoundKind.LINEAR:
            if self.witness is None or len(self.witness) != k:
                raise DomainError("LINEAR bound needs a witness vector of length dim")
            w = tuple(as_rational(x) for x in self.witness)
            if any(x <= 0 for x in w):
                raise DomainError("witness entries must be positive")
            object.__setattr__(self, "witness", w)
        elif not _is_positive_definite(quad):
            raise DomainError("QUADRATIC bound needs a positive definite quad")

    def exponent(self, n: Sequence[int]) -> Fraction:
        k = self.dim
        e = self.const
        for i in range(k):
            if n[i]:
                e += self.lin[i] * n[i]
                e += self.quad[i][i] * n[i] * n[i] / 2
                for j in range(i + 1, k):
                    if n[j]:
                        e += self.quad[i][j] * n[i] * n[j]
        return e

    def scale(self, prec: RationalLike = 1) -> int:
        """Smallest D with every exponent (and ``prec``) in ``Z/D``."""
        vals = [as_rational(prec), self.const]
        vals += list(self.lin)
        for i in range(self.dim):
            vals.append(self.quad[i][i] / 2)
            vals += [self.quad[i][j] for j in range(i + 1, self.dim)]
        vals += [f.offset for f in self.factors]
        return _slot_scale(*vals)

    # -- JSON ------------------------------------------------------------------

    def to_json(self) -> dict:
        def length(f):
            if f.length == INF:
                return INF
            return {"coeffs": [format_rational(c) for c in f.length.coeffs],
                    "const": format_rational(f.length.const)}

        out = {
            "dim": self.dim,
            "quad": [[format_rational(x) for x in row] for row in self.quad],
            "lin": [format_rational(x) for x in self.lin],
            "const": format_rational(self.const),
            "factors": [
                {"sign": f.sign, "offset": format_rational(f.offset), "length": length(f),
                 "location": f.location, "power": f.power}
                for f in self.factors
            ],
            "parities": [{"vector": list(p.vector), "modulus": p.modulus} for p in self.parities],
            "bound_hint": {"kind": self.bound_hint.value},
        }
        if self.witness is not None:
            out["bound_hint"]["witness"] = [format_rational(x) for x in self.witness]
        if any(self.signs):
            out["signs"] = list(self.signs)
        return out

    @classmethod
    def from_json(cls, obj) -> "NahmSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        factors = []
        for f in obj.get("factors", []):
            ln = f["length"]
            length = INF if ln == INF else AffineLength(tuple(Fraction(c) for c in ln["coeffs"]),
                                                        Fraction(ln.get("const", "0")))
            factors.append(PochhammerFactor(int(f["sign"]), Fraction(f["offset"]), length,
                                            f.get("location", "denominator"), int(f.get("power", 1))))
        hint = obj.get("bound_hint", {"kind": "QUADRATIC"})
        if isinstance(hint, str):
            hint = {"kind": hint}
        witness = hint.get("witness")
        return cls(
            dim=int(obj["dim"]),
            quad=tuple(tuple(Fraction(x) for x in row) for row in obj["quad"]),
            lin=tuple(Fraction(x) for x in obj["lin"]),
            const=Fraction(obj.get("const", "0")),
            factors=tuple(factors),
            parities=tuple(Parity(tuple(p["vector"]), int(p.get("modulus", 2)))
                           for p in obj.get("parities", [])),
            bound_hint=BoundKind(hint["kind"]),
            witness=tuple(Fraction(x) for x in witness) if witness is not None else None,
            signs=tuple(obj["signs"]) if "signs" in obj else None,
        )


def _is_positive_definite(m: Tuple[Tuple[Fraction, ...], ...]) -> bool:
    # exact LDL^T
    k = len(m)
    a = [list(r) for r in m]
    for i in range(k):
        if a[i][i] <= 0:
            return False
        for j in range(i + 1, k):
            f = a[j][i] / a[i][i]
            for t in range(i, k):
                a[j][t] -= f * a[i][t]
    return True


# -- packed-integer kernel --------------------------------------------------
#
# Series with integer coefficients c_0..c_{S-1} are packed into one Python
# int sum c_i 2^(B i). Products of packed ints are Cauchy products as long as
# every coefficient that matters stays below 2^(B-1) in absolute value, which
# the majorant bound computed in nahm_sum guarantees.


class _Packer:
    def __init__(self, slots: int, bits: int):
        self.slots = slots
        self.bits = bits
        self._masks: Dict[int, Tuple[int, int, int]] = {}

    def pack(self, values: Sequence[int]) -> int:
        v = 0
        b = self.bits
        for c in reversed(values[: self.slots]):
            v = (v << b) + c
        return v

    def truncate(self, v: int, t: int) -> int:
        if t <= 0:
            return 0
        m = self._masks.get(t)
        if m is None:
            nb = t * self.bits
            m = ((1 << nb) - 1, nb - 1, 1 << nb)
            self._masks[t] = m
        low = v & m[0]
        if low >> m[1]:
            low -= m[2]
        return low

    def unpack(self, v: int) -> List[int]:
        b = self.bits
        mask = (1 << b) - 1
        half = 1 << (b - 1)
        full = 1 << b
        out = []
        for _ in range(self.slots):
            r = v & mask
            if r >= half:
                r -= full
            out.append(r)
            v = (v - r) >> b
        if v:
            raise ArithmeticError("packed accumulator overflowed its slot range")
        return out


def _majorant_max(spec: NahmSpec, slots: int, scale: int) -> int:
    a = [0] * slots
    a[0] = 1
    for f in spec.factors:
        d0 = int(f.offset * scale)
        for _ in range(f.power):
            for j in range(slots):
                d = d0 + j * scale
                if d >= slots:
                    break
                if f.is_denominator:
                    _over_binomial(a, d, 1)
                else:
                    _times_binomial(a, d, -1)
    return max(abs(x) for x in a)


class _FactorCache:
    """Packed truncated series of one factor, keyed by evaluated length."""

    def __init__(self, factor: PochhammerFactor, packer: _Packer, scale: int):
        self.f = factor
        self.packer = packer
        self.scale = scale
        self.d0 = int(factor.offset * scale)
        self.cache: Dict[Optional[int], int] = {}
        self._dense: List[List[int]] = []  # running products for lengths 0, 1, ...

    def _dense_at(self, n: Optional[int]) -> List[int]:
        slots = self.packer.slots
        if n is None:
            a = [0] * slots
            a[0] = 1
            for j in range(slots):
                d = self.d0 + j * self.scale
                if d >= slots:
                    break
                (_over_binomial if self.f.is_denominator else _times_binomial)(a, d, self.f.sign)
            return a
        if not self._dense:
            a = [0] * slots
            a[0] = 1
            self._dense.append(a)
        while len(self._dense) <= n:
            j = len(self._dense) - 1
            a = list(self._dense[-1])
            d = self.d0 + j * self.scale
            if d < slots:
                (_over_binomial if self.f.is_denominator else _times_binomial)(a, d, self.f.sign)
            self._dense.append(a)
        return self._dense[n]

    def get(self, n: Optional[int]) -> int:
        v = self.cache.get(n)
        if v is None:
            p = self.packer
            v = p.pack(self._dense_at(n))
            base = v
            for _ in range(self.f.power - 1):
                v = p.truncate(v * base, p.slots)
            self.cache[n] = v
        return v


def nahm_sum(spec: NahmSpec, prec: RationalLike) -> QSeries:
    """Evaluate the multi-sum of ``spec`` up to ``O(q^prec)``.

    Indices are enumerated depth-first in order ``n_1, n_2, ...``; at every
    prefix a lower bound on the exponent over all completions prunes the
    subtree. A denominator factor of negative length zeroes its term (the
    ``1/(q)_{-m} = 0`` convention); a numerator factor of negative length in a
    surviving term is an error.
    """
    prec = as_rational(prec)
    k = spec.dim
    D = spec.scale(prec)
    S = int(prec * D)
    if S <= 0:
        return qs.zero(prec)

    # integer exponent data in slot units
    qd = [int(spec.quad[i][i] * D / 2) for i in range(k)]
    qo = [[int(spec.quad[i][j] * D) for j in range(k)] for i in range(k)]
    bl = [int(spec.lin[i] * D) for i in range(k)]
    g0 = int(spec.const * D)

    linear = spec.bound_hint is BoundKind.LINEAR
    if linear:
        D = _lcm(D, _slot_scale(*spec.witness))
        S = int(prec * D)
        qd = [int(spec.quad[i][i] * D / 2) for i in range(k)]
        qo = [[int(spec.quad[i][j] * D) for j in range(k)] for i in range(k)]
        bl = [int(spec.lin[i] * D) for i in range(k)]
        g0 = int(spec.const * D)
        witness = [int(w * D) for w in spec.witness]
        monotone = all(x >= 0 for row in spec.quad for x in row) and all(x >= 0 for x in spec.lin)
        box = [math.floor((prec - spec.const) / w) if prec > spec.const else -1 for w in witness]
    else:
        qf = np.array([[float(x) for x in row] for row in spec.quad])
        bf = np.array([float(x) for x in spec.lin])
        lam = float(np.linalg.eigvalsh(qf)[0]) * (1 - 1e-9)
        bnorm = float(np.linalg.norm(bf))
        span = float(prec - spec.const)
        radius = (bnorm + math.sqrt(bnorm * bnorm + 2 * lam * max(span, 0.0))) / lam
        box = [math.floor(radius + 1e-9)] * k
        # Schur-complement data for the relaxed lower bound at each depth
        schur = []
        for d in range(k):
            r = list(range(d + 1, k))
            if r:
                kinv = np.linalg.inv(qf[np.ix_(r, r)])
                schur.append((np.array(r), qf[np.ix_(r, list(range(d + 1)))], kinv))
            else:
                schur.append(None)

    # factors grouped by the depth at which their length is determined
    n_leaves = 1
    for b in box:
        n_leaves *= max(b, 0) + 1
    bits = (n_leaves * _majorant_max(spec, S, D)).bit_length() + 2
    packer = _Packer(S, bits)
    caches = [_FactorCache(f, packer, D) for f in spec.factors]
    ready: List[List[int]] = [[] for _ in range(k)]
    root = 1
    for idx, f in enumerate(spec.factors):
        if f.length == INF:
            root = packer.truncate(root * caches[idx].get(None), S)
        elif f.length.last_index < 0:
            ready[0].append(idx)  # constant length: checked at the first index
        else:
            ready[f.length.last_index].append(idx)
    par_ready: List[List[Parity]] = [[] for _ in range(k)]
    for p in spec.parities:
        par_ready[max(p.last_index, 0)].append(p)

    n = [0] * k
    acc: Dict[int, int] = {}  # exponent slot -> packed sum of cofactors
    signs = spec.signs
    has_signs = any(signs)

    def lower_bound(d: int, e_prefix: int) -> float:
        # lower bound, in slots, of E over all real completions of n[0..d]
        sc = schur[d]
        if sc is None:
            return float(e_prefix)
        r, qrp, kinv = sc
        x = np.array(n[: d + 1], dtype=float)
        g = qrp @ x + bf[r]
        return e_prefix - 0.5 * float(g @ kinv @ g) * D - 1e-7 * (1 + abs(e_prefix))

    # factor lengths as scaled integer forms: (terms, const, denominator)
    int_lengths = []
    for f in spec.factors:
        if f.length == INF:
            int_lengths.append(None)
            continue
        den = _slot_scale(f.length.const, *f.length.coeffs)
        terms = [(i, int(c * den)) for i, c in enumerate(f.length.coeffs) if c]
        int_lengths.append((terms, int(f.length.const * den), den))

    def length_at(idx: int) -> int:
        terms, c, den = int_lengths[idx]
        v = c
        for i, a in terms:
            v += a * n[i]
        if den != 1:
            if v % den:
                raise DomainError(f"length {Fraction(v, den)} at n={tuple(n)} is not an integer")
            v //= den
        return v

    def visit(d: int, e_prev: int, packed: int, lin_acc: List[int], bad_numerator: bool, wsum: int):
        lin_d = bl[d] + lin_acc[d]
        leaf = d == k - 1
        prev_lb = None
        for v in range(0, box[d] + 2):
            e = e_prev + qd[d] * v * v + lin_d * v
            if linear:
                w_next = wsum + witness[d] * v
                if v > box[d]:
                    if monotone and e < S:
                        raise WitnessViolationError(
                            f"index {d} beyond its witness bound {box[d]} still has exponent "
                            f"{Fraction(e, D)} < {prec}")
                    break
                if monotone and e >= S:
                    break
                if g0 + w_next >= S:
                    break
                lb = e if (leaf or monotone) else g0 + w_next
            else:
                if v > box[d]:
                    break
                n[d] = v
                lb = e if leaf else math.ceil(lower_bound(d, e))
                if lb >= S:
                    if prev_lb is not None and lb > prev_lb:
                        break
                    prev_lb = lb
                    continue
                prev_lb = lb
            if lb >= S:
                continue
            n[d] = v
            if any(not p.holds(n) for p in par_ready[d]):
                continue
            lengths = []
            zero = False
            bad = bad_numerator
            for idx in ready[d]:
                f = spec.factors[idx]
                L = length_at(idx)
                if L < 0:
                    if f.is_denominator:
                        zero = True
                        break
                    bad = True
                lengths.append(L)
            if zero:
                continue
            budget = S - max(lb, 0)
            p = packed
            for idx, L in zip(ready[d], lengths):
                if L >= 0:
                    p = packer.truncate(p * packer.truncate(caches[idx].get(L), budget), budget)
            if leaf:
                if e < 0:
                    raise DomainError(f"term n={tuple(n)} has negative exponent {Fraction(e, D)}")
                if linear and e - g0 < w_next:
                    raise WitnessViolationError(f"term n={tuple(n)} violates the LINEAR witness")
                if bad:
                    raise NegativeLengthError(f"numerator factor has negative length at n={tuple(n)}")
                if has_signs and sum(s * x for s, x in zip(signs, n)) % 2:
                    p = -p
                acc[e] = acc.get(e, 0) + p
            else:
                nxt = [lin_acc[j] + qo[d][j] * v for j in range(k)]
                visit(d + 1, e, p, nxt, bad, w_next if linear else wsum)
        n[d] = 0

    visit(0, g0, root, [0] * k, False, 0)
    total = 0
    for e, v in acc.items():
        total += v << (e * bits)
    return QSeries.from_dense(packer.unpack(total), D, S)
