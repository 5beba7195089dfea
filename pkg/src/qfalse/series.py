"""Truncated formal power series in q with rational exponents.

A :class:`QSeries` stores ``sum_s c_s q^(s/D) + O(q^N)``: a positive integer
*scale* ``D``, a sparse map from integer numerators ``s`` to exact rational
coefficients, and a precision ``N`` that is an integer multiple of ``1/D``.
Everything strictly below ``N`` is known exactly; nothing at or above it is.

Coefficients are kept as Python ``int`` whenever they are integral and as
:class:`fractions.Fraction` otherwise; both are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union

from .errors import DomainError, NotInvertibleError, PrecisionError

Rational = Union[int, Fraction]
RationalLike = Union[int, Fraction, str]


def as_rational(x: RationalLike) -> Fraction:
    """Coerce ``int``, ``Fraction`` or a ``"num/den"`` string to ``Fraction``.

    Floats are refused: they would silently introduce rounding.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def format_rational(x: Rational) -> str:
    """Render as ``"num/den"`` (denominator always present)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _norm(c: Rational) -> Rational:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class QSeries:
    """Immutable truncated q-series; see module docstring for the model."""

    __slots__ = ("_scale", "_coeffs", "_prec_num")

    def __init__(self, coeffs: Mapping[int, Rational], scale: int, prec_num: int):
        if not isinstance(scale, int) or scale < 1:
            raise DomainError(f"scale must be a positive integer, got {scale!r}")
        store: Dict[int, Rational] = {}
        for s, c in coeffs.items():
            if c == 0:
                continue
            if s < 0:
                raise DomainError(
                    f"negative exponent {Fraction(s, scale)}: Laurent tails are not supported"
                )
            if s >= prec_num:
                continue
            store[s] = _norm(c)
        self._scale = scale
        self._coeffs = store
        self._prec_num = prec_num

    # -- construction helpers -------------------------------------------------

    @classmethod
    def _raw(cls, coeffs: Dict[int, Rational], scale: int, prec_num: int) -> "QSeries":
        # trusted constructor: caller guarantees all invariants
        obj = cls.__new__(cls)
        obj._scale = scale
        obj._coeffs = coeffs
        obj._prec_num = prec_num
        return obj

    @classmethod
    def from_terms(cls, terms: Mapping[RationalLike, RationalLike], prec: RationalLike) -> "QSeries":
        """Build from ``{exponent: coefficient}`` with arbitrary rational exponents."""
        prec = as_rational(prec)
        exps = {as_rational(e): as_rational(c) for e, c in terms.items()}
        scale = prec.denominator
        for e in exps:
            scale = _lcm(scale, e.denominator)
        coeffs: Dict[int, Rational] = {}
        for e, c in exps.items():
            if e >= prec:
                raise PrecisionError(f"term q^{e} is not below the precision {prec}")
            s = int(e * scale)
            coeffs[s] = coeffs.get(s, 0) + c
        return cls(coeffs, scale, int(prec * scale))

    @classmethod
    def from_dense(cls, values, scale: int = 1, prec_num: Optional[int] = None) -> "QSeries":
        """Dense coefficient list at the given scale; precision defaults to its length."""
        if prec_num is None:
            prec_num = len(values)
        return cls({s: v for s, v in enumerate(values) if v}, scale, prec_num)

    # -- accessors -------------------------------------------------------------

    @property
    def scale(self) -> int:
        return self._scale

    @property
    def prec(self) -> Fraction:
        return Fraction(self._prec_num, self._scale)

    @property
    def prec_num(self) -> int:
        return self._prec_num

    @property
    def valuation(self) -> Fraction:
        """Least exponent carrying a nonzero coefficient, or ``prec`` if none."""
        if not self._coeffs:
            return self.prec
        return Fraction(min(self._coeffs), self._scale)

    def numerators(self) -> Dict[int, Rational]:
        """Copy of the raw ``{s: coefficient}`` map (exponent ``s/scale``)."""
        return dict(self._coeffs)

    def items(self) -> Iterator[Tuple[Fraction, Fraction]]:
        """``(exponent, coefficient)`` pairs in increasing exponent order."""
        for s in sorted(self._coeffs):
            yield Fraction(s, self._scale), Fraction(self._coeffs[s])

    def __len__(self) -> int:
        return len(self._coeffs)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._coeffs.values())

    def dense(self, scale: Optional[int] = None) -> list:
        """Dense list of coefficients at ``scale`` (default: own scale), length ``prec*scale``."""
        s = self.rescaled_to(scale or self._scale)
        out = [0] * s._prec_num
        for k, c in s._coeffs.items():
            out[k] = c
        return out

    # -- scale handling --------------------------------------------------------

    def rescaled_to(self, scale: int) -> "QSeries":
        """Same series expressed with ``scale`` (a multiple of the current one)."""
        if scale == self._scale:
            return self
        if scale % self._scale:
            raise DomainError(f"scale {scale} is not a multiple of {self._scale}")
        f = scale // self._scale
        return QSeries._raw({s * f: c for s, c in self._coeffs.items()}, scale, self._prec_num * f)

    def reduced(self) -> "QSeries":
        """Re-express at the smallest scale that represents every exponent and the precision."""
        g = self._prec_num
        for s in self._coeffs:
            g = gcd(g, s)
        g = gcd(g, self._scale)
        if g <= 1:
            return self
        return QSeries._raw(
            {s // g: c for s, c in self._coeffs.items()}, self._scale // g, self._prec_num // g
        )

    # -- arithmetic sugar -------------------------------------------------------

    def __add__(self, other: "QSeries") -> "QSeries":
        return add(self, other)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return add(self, other.scaled(-1))

    def __neg__(self) -> "QSeries":
        return self.scaled(-1)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return mul(self, other)
        return self.scaled(other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QSeries":
        return power(self, n)

    def scaled(self, c: RationalLike) -> "QSeries":
        """Multiply every coefficient by the rational ``c``."""
        c = _norm(as_rational(c))
        if c == 0:
            return QSeries._raw({}, self._scale, self._prec_num)
        return QSeries._raw({s: _norm(v * c) for s, v in self._coeffs.items()}, self._scale, self._prec_num)

    def shifted(self, e: RationalLike) -> "QSeries":
        """Multiply by ``q^e`` (``e >= 0``); the precision moves up by ``e``."""
        e = as_rational(e)
        if e < 0:
            raise DomainError("shift by a negative power would create a Laurent tail")
        scale = _lcm(self._scale, e.denominator)
        a = self.rescaled_to(scale)
        d = int(e * scale)
        return QSeries._raw({s + d: c for s, c in a._coeffs.items()}, scale, a._prec_num + d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        if self.prec != other.prec:
            return False
        scale = _lcm(self._scale, other._scale)
        return self.rescaled_to(scale)._coeffs == other.rescaled_to(scale)._coeffs

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r._scale, r._prec_num, frozenset(r._coeffs.items())))

    def __repr__(self) -> str:
        parts = []
        for e, c in self.items():
            if e == 0:
                parts.append(str(c))
            else:
                coef = "" if c == 1 else ("-" if c == -1 else f"{c}*")
                parts.append(f"{coef}q^{e}")
        body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return f"{body} + O(q^{self.prec})"

    # -- debug dump ------------------------------------------------------------

    def dump(self) -> str:
        """Text dump: header ``prec=S/D`` then one ``s/D<TAB>num/den`` line per term."""
        lines = [f"prec={self._prec_num}/{self._scale}"]
        for s in sorted(self._coeffs):
            lines.append(f"{s}/{self._scale}\t{format_rational(self._coeffs[s])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "QSeries":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("prec="):
            raise ValueError("dump must start with a 'prec=S/D' header")
        pnum, scale = lines[0][5:].split("/")
        scale = int(scale)
        coeffs = {}
        for ln in lines[1:]:
            exp, coef = ln.split("\t")
            s, d = exp.split("/")
            if int(d) != scale:
                raise ValueError(f"term scale {d} differs from header scale {scale}")
            coeffs[int(s)] = Fraction(coef)
        return cls(coeffs, scale, int(pnum))


@dataclass(frozen=True)
class ComparisonResult:
    equal: bool
    compared_up_to: Fraction
    first_mismatch: Optional[Tuple[Fraction, Fraction, Fraction]] = None

    def __bool__(self) -> bool:
        return self.equal


def _unify(a: QSeries, b: QSeries) -> Tuple[QSeries, QSeries, int]:
    scale = _lcm(a.scale, b.scale)
    return a.rescaled_to(scale), b.rescaled_to(scale), scale


def zero(prec: RationalLike) -> QSeries:
    prec = as_rational(prec)
    return QSeries._raw({}, prec.denominator, prec.numerator)


def one(prec: RationalLike) -> QSeries:
    return monomial(0, 1, prec)


def monomial(e: RationalLike, c: RationalLike, prec: RationalLike) -> QSeries:
    """``c q^e + O(q^prec)``."""
    e, c, prec = as_rational(e), as_rational(c), as_rational(prec)
    if e < 0:
        raise DomainError(f"negative exponent {e}")
    if e >= prec:
        raise PrecisionError(f"exponent {e} is not below the precision {prec}")
    scale = _lcm(e.denominator, prec.denominator)
    coeffs = {int(e * scale): _norm(c)} if c else {}
    return QSeries._raw(coeffs, scale, int(prec * scale))


def add(a: QSeries, b: QSeries) -> QSeries:
    a, b, scale = _unify(a, b)
    n = min(a.prec_num, b.prec_num)
    out = {s: c for s, c in a._coeffs.items() if s < n}
    for s, c in b._coeffs.items():
        if s >= n:
            continue
        v = out.get(s, 0) + c
        if v:
            out[s] = _norm(v)
        else:
            out.pop(s, None)
    return QSeries._raw(out, scale, n)


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product with precision ``min(prec(a)+val(b), prec(b)+val(a))``."""
    a, b, scale = _unify(a, b)
    va = min(a._coeffs) if a._coeffs else a.prec_num
    vb = min(b._coeffs) if b._coeffs else b.prec_num
    n = min(a.prec_num + vb, b.prec_num + va)
    if len(a._coeffs) > len(b._coeffs):
        a, b = b, a
    bkeys = sorted(b._coeffs)
    bc = b._coeffs
    out: Dict[int, Rational] = {}
    get = out.get
    for s, c in a._coeffs.items():
        lim = n - s
        for t in bkeys:
            if t >= lim:
                break
            out[s + t] = get(s + t, 0) + c * bc[t]
    return QSeries._raw({s: _norm(v) for s, v in out.items() if v}, scale, n)


def power(a: QSeries, n: int) -> QSeries:
    """``a**n`` for integer ``n``; negative powers go through :func:`invert`."""
    if n < 0:
        return power(invert(a), -n)
    result = one(a.prec)
    base = a
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def invert(a: QSeries) -> QSeries:
    """Multiplicative inverse; needs a nonzero constant term."""
    c0 = a._coeffs.get(0, 0)
    if c0 == 0:
        raise NotInvertibleError("series has no constant term")
    n = a.prec_num
    terms = sorted((s, c) for s, c in a._coeffs.items() if s > 0)
    inv0 = Fraction(1, 1) / c0 if c0 not in (1, -1) else c0
    b = [0] * n
    b[0] = _norm(inv0) if isinstance(inv0, Fraction) else inv0
    for m in range(1, n):
        acc = 0
        for s, c in terms:
            if s > m:
                break
            bm = b[m - s]
            if bm:
                acc += c * bm
        if acc:
            b[m] = _norm(-acc * inv0)
    return QSeries._raw({s: v for s, v in enumerate(b) if v}, a.scale, n)


def coeff_at(a: QSeries, e: RationalLike) -> Fraction:
    """Coefficient of ``q^e``; refuses to answer at or beyond the precision."""
    e = as_rational(e)
    if e >= a.prec:
        raise PrecisionError(f"coefficient of q^{e} requested but precision is {a.prec}")
    if e < 0:
        return Fraction(0)
    s = e * a.scale
    if s.denominator != 1:
        return Fraction(0)
    return Fraction(a._coeffs.get(int(s), 0))


def truncate(a: QSeries, n: RationalLike) -> QSeries:
    n = as_rational(n)
    if n > a.prec:
        raise PrecisionError(f"cannot truncate at {n}: precision is only {a.prec}")
    scale = _lcm(a.scale, n.denominator)
    a = a.rescaled_to(scale)
    m = int(n * scale)
    return QSeries._raw({s: c for s, c in a._coeffs.items() if s < m}, scale, m)


def compare_up_to(a: QSeries, b: QSeries, n: RationalLike) -> ComparisonResult:
    """Compare all coefficients with exponent ``< n``; report the first mismatch."""
    n = as_rational(n)
    if n > a.prec or n > b.prec:
        raise PrecisionError(f"comparison window {n} exceeds precision ({a.prec}, {b.prec})")
    a, b, scale = _unify(a, b)
    for s in sorted(set(a._coeffs) | set(b._coeffs)):
        e = Fraction(s, scale)
        if e >= n:
            break
        x, y = a._coeffs.get(s, 0), b._coeffs.get(s, 0)
        if x != y:
            return ComparisonResult(False, n, (e, Fraction(x), Fraction(y)))
    return ComparisonResult(True, n, None)
