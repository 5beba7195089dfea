"""Bailey pairs and the specialized chain / lattice identities, checked q-adically."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from . import series as qs
from .builders import pochhammer_finite, pochhammer_infinite, pochhammer_inverse
from .errors import DomainError
from .report import VerificationReport
from .series import ComparisonResult, QSeries, RationalLike, as_rational

SeriesFn = Callable[[int, Fraction], QSeries]


@dataclass(frozen=True)
class BaileyPair:
    """``(alpha_n, beta_n)`` relative to ``a = q^a_exp``; both given as ``n, prec -> QSeries``."""

    name: str
    a_exp: Fraction
    alpha: SeriesFn
    beta: SeriesFn


@dataclass(frozen=True)
class LatticeInstance:
    pair: BaileyPair
    k: int
    i: int
    rho_exp: Fraction  # rho = -q^rho_exp
    rho_sign: int = -1

    def __post_init__(self):
        object.__setattr__(self, "rho_exp", as_rational(self.rho_exp))
        if self.k < 1:
            raise DomainError("k must be >= 1")
        if not 0 <= self.i <= self.k:
            raise DomainError(f"need 0 <= i <= k (got i={self.i}, k={self.k})")
        if self.rho_sign != -1:
            raise DomainError("only rho = -q^r is supported")


def _mono(e: Fraction, c, prec: Fraction) -> QSeries:
    if e >= prec:
        return qs.zero(prec)
    return qs.monomial(e, c, prec)


def _times_q(s: QSeries, e: Fraction, prec: Fraction, c=1) -> QSeries:
    """``c q^e s`` truncated at ``prec``."""
    if e >= prec:
        return qs.zero(prec)
    return qs.truncate(qs.mul(qs.monomial(e, c, prec), s), prec)


def _one_minus_inv(c: Fraction, prec: Fraction) -> QSeries:
    """``1 / (1 - q^c)`` for ``c > 0``."""
    return pochhammer_inverse(1, c, 1, prec)


# ---------------------------------------------------------------------------
# the two pairs


def pair_b3() -> BaileyPair:
    """Pair relative to a = q: alpha_n = (-1)^n q^(n(3n+1)/2) (1-q^(2n+1))/(1-q), beta_n = 1/(q)_n."""

    def alpha(n: int, prec: Fraction) -> QSeries:
        e = Fraction(n * (3 * n + 1), 2)
        sgn = -1 if n % 2 else 1
        top = qs.add(_mono(e, sgn, prec), _mono(e + 2 * n + 1, -sgn, prec))
        return qs.mul(top, _one_minus_inv(Fraction(1), prec))

    def beta(n: int, prec: Fraction) -> QSeries:
        return pochhammer_inverse(1, 1, n, prec)

    return BaileyPair("b3", Fraction(1), alpha, beta)


def pair_general(ell: int) -> BaileyPair:
    """The pair with a = q^(2 ell + 1): alpha_n = a^n q^(n(n-1)) (1 - a q^(2n))/(1 - a), beta_n = 1/(q, a)_n."""
    if ell < 0:
        raise DomainError("ell must be >= 0")
    A = 2 * ell + 1

    def alpha(n: int, prec: Fraction) -> QSeries:
        e = Fraction(A * n + n * (n - 1))
        top = qs.add(_mono(e, 1, prec), _mono(e + A + 2 * n, -1, prec))
        return qs.mul(top, _one_minus_inv(Fraction(A), prec))

    def beta(n: int, prec: Fraction) -> QSeries:
        return qs.mul(pochhammer_inverse(1, 1, n, prec), pochhammer_inverse(1, A, n, prec))

    return BaileyPair(f"general-{ell}", Fraction(A), alpha, beta)


def pair_by_name(name: str, ell: int = 0) -> BaileyPair:
    if name == "b3":
        return pair_b3()
    if name in ("general", "prime"):
        return pair_general(ell)
    raise DomainError(f"unknown Bailey pair {name!r} (expected b3 or general)")


def defining_sum(pair: BaileyPair, n: int, prec: RationalLike) -> QSeries:
    """``sum_{j<=n} alpha_j / ((q)_{n-j} (a q)_{n+j})``."""
    prec = as_rational(prec)
    total = qs.zero(prec)
    for j in range(n + 1):
        den = qs.mul(pochhammer_inverse(1, 1, n - j, prec), pochhammer_inverse(1, pair.a_exp + 1, n + j, prec))
        total = qs.add(total, qs.mul(pair.alpha(j, prec), den))
    return total


def verify_pair(pair: BaileyPair, n_max: int, prec: RationalLike) -> VerificationReport:
    """Check the defining relation for ``0 <= n <= n_max``; reports the first failing ``n``."""
    prec = as_rational(prec)
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    t0 = time.perf_counter()
    params = {"n_max": n_max}
    for n in range(n_max + 1):
        cmp = qs.compare_up_to(pair.beta(n, prec), defining_sum(pair, n, prec), prec)
        if not cmp.equal:
            ms = int((time.perf_counter() - t0) * 1000)
            return VerificationReport.from_comparison(f"BAILEY_PAIR_{pair.name.upper()}", params, cmp, ms, n=n)
    ms = int((time.perf_counter() - t0) * 1000)
    return VerificationReport.from_comparison(f"BAILEY_PAIR_{pair.name.upper()}", params,
                                              ComparisonResult(True, prec, None), ms)


# ---------------------------------------------------------------------------
# chain


def chain_both_sides(pair: BaileyPair, k: int, prec: RationalLike) -> Tuple[QSeries, QSeries]:
    """k-fold chain for pairs relative to ``(q, q)``.

    Left: sum over ``n_k >= ... >= n_1 >= 0`` of
    ``(q)_{n_1} (-1)^(sum n) q^(sum n_j(n_j+1)/2) beta_{n_1} / prod (q)_{n_{j+1}-n_j}``.
    Right: ``(1-q) sum_n (-1)^(nk) q^(k n(n+1)/2) alpha_n``.
    """
    prec = as_rational(prec)
    if pair.a_exp != 1:
        raise DomainError(f"chain needs a pair relative to (q, q), got a = q^{pair.a_exp}")
    if k < 1:
        raise DomainError("k must be >= 1")

    left = qs.zero(prec)
    # enumerate n_1 <= n_2 <= ... <= n_k; each n(n+1)/2 is a nonnegative, nondecreasing contribution
    for n1 in range(0, 10 ** 9):
        e1 = Fraction(n1 * (n1 + 1), 2)
        if e1 >= prec:
            break
        base = qs.mul(pochhammer_finite(1, 1, n1, prec), pair.beta(n1, prec))
        stack: List[Tuple[int, int, Fraction, QSeries, int]] = [(1, n1, e1, base, n1)]
        while stack:
            depth, last, e, cof, nsum = stack.pop()
            if depth == k:
                sgn = -1 if nsum % 2 else 1
                left = qs.add(left, _times_q(cof, e, prec, sgn))
                continue
            m = last
            while True:
                e_next = e + Fraction(m * (m + 1), 2)
                if e_next >= prec:
                    break
                nxt = qs.mul(cof, pochhammer_inverse(1, 1, m - last, prec))
                stack.append((depth + 1, m, e_next, nxt, nsum + m))
                m += 1

    right = qs.zero(prec)
    n = 0
    while Fraction(k * n * (n + 1), 2) < prec:
        sgn = -1 if (n * k) % 2 else 1
        right = qs.add(right, _times_q(pair.alpha(n, prec), Fraction(k * n * (n + 1), 2), prec, sgn))
        n += 1
    right = qs.mul(pochhammer_finite(1, 1, 1, prec), right)
    return left, right


# ---------------------------------------------------------------------------
# lattice


def _neg_poch(c: Fraction, n: Optional[int], prec: Fraction) -> QSeries:
    """``(-q^c; q)_n`` with ``c >= 0`` (``n=None``: infinite)."""
    if c > 0:
        return pochhammer_infinite(-1, c, prec) if n is None else pochhammer_finite(-1, c, n, prec)
    if n == 0:
        return qs.one(prec)
    rest = pochhammer_infinite(-1, 1, prec) if n is None else pochhammer_finite(-1, 1, n - 1, prec)
    return rest.scaled(2)


def _neg_poch_inv(c: Fraction, n: int, prec: Fraction) -> QSeries:
    if c > 0:
        return pochhammer_inverse(-1, c, n, prec)
    if n == 0:
        return qs.one(prec)
    return pochhammer_inverse(-1, 1, n - 1, prec).scaled(Fraction(1, 2))


def lattice_both_sides(inst: LatticeInstance, prec: RationalLike,
                       range_convention: str = "signed") -> Tuple[QSeries, QSeries]:
    """Both sides of the k-fold lattice limit at ``rho = -q^r``, ``a = q^A``.

    The sign factors ``(-1)^N rho^(-N)`` collapse to ``q^(-r N)``, leaving
    integer-signed series on both sides. The exponent carries
    ``-sum_{j=2}^{i} N_j``; for ``i = 0`` the ``"signed"`` convention reads this
    as ``+N_1`` while ``"empty"`` drops it.
    """
    if range_convention not in ("signed", "empty"):
        raise DomainError(f"unknown range convention {range_convention!r}")
    prec = as_rational(prec)
    pair, k, i, r = inst.pair, inst.k, inst.i, inst.rho_exp
    A = pair.a_exp
    ell = (A - 1) / 2
    if ell.denominator != 1 or ell < 0 or r not in (ell + Fraction(1, 2), ell + 1):
        raise DomainError(f"unsupported specialization rho = -q^{r} for a = q^{A}; "
                          f"only r = ell + 1/2 or ell + 1 with A = 2 ell + 1")

    # left: sum over n_1..n_k >= 0 with tail sums N_j = n_j + ... + n_k
    # contribution of -sum_{j=2}^{i} N_j that falls on N_1 (only for i = 0 under the signed reading)
    n1_extra = 1 if (i == 0 and range_convention == "signed") else 0

    def g1(N1: int) -> Fraction:
        return Fraction(N1 * (N1 - 1), 2) - r * N1 + A * N1 + n1_extra * N1

    def gj(j: int, Nj: int) -> Fraction:  # 1-based j >= 2
        return A * Nj + Nj * Nj - (Nj if j <= i else 0)

    left = qs.zero(prec)
    # enumerate n_k first; the exponent is nondecreasing in every N_j and the N_1 part
    # is bounded below by its value at the current (smallest possible) N_1
    stack: List[Tuple[int, int, Fraction, QSeries]] = []
    for nk in range(0, 10 ** 9):
        e = gj(k, nk) if k >= 2 else Fraction(0)
        if e + g1(nk) >= prec:
            break
        stack.append((k - 1, nk, e, pair.beta(nk, prec)))
    while stack:
        j, N, e, cof = stack.pop()  # j indices assigned from k down to j+1; N = N_{j+1}
        if j == 0:
            term = qs.mul(cof, _neg_poch(r, N, prec))
            left = qs.add(left, _times_q(term, e + g1(N), prec))
            continue
        for nj in range(0, 10 ** 9):
            Nj = N + nj
            e_next = e + (gj(j, Nj) if j >= 2 else 0)
            if e_next + g1(Nj) >= prec:
                break
            stack.append((j - 1, Nj, e_next, qs.mul(cof, pochhammer_inverse(1, 1, nj, prec))))

    # right: two sums sharing the prefactor (-q^(A-r))_inf / (q^(A+1))_inf
    c = A - r
    s1 = qs.zero(prec)
    n = 0
    while True:
        e = -r * n + A * k * n + (k - Fraction(1, 2)) * n * n + (Fraction(1, 2) - i) * n
        if e >= prec and n > 0:
            break
        if e < prec:
            t = qs.mul(qs.mul(_neg_poch(r, n, prec), _neg_poch_inv(c, n, prec)),
                       qs.mul(pair.alpha(n, prec), _one_minus_inv(A + 2 * n, prec)))
            s1 = qs.add(s1, _times_q(t, e, prec))
        n += 1
    s2 = qs.zero(prec)
    n = 1
    while True:
        e = (-r * n + A * (k * n + i - k + 1) + (k - Fraction(1, 2)) * n * n
             + (Fraction(5, 2) + i - 2 * k) * n + k - i - 2)
        if e >= prec and n > 1:
            break
        if e < prec:
            if e < 0:
                raise DomainError(f"negative exponent {e} in the lattice right side at n={n}")
            t = qs.mul(qs.mul(_neg_poch(r, n, prec), _neg_poch_inv(c, n, prec)),
                       qs.mul(pair.alpha(n - 1, prec), _one_minus_inv(A + 2 * n - 2, prec)))
            s2 = qs.add(s2, _times_q(t, e, prec))
        n += 1
    pref = qs.mul(_neg_poch(c, None, prec), pochhammer_inverse(1, A + 1, None, prec))
    right = qs.mul(pref, qs.add(s1, -s2))
    return left, right


def rho_exponent(pair: BaileyPair, rho: str) -> Fraction:
    """``half`` gives ``r = ell + 1/2``, ``one`` gives ``r = ell + 1``."""
    ell = (pair.a_exp - 1) / 2
    if rho == "half":
        return ell + Fraction(1, 2)
    if rho == "one":
        return ell + 1
    raise DomainError(f"unsupported rho specialization {rho!r} (expected half or one)")


def _compare(name: str, params: dict, sides: Tuple[QSeries, QSeries], prec: Fraction, t0: float):
    left, right = sides
    order = min(left.prec, right.prec, prec)
    cmp = qs.compare_up_to(left, right, order)
    return VerificationReport.from_comparison(name, params, cmp, int((time.perf_counter() - t0) * 1000))


def verify_chain(pair: BaileyPair, k: int, prec: RationalLike) -> VerificationReport:
    prec = as_rational(prec)
    t0 = time.perf_counter()
    return _compare(f"BAILEY_CHAIN_{pair.name.upper()}", {"k": k}, chain_both_sides(pair, k, prec), prec, t0)


def verify_lattice(inst: LatticeInstance, prec: RationalLike,
                   range_convention: str = "signed") -> VerificationReport:
    prec = as_rational(prec)
    t0 = time.perf_counter()
    ell = int((inst.pair.a_exp - 1) / 2)
    params = {"ell": ell, "k": inst.k, "i": inst.i}
    rho = "HALF" if inst.rho_exp == ell + Fraction(1, 2) else "ONE"
    return _compare(f"BAILEY_LATTICE_RHO_{rho}", params, lattice_both_sides(inst, prec, range_convention), prec, t0)
