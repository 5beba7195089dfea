"""Registry of false theta / multisum identity families.

Every family knows how to build its left and right sides as truncated
q-series exactly as the identity is printed: q-power prefactors stay on the
left and are folded into the exponent of the bilateral sum, so no Laurent
tail ever appears.
"""

from __future__ import annotations

import dataclasses
import enum
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import series as qs
from .builders import (
    BilateralSpec,
    BoundKind,
    NahmSpec,
    Parity,
    Weight,
    bilateral_sum,
    euler_inverse,
    nahm_sum,
    pochhammer_infinite,
    qpoch,
    triple_pochhammer_infinite,
)
from .errors import DomainError, QFalseError
from .report import VerificationReport
from .series import QSeries, RationalLike, as_rational

F = Fraction


class FamilyId(enum.Enum):
    RAMANUJAN = "RAMANUJAN"
    AG_FALSE = "AG_FALSE"
    SHIFTED_NS = "SHIFTED_NS"
    SHIFTED_R = "SHIFTED_R"
    SHIFTED_R_IK = "SHIFTED_R_IK"
    SHIFT_DECOMP = "SHIFT_DECOMP"
    LOG_NS = "LOG_NS"
    LOG_NS_11 = "LOG_NS_11"
    LOG_R_K = "LOG_R_K"
    LOG_R_GEN = "LOG_R_GEN"
    EULER_FALSE = "EULER_FALSE"
    EULER_MODULAR = "EULER_MODULAR"
    MULTISUM_GENERAL = "MULTISUM_GENERAL"
    INV_JACOBI_CT = "INV_JACOBI_CT"

    @property
    def slug(self) -> str:
        return self.value.lower().replace("_", "-")

    @classmethod
    def parse(cls, name: str) -> "FamilyId":
        key = name.strip().upper().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            known = ", ".join(f.slug for f in cls)
            raise DomainError(f"unknown family {name!r}; known families: {known}") from None


class Side(enum.Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"


@dataclass(frozen=True)
class FamilyParams:
    prec: Fraction
    k: Optional[int] = None
    i: Optional[int] = None
    ell: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "prec", as_rational(self.prec))
        if self.prec <= 0:
            raise DomainError("precision must be positive")

    def as_dict(self) -> Dict[str, int]:
        return {name: getattr(self, name) for name in ("k", "i", "ell") if getattr(self, name) is not None}


# ---------------------------------------------------------------------------
# exact matrices


@dataclass(frozen=True)
class RationalMatrix:
    entries: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(F(x) for x in row) for row in self.entries))

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        n = self.size
        return RationalMatrix(tuple(
            tuple(sum(self.entries[i][t] * other.entries[t][j] for t in range(n)) for j in range(n))
            for i in range(n)))

    def is_symmetric(self) -> bool:
        n = self.size
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(i))

    def is_identity(self) -> bool:
        n = self.size
        return all(self.entries[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    def inverse(self) -> "RationalMatrix":
        n = self.size
        a = [list(r) + [F(int(i == j)) for j in range(n)] for i, r in enumerate(self.entries)]
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c] != 0), None)
            if piv is None:
                raise DomainError("matrix is singular")
            a[c], a[piv] = a[piv], a[c]
            inv = 1 / a[c][c]
            a[c] = [x * inv for x in a[c]]
            for r in range(n):
                if r != c and a[r][c]:
                    f = a[r][c]
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return RationalMatrix(tuple(tuple(r[n:]) for r in a))


_K1_INVERSE = ((F(3, 4), F(-1, 4)), (F(-1, 4), F(3, 4)))


def d_cartan(n: int) -> RationalMatrix:
    """Cartan matrix of type D_n (n >= 3): a chain 1..n-1 with node n attached to n-2."""
    if n < 3:
        raise DomainError("D_n needs n >= 3")
    m = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = F(2)
    edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    for a, b in edges:
        m[a][b] = m[b][a] = F(-1)
    return RationalMatrix(tuple(tuple(r) for r in m))


def a_matrix(k: int) -> RationalMatrix:
    """``(D_{k+1} + E_{11}) / 2``; for ``k = 1`` the inverse of the fixed 2x2 matrix."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if k == 1:
        return RationalMatrix(_K1_INVERSE).inverse()
    d = d_cartan(k + 1)
    return RationalMatrix(tuple(
        tuple((d[i, j] + (1 if i == j == 0 else 0)) / 2 for j in range(k + 1)) for i in range(k + 1)))


def a_inverse_matrix(k: int) -> RationalMatrix:
    """Closed form of the inverse of :func:`a_matrix` (1-based formulas below)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if k == 1:
        return RationalMatrix(_K1_INVERSE)
    n = k + 1
    m = [[F(0)] * n for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i <= k - 1 and j <= k - 1:
                v = F(min(2 * i - 1, 2 * j - 1))
            elif j <= k - 1:
                v = F(2 * j - 1, 2)
            elif i <= k - 1:
                v = F(2 * i - 1, 2)
            elif i == j:
                v = F(2 * k + 1, 4)
            else:
                v = F(2 * k - 3, 4)
            m[i - 1][j - 1] = v
    return RationalMatrix(tuple(tuple(r) for r in m))


# ---------------------------------------------------------------------------
# multisum descriptions


def _tail_sums_form(diag: Sequence[Fraction], lin_tail: Sequence[Fraction]):
    """Quadratic/linear data in n-coordinates for ``sum_j diag_j N_j^2 / 2 + lin_j N_j``
    with tail sums ``N_j = n_j + ... + n_k``."""
    k = len(diag)
    # N = T n with T[j][a] = 1 for a >= j, so (T^t D T)[a][b] = sum_{j <= min(a,b)} D_j
    quad = tuple(tuple(sum((F(diag[j]) for j in range(min(a, b) + 1)), F(0)) for b in range(k))
                 for a in range(k))
    lin = tuple(sum((F(lin_tail[j]) for j in range(a + 1)), F(0)) for a in range(k))
    return quad, lin


def _chain_spec(dim: int) -> NahmSpec:
    """``sum q^(n1 n2 + ... + n_{d-1} n_d + n1 + ... + nd) / prod (q)_{n_j}^2``."""
    quad = tuple(tuple(F(1) if abs(a - b) == 1 else F(0) for b in range(dim)) for a in range(dim))
    return NahmSpec(
        dim, quad, (F(1),) * dim,
        factors=tuple(qpoch(dim, {j: 1}, power=2) for j in range(dim)),
        bound_hint=BoundKind.LINEAR, witness=(F(1),) * dim,
    )


def _ag_false_spec(k: int) -> NahmSpec:
    quad, lin = _tail_sums_form([F(2)] * k, [F(1)] * k)
    factors = [qpoch(k, {j: 1}) for j in range(k - 1)] + [qpoch(k, {k - 1: 1}, power=2)]
    return NahmSpec(k, quad, lin, factors=tuple(factors))


def _shifted_spec(k: int, i: int, ell: int, ramond: bool) -> NahmSpec:
    diag = [F(1)] + [F(2)] * (k - 1)
    first = F(ell) + (F(1, 2) if ramond else F(1))
    lin_tail = [first] + [F(2 * ell + 1)] * (k - 1)
    for j in range(k - i):
        lin_tail[j] -= 1
    quad, lin = _tail_sums_form(diag, lin_tail)
    all_ones = {j: 1 for j in range(k)}
    factors = [qpoch(k, all_ones, ell, sign=-1, offset=F(1) if ramond else F(1, 2), location="numerator")]
    factors += [qpoch(k, {j: 1}) for j in range(k)]
    factors.append(qpoch(k, {k - 1: 1}, 2 * ell))
    return NahmSpec(k, quad, lin, factors=tuple(factors))


def _log_spec(k: int, lin: Sequence[Fraction], ramond: bool) -> NahmSpec:
    n = k + 1
    quad = a_inverse_matrix(k).entries
    length = {j: 1 for j in range(k - 1)}
    length[k - 1] = F(1, 2)
    length[k] = F(1, 2)
    factors = [qpoch(n, length, sign=-1, offset=F(1) if ramond else F(1, 2), location="numerator")]
    factors += [qpoch(n, {j: 1}) for j in range(n)]
    par = [0] * n
    par[k - 1], par[k] = 1, -1
    return NahmSpec(n, quad, tuple(lin), factors=tuple(factors), parities=(Parity(tuple(par), 2),))


def _log_ns_lin(k: int, i: int) -> List[Fraction]:
    lin = [F(0)] * (k + 1)
    for j in range(k - i + 1, k):  # 1-based j gets weight j - (k - i)
        lin[j - 1] = F(j - (k - i))
    lin[k - 1] = lin[k] = F(i, 2)
    return lin


def _log_r_lin(k: int, i: int) -> List[Fraction]:
    lin = [F(0)] * (k + 1)
    for j in range(1, k):
        lin[j - 1] = F(-1, 2) if j <= k - i else F(2 * (j - (k - i)) - 1, 2)
    lin[k - 1] = lin[k] = F(2 * i - 1, 4)
    return lin


def right_spec(fid: FamilyId, p: FamilyParams) -> Optional[NahmSpec]:
    """The multi-sum describing the right side, or ``None`` for product right sides."""
    k, i, ell = p.k, p.i, p.ell
    if fid is FamilyId.RAMANUJAN:
        return NahmSpec(1, ((F(2),),), (F(1),), factors=(qpoch(1, {0: 1}, power=2),))
    if fid is FamilyId.AG_FALSE:
        return _ag_false_spec(k)
    if fid is FamilyId.SHIFTED_NS:
        return _shifted_spec(k, i, ell, ramond=False)
    if fid is FamilyId.SHIFTED_R:
        return _shifted_spec(k, i, ell, ramond=True)
    if fid is FamilyId.SHIFTED_R_IK:
        return _shifted_spec(k, k, ell, ramond=True)
    if fid is FamilyId.LOG_NS:
        return _log_spec(k, _log_ns_lin(k, i), ramond=False)
    if fid is FamilyId.LOG_NS_11:
        return NahmSpec(
            2, ((F(3, 4), F(-1, 4)), (F(-1, 4), F(3, 4))), (F(1, 2), F(1, 2)),
            factors=(qpoch(2, {0: F(1, 2), 1: F(1, 2)}, sign=-1, offset=F(1, 2), location="numerator"),
                     qpoch(2, {0: 1}), qpoch(2, {1: 1})),
            parities=(Parity((1, -1), 2),))
    if fid is FamilyId.LOG_R_K:
        lin = [F(2 * j - 1, 2) for j in range(1, k)] + [F(2 * k - 1, 4)] * 2
        return _log_spec(k, lin, ramond=True)
    if fid is FamilyId.LOG_R_GEN:
        return _log_spec(k, _log_r_lin(k, i), ramond=True)
    if fid is FamilyId.EULER_FALSE:
        return _chain_spec(2 * k - 1)
    if fid is FamilyId.EULER_MODULAR:
        return _chain_spec(2 * k)
    if fid is FamilyId.MULTISUM_GENERAL:
        return _chain_spec(k)
    if fid is FamilyId.INV_JACOBI_CT:
        return NahmSpec(1, ((F(0),),), (F(1),), factors=(qpoch(1, {0: 1}, power=2),),
                        bound_hint=BoundKind.LINEAR, witness=(F(1),))
    return None


# ---------------------------------------------------------------------------
# left sides

_SHIFTED = (FamilyId.SHIFTED_NS, FamilyId.SHIFTED_R, FamilyId.SHIFTED_R_IK)


def _fermionic_quotient(offset: Fraction, prec: Fraction) -> QSeries:
    """``(-q^offset)_inf / (q)_inf``."""
    return qs.mul(pochhammer_infinite(-1, offset, prec), euler_inverse(prec))


def shifted_theta_spec(k: int, i: int, ell: int, ramond: bool) -> BilateralSpec:
    """Kernel of the shifted false theta sums, with its constant folded in."""
    if ramond:
        return BilateralSpec.completed_square(
            F(2 * k + 1, 2), F(2 * i - 1, 4 * k + 2),
            -(F(2 * k * ell + i + ell) - F(1, 2)) ** 2 / (4 * k + 2),
            weight=Weight.SGN_SHIFTED, ell=ell, one_plus_qn=True)
    return BilateralSpec.completed_square(
        F(2 * k + 1, 2), F(i, 2 * k + 1), -F(2 * k * ell + i + ell) ** 2 / (4 * k + 2),
        weight=Weight.SGN_SHIFTED, ell=ell)


def _shifted_kernel(fid: FamilyId, p: FamilyParams) -> BilateralSpec:
    k, i, ell = p.k, p.i, p.ell
    if fid is FamilyId.SHIFTED_R_IK:
        return BilateralSpec.completed_square(
            F(2 * k + 1, 2), F(2 * k - 1, 4 * k + 2),
            -(F(2 * k * ell + k + ell) - F(1, 2)) ** 2 / (4 * k + 2),
            weight=Weight.SGN_SHIFTED, ell=ell)
    return shifted_theta_spec(k, i, ell, ramond=fid is FamilyId.SHIFTED_R)


def _shift_of(theta: BilateralSpec) -> Fraction:
    return max(F(0), -theta.valuation())


def normalizing_shift(fid: FamilyId, p: FamilyParams) -> Fraction:
    """Power ``s >= 0`` such that ``q^s`` times each side is a power series.

    Only the shifted false theta identities need one: with ``(-q)_inf`` and
    ``i = 0`` a negative ``ell`` makes both sides start at ``q^ell``. Sides
    returned by :func:`build_side` carry the factor ``q^s`` and are exact up to
    ``q^(prec + s)``, so comparisons still cover every exponent below ``prec``
    of the original series.
    """
    return _shift_of(_shifted_kernel(fid, p)) if fid in _SHIFTED else F(0)


def odd_theta_decomposition(k: int, i: int, prec: RationalLike) -> Tuple[QSeries, QSeries]:
    """Odd-weight theta sum versus its expansion into shifted false theta sums."""
    if k < 1 or not 0 <= i <= k:
        raise DomainError("need k >= 1 and 0 <= i <= k")
    prec = as_rational(prec)
    alpha, shift = F(2 * k + 1, 2), F(i, 2 * k + 1)
    left = bilateral_sum(BilateralSpec.completed_square(alpha, shift, weight=Weight.ODD), prec)
    right = bilateral_sum(BilateralSpec.completed_square(alpha, shift, weight=Weight.SGN), prec)
    ell = 1
    while True:
        spec = BilateralSpec.completed_square(alpha, shift, weight=Weight.SGN_SHIFTED, ell=ell)
        # smallest exponent of the ell-th shifted sum: at n = ell or n = -ell-1
        if min(spec.exponent(ell), spec.exponent(-ell - 1)) >= prec:
            break
        right = qs.add(right, bilateral_sum(spec, prec).scaled(2))
        ell += 1
    return left, right


def _left(fid: FamilyId, p: FamilyParams) -> QSeries:
    k, i, N = p.k, p.i, p.prec
    if fid is FamilyId.RAMANUJAN:
        return bilateral_sum(BilateralSpec(2, 1, 0, Weight.SGN), N)
    if fid is FamilyId.AG_FALSE:
        theta = BilateralSpec.completed_square(k + 1, F(k, 2 * (k + 1)), -F(k * k, 4 * (k + 1)))
        return qs.mul(euler_inverse(N), bilateral_sum(theta, N))
    if fid in _SHIFTED:
        theta = _shifted_kernel(fid, p)
        s = _shift_of(theta)
        offset = F(1, 2) if fid is FamilyId.SHIFTED_NS else F(1)
        theta = BilateralSpec(theta.alpha, theta.beta, theta.gamma + s, theta.weight, theta.ell,
                              theta.alternating, theta.one_plus_qn)
        return qs.mul(_fermionic_quotient(offset, N + s), bilateral_sum(theta, N + s))
    if fid is FamilyId.SHIFT_DECOMP:
        return odd_theta_decomposition(k, i, N)[0]
    if fid is FamilyId.LOG_NS:
        theta = BilateralSpec.completed_square(F(2 * k + 1, 2), F(i, 2 * k + 1), -F(i * i, 2 * (2 * k + 1)),
                                               weight=Weight.ODD)
        return qs.mul(_fermionic_quotient(F(1, 2), N), bilateral_sum(theta, N))
    if fid is FamilyId.LOG_NS_11:
        theta = BilateralSpec.completed_square(F(3, 2), F(1, 3), F(-1, 6), weight=Weight.ODD)
        return qs.mul(_fermionic_quotient(F(1, 2), N), bilateral_sum(theta, N))
    if fid is FamilyId.LOG_R_K:
        theta = BilateralSpec.completed_square(F(2 * k + 1, 2), F(2 * k - 1, 2 * (2 * k + 1)),
                                               -F((2 * k - 1) ** 2, 8 * (2 * k + 1)), weight=Weight.ODD)
        return qs.mul(_fermionic_quotient(F(1), N), bilateral_sum(theta, N))
    if fid is FamilyId.LOG_R_GEN:
        theta = BilateralSpec.completed_square(F(2 * k + 1, 2), F(2 * i - 1, 4 * k + 2),
                                               -F((2 * i - 1) ** 2, 8 * (2 * k + 1)),
                                               weight=Weight.ODD, one_plus_qn=True)
        return qs.mul(_fermionic_quotient(F(1), N), bilateral_sum(theta, N))
    if fid is FamilyId.EULER_FALSE:
        return qs.mul(bilateral_sum(BilateralSpec(k + 1, k, 0, Weight.SGN), N), euler_inverse(N) ** (2 * k))
    if fid is FamilyId.EULER_MODULAR:
        prod = triple_pochhammer_infinite(1, 2 * k + 2, 2 * k + 3, 2 * k + 3, N)
        return qs.mul(prod, euler_inverse(N) ** (2 * k + 1))
    if fid is FamilyId.MULTISUM_GENERAL:
        theta = BilateralSpec(F(k + 3, 2), F(k + 1, 2), 0,
                              weight=Weight.SGN if k % 2 else Weight.ONE, alternating=(k + 1) % 2 == 1)
        return qs.mul(euler_inverse(N) ** (k + 1), bilateral_sum(theta, N))
    if fid is FamilyId.INV_JACOBI_CT:
        return qs.mul(euler_inverse(N) ** 2, bilateral_sum(BilateralSpec(2, 1, 0, Weight.SGN), N))
    raise DomainError(f"no left side for {fid}")


def _right(fid: FamilyId, p: FamilyParams) -> QSeries:
    N = p.prec
    if fid is FamilyId.SHIFT_DECOMP:
        return odd_theta_decomposition(p.k, p.i, N)[1]
    spec = right_spec(fid, p)
    if fid in _SHIFTED:
        shift = normalizing_shift(fid, p)
        spec = dataclasses.replace(spec, const=spec.const + shift)
        N += shift
    s = nahm_sum(spec, N)
    if fid is FamilyId.RAMANUJAN:
        s = qs.mul(pochhammer_infinite(1, 1, N), s)
    return s


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class FamilyInfo:
    id: FamilyId
    params: Tuple[str, ...]
    anchor: str


def _needs_i(p: FamilyParams) -> None:
    if p.i is None or not 0 <= p.i <= p.k:
        raise DomainError(f"need 0 <= i <= k (got i={p.i}, k={p.k})")


_REGISTRY: Dict[FamilyId, FamilyInfo] = {
    f.id: f
    for f in [
        FamilyInfo(FamilyId.RAMANUJAN, (),
                   "sum sgn(n) q^{2n^2+n} = (q)_inf sum_n q^{n^2+n}/(q)_n^2"),
        FamilyInfo(FamilyId.AG_FALSE, ("k",),
                   "false theta of characteristic k+1 as a k-fold sum over tail sums N_i"),
        FamilyInfo(FamilyId.SHIFTED_NS, ("k", "i", "ell"),
                   "shifted false theta with (-q^{1/2})_inf/(q)_inf, right side (-q^{1/2})_{N_1+ell}"),
        FamilyInfo(FamilyId.SHIFTED_R, ("k", "i", "ell"),
                   "shifted false theta with (-q)_inf/(q)_inf and (1+q^n), right side (-q)_{N_1+ell}"),
        FamilyInfo(FamilyId.SHIFTED_R_IK, ("k", "ell"),
                   "i=k case of the (-q)_inf shifted identity without the (1+q^n) multiplier"),
        FamilyInfo(FamilyId.SHIFT_DECOMP, ("k", "i"),
                   "sum (2n+1) q^{(2k+1)/2 (n+i/(2k+1))^2} as sgn sum plus twice the shifted sums"),
        FamilyInfo(FamilyId.LOG_NS, ("k", "i"),
                   "(2n+1)-weighted theta with (-q^{1/2})_inf/(q)_inf; parity sum with the inverse of (D_{k+1}+E_11)/2"),
        FamilyInfo(FamilyId.LOG_NS_11, (),
                   "q^{-1/6}(-q^{1/2})_inf/(q)_inf sum (2n+1) q^{3/2(n+1/3)^2} as a double sum with n1=n2 mod 2"),
        FamilyInfo(FamilyId.LOG_R_K, ("k",),
                   "(2n+1)-weighted theta with (-q)_inf/(q)_inf, shift (2k-1)/(2(2k+1))"),
        FamilyInfo(FamilyId.LOG_R_GEN, ("k", "i"),
                   "(2n+1)(1+q^n)-weighted theta with (-q)_inf/(q)_inf, shift (2i-1)/(4k+2)"),
        FamilyInfo(FamilyId.EULER_FALSE, ("k",),
                   "sum sgn(n) q^{(k+1)n^2+kn}/(q)_inf^{2k} as a (2k-1)-fold sum with double poles"),
        FamilyInfo(FamilyId.EULER_MODULAR, ("k",),
                   "(q,q^{2k+2},q^{2k+3};q^{2k+3})_inf/(q)_inf^{2k+1} as a 2k-fold sum with double poles"),
        FamilyInfo(FamilyId.MULTISUM_GENERAL, ("k",),
                   "k-fold double-pole sum = (sum_{n>=0} + (-1)^k sum_{n<0}) (-1)^{n(k+1)} q^{((k+3)n^2+(k+1)n)/2}/(q)_inf^{k+1}"),
        FamilyInfo(FamilyId.INV_JACOBI_CT, (),
                   "sum sgn(n) q^{2n^2+n}/(q)_inf^2 = sum_n q^n/(q)_n^2 (constant term of the inverse Jacobi form)"),
    ]
}


def list_families() -> List[FamilyInfo]:
    return list(_REGISTRY.values())


def validate(fid: FamilyId, p: FamilyParams) -> None:
    info = _REGISTRY[fid]
    for name in ("k", "i", "ell"):
        given = getattr(p, name)
        if name in info.params and given is None:
            raise DomainError(f"{fid.slug} needs parameter {name}")
        if name not in info.params and given is not None:
            raise DomainError(f"{fid.slug} takes no parameter {name}")
    if "k" in info.params and p.k < 1:
        raise DomainError(f"need k >= 1 (got k={p.k})")
    if "i" in info.params:
        _needs_i(p)


def build_side(fid: FamilyId, params: FamilyParams, side: Side) -> QSeries:
    validate(fid, params)
    side = Side(side)
    return _left(fid, params) if side is Side.LEFT else _right(fid, params)


def check_family(fid: FamilyId, params: FamilyParams):
    """Build both sides and compare; returns ``(report, left, right)``."""
    validate(fid, params)
    t0 = time.perf_counter()
    left = _left(fid, params)
    right = _right(fid, params)
    shift = normalizing_shift(fid, params)
    cmp = qs.compare_up_to(left, right, min(left.prec, right.prec, params.prec + shift))
    if shift:
        mm = cmp.first_mismatch
        cmp = qs.ComparisonResult(cmp.equal, cmp.compared_up_to - shift,
                                  None if mm is None else (mm[0] - shift, mm[1], mm[2]))
    ms = int((time.perf_counter() - t0) * 1000)
    return VerificationReport.from_comparison(fid.value, params.as_dict(), cmp, ms), left, right


def verify_family(fid: FamilyId, params: FamilyParams) -> VerificationReport:
    """Check one identity instance; mathematical failures are reported, not raised."""
    t0 = time.perf_counter()
    try:
        return check_family(fid, params)[0]
    except DomainError:
        raise
    except QFalseError as exc:
        ms = int((time.perf_counter() - t0) * 1000)
        return VerificationReport(fid.value, params.as_dict(), params.prec, "error", None, ms,
                                  message=str(exc))
