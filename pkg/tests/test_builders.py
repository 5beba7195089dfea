from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfalse import series as qs
from qfalse.builders import (INF, AffineLength, BilateralSpec, BoundKind, NahmSpec, Parity,
                             PochhammerFactor, Weight, bilateral_sum, euler_inverse, nahm_sum,
                             pochhammer_finite, pochhammer_infinite, pochhammer_inverse, qpoch,
                             triple_pochhammer_infinite)
from qfalse.errors import (DivergenceError, DomainError, NegativeLengthError,
                           WitnessViolationError)

from oracle import as_poly, bilateral, box_sum, partitions, poch


def terms(s):
    return dict(s.items())


class TestPochhammer:
    def test_finite_q2(self):
        assert terms(pochhammer_finite(1, 1, 2, 10)) == {0: 1, 1: -1, 2: -1, 3: 1}

    def test_finite_half(self):
        assert terms(pochhammer_finite(-1, F(1, 2), 1, 10)) == {0: 1, F(1, 2): 1}

    def test_empty_product(self):
        for sign in (1, -1):
            assert terms(pochhammer_finite(sign, F(3, 2), 0, 7)) == {0: 1}

    def test_negative_length(self):
        with pytest.raises(NegativeLengthError):
            pochhammer_finite(1, 1, -1, 5)
        with pytest.raises(NegativeLengthError):
            pochhammer_inverse(1, 1, -2, 5)

    def test_pentagonal(self):
        assert terms(pochhammer_infinite(1, 1, 13)) == {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1}

    def test_fermionic_half(self):
        s = pochhammer_infinite(-1, F(1, 2), 3)
        assert terms(s) == {0: 1, F(1, 2): 1, F(3, 2): 1, 2: 1, F(5, 2): 1}

    def test_no_factor_below_precision(self):
        assert terms(pochhammer_infinite(1, 5, 5)) == {0: 1}

    @pytest.mark.parametrize("c", [0, F(-1, 2)])
    def test_divergent(self, c):
        with pytest.raises(DivergenceError):
            pochhammer_infinite(1, c, 5)
        with pytest.raises(DivergenceError):
            pochhammer_inverse(1, c, None, 5)

    @pytest.mark.parametrize("sign,c,n", [(1, 1, 4), (-1, F(1, 2), 5), (1, F(2, 3), None), (-1, 2, None)])
    def test_against_factorwise_product(self, sign, c, n):
        prec = F(12)
        if n is None:
            assert as_poly(pochhammer_infinite(sign, c, prec)) == poch(sign, F(c), None, prec)
        else:
            assert as_poly(pochhammer_finite(sign, c, n, prec)) == poch(sign, F(c), n, prec)
        assert as_poly(pochhammer_inverse(sign, c, n, prec)) == poch(sign, F(c), n, prec, inverse=True)

    def test_euler_inverse_partitions(self):
        e = euler_inverse(25)
        assert [qs.coeff_at(e, m) for m in range(25)] == [partitions(m) for m in range(25)]
        prod = qs.mul(e, pochhammer_infinite(1, 1, 25))
        assert qs.compare_up_to(prod, qs.one(25), 25).equal

    def test_euler_inverse_domain(self):
        with pytest.raises(DomainError):
            euler_inverse(0)

    @pytest.mark.parametrize("sign", [1, -1])
    @pytest.mark.parametrize("c", [F(1), F(1, 2), F(2)])
    def test_euler_expansion(self, sign, c):
        # (sign-adjusted q^c)_inf = sum_m (-sign)^m q^(cm + m(m-1)/2) / (q)_m
        N = F(20)
        total = qs.zero(N)
        m = 0
        while c * m + F(m * (m - 1), 2) < N:
            e = c * m + F(m * (m - 1), 2)
            term = qs.mul(qs.monomial(e, (-sign) ** m, N), pochhammer_inverse(1, 1, m, N))
            total = qs.add(total, term)
            m += 1
        assert qs.compare_up_to(total, pochhammer_infinite(sign, c, N), N).equal

    @pytest.mark.parametrize("m", range(7))
    @pytest.mark.parametrize("c", [1, 2, 3])
    def test_finite_q_binomial(self, m, c):
        N = F(60)
        total = qs.zero(N)
        for n in range(m + 1):
            binom = qs.mul(pochhammer_finite(1, 1, m, N),
                           qs.mul(pochhammer_inverse(1, 1, n, N), pochhammer_inverse(1, 1, m - n, N)))
            e = F(n * (n - 1), 2) + c * n
            total = qs.add(total, qs.mul(qs.monomial(e, (-1) ** n, N), binom))
        assert total == pochhammer_finite(1, c, m, N)


class TestTripleProduct:
    def test_definition(self):
        direct = qs.mul(qs.mul(pochhammer_infinite(1, 1, 30, step=5), pochhammer_infinite(1, 4, 30, step=5)),
                        pochhammer_infinite(1, 5, 30, step=5))
        assert triple_pochhammer_infinite(1, 4, 5, 5, 30) == direct

    def test_jacobi_k1(self):
        # (q, q^4, q^5; q^5)_inf = sum_n (-1)^n q^((5n^2 + 3n)/2)
        prod = triple_pochhammer_infinite(1, 4, 5, 5, 40)
        theta = bilateral_sum(BilateralSpec(F(5, 2), F(3, 2), 0, Weight.ONE, alternating=True), 40)
        assert prod == theta

    def test_step_three(self):
        direct = qs.mul(pochhammer_infinite(1, 1, 20), pochhammer_infinite(1, 2, 20, step=3))
        direct = qs.mul(direct, pochhammer_infinite(1, 3, 20, step=3))
        direct = qs.mul(direct, pochhammer_infinite(1, 1, 20, step=3))
        ours = qs.mul(triple_pochhammer_infinite(1, 2, 3, 3, 20), pochhammer_infinite(1, 1, 20))
        assert ours == direct

    def test_nonpositive(self):
        with pytest.raises(DivergenceError):
            triple_pochhammer_infinite(0, 1, 2, 3, 10)
        with pytest.raises(DivergenceError):
            triple_pochhammer_infinite(1, 1, 2, 0, 10)


class TestBilateral:
    def test_sgn_example(self):
        s = bilateral_sum(BilateralSpec(2, 1, 0, Weight.SGN), 11)
        assert terms(s) == {0: 1, 1: -1, 3: 1, 6: -1, 10: 1}

    def test_odd_constant_term(self):
        s = bilateral_sum(BilateralSpec(F(3, 2), F(1, 3), F(2, 7), Weight.ODD), 6)
        assert qs.coeff_at(s, F(2, 7)) == 1

    def test_sgn_shifted_example(self):
        s = bilateral_sum(BilateralSpec(F(3, 2), 0, 0, Weight.SGN_SHIFTED, ell=1), 7)
        assert terms(s)[F(3, 2)] == 1
        # n=-2 gives -q^6 and n=2 gives +q^6
        assert qs.coeff_at(s, 6) == 0
        assert terms(s) == {F(3, 2): 1}

    @pytest.mark.parametrize("weight", ["sgn", "odd", "one", "sgn_shifted"])
    @pytest.mark.parametrize("alpha,beta,gamma", [(2, 1, 0), (F(5, 2), F(1, 2), F(1, 10)), (F(3, 2), 0, 0)])
    @pytest.mark.parametrize("ell", [0, 2, -1])
    def test_against_enumeration(self, weight, alpha, beta, gamma, ell):
        spec = BilateralSpec(alpha, beta, gamma, Weight(weight), ell=ell)
        assert as_poly(bilateral_sum(spec, 30)) == bilateral(weight, alpha, beta, gamma, 30, ell)

    @given(st.fractions(min_value=F(1, 2), max_value=4, max_denominator=6),
           st.fractions(min_value=-3, max_value=3, max_denominator=6))
    @settings(max_examples=60)
    def test_sgn_reflection(self, alpha, beta):
        # n -> -n pairs every n != 0 with the opposite sign, so only the n = 0 term survives twice
        gamma = max(F(0), beta * beta / (4 * alpha)) + 1
        a = bilateral_sum(BilateralSpec(alpha, beta, gamma, Weight.SGN), 15)
        b = bilateral_sum(BilateralSpec(alpha, -beta, gamma, Weight.SGN), 15)
        assert qs.add(a, b) == qs.monomial(gamma, 2, 15)

    def test_one_plus_qn(self):
        spec = BilateralSpec(F(5, 2), F(1, 2), 0, Weight.SGN, one_plus_qn=True)
        plain = bilateral_sum(BilateralSpec(F(5, 2), F(1, 2), 0, Weight.SGN), 25)
        shifted = bilateral_sum(BilateralSpec(F(5, 2), F(3, 2), 0, Weight.SGN), 25)
        assert bilateral_sum(spec, 25) == qs.add(plain, shifted)

    def test_negative_exponent_refused(self):
        with pytest.raises(DomainError):
            bilateral_sum(BilateralSpec(1, 0, -1, Weight.ONE), 5)

    def test_alpha_must_be_positive(self):
        with pytest.raises(DomainError):
            BilateralSpec(0, 1, 0)


def one_dim(lin, factors=(), quad=2, **kw):
    return NahmSpec(1, ((F(quad),),), (F(lin),), factors=tuple(factors), **kw)


class TestNahm:
    def test_double_pole_k1(self):
        # sum q^(n^2+n)/(q)_n^2
        spec = one_dim(1, [qpoch(1, {0: 1}, power=2)])
        s = nahm_sum(spec, 10)
        # below q^6 only n <= 1 contributes: 1 + q^2/(1-q)^2
        assert [qs.coeff_at(s, m) for m in range(6)] == [1, 0, 1, 2, 3, 4]
        assert as_poly(s) == box_sum(spec, 10)

    def test_inverse_jacobi_k1(self):
        spec = NahmSpec(1, ((F(0),),), (F(1),), factors=(qpoch(1, {0: 1}, power=2),),
                        bound_hint=BoundKind.LINEAR, witness=(F(1),))
        assert terms(nahm_sum(spec, 4)) == {0: 1, 1: 1, 2: 3, 3: 6}

    def test_only_zero_survives(self):
        assert terms(nahm_sum(one_dim(50, [qpoch(1, {0: 1})]), 10)) == {0: 1}

    def test_parity_first_term(self):
        quad = ((F(3, 4), F(-1, 4)), (F(-1, 4), F(3, 4)))
        spec = NahmSpec(2, quad, (F(1, 2), F(1, 2)), factors=(qpoch(2, {0: 1}), qpoch(2, {1: 1})),
                        parities=(Parity((1, -1)),))
        s = nahm_sum(spec, 3)
        # (1,1) contributes q^(1/2 + 1) / (1-q)^2, and odd totals are excluded
        items = terms(s)
        assert items[0] == 1 and min(e for e in items if e) == F(3, 2)

    def test_negative_denominator_length_vanishes(self):
        # (q)_{n-2}^{-1} is zero for n < 2, so the sum starts at n = 2
        spec = one_dim(0, [qpoch(1, {0: 1}, -2)])
        assert min(e for e, _ in nahm_sum(spec, 12).items()) == 4

    def test_negative_numerator_length_raises(self):
        spec = one_dim(0, [qpoch(1, {0: 1}, -2, location="numerator")])
        with pytest.raises(NegativeLengthError):
            nahm_sum(spec, 12)

    def test_witness_violation(self):
        # E(n) = n/3 is not bounded below by the claimed witness n
        spec = NahmSpec(1, ((F(0),),), (F(1, 3),), bound_hint=BoundKind.LINEAR, witness=(F(1),))
        with pytest.raises(WitnessViolationError):
            nahm_sum(spec, 5)

    def test_not_positive_definite(self):
        with pytest.raises(DomainError):
            NahmSpec(2, ((F(1), F(2)), (F(2), F(1))), (F(0), F(0)))

    def test_signs(self):
        plain = nahm_sum(one_dim(1, [qpoch(1, {0: 1})]), 15)
        alt = nahm_sum(one_dim(1, [qpoch(1, {0: 1})], signs=(1,)), 15)
        # sum (-1)^n q^(n^2+n)/(q)_n versus the plain one differ exactly on odd n
        diff = qs.add(plain, alt.scaled(-1))
        odd = qs.zero(15)
        for n in (1, 3):
            odd = qs.add(odd, qs.mul(qs.monomial(n * n + n, 2, 15), pochhammer_inverse(1, 1, n, 15)))
        assert diff == odd

    def test_json_round_trip(self):
        spec = NahmSpec(2, ((F(3, 4), F(-1, 4)), (F(-1, 4), F(3, 4))), (F(1, 2), F(1, 2)), F(1, 3),
                        factors=(qpoch(2, {0: F(1, 2), 1: F(1, 2)}, sign=-1, offset=F(1, 2),
                                       location="numerator"),
                                 qpoch(2, {0: 1}, power=2),
                                 PochhammerFactor(1, 1, INF)),
                        parities=(Parity((1, -1), 2),), signs=(1, 0))
        assert NahmSpec.from_json(spec.to_json()) == spec
        lin = NahmSpec(1, ((F(0),),), (F(1),), bound_hint=BoundKind.LINEAR, witness=(F(1),))
        assert NahmSpec.from_json(lin.to_json()) == lin

    def test_fractional_length(self):
        with pytest.raises(DomainError):
            AffineLength((F(1, 2),))((1,))
