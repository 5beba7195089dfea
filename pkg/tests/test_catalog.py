from fractions import Fraction as F

import pytest

from qfalse import catalog as c
from qfalse import series as qs
from qfalse.builders import euler_inverse, pochhammer_infinite, triple_pochhammer_infinite
from qfalse.catalog import FamilyId as Fam
from qfalse.catalog import FamilyParams as P
from qfalse.catalog import Side
from qfalse.errors import DomainError

from grids import tuples


def side(fid, p, s):
    return c.build_side(fid, p, s)


class TestMatrices:
    @pytest.mark.parametrize("k", range(1, 13))
    def test_inverse_pair(self, k):
        a, b = c.a_matrix(k), c.a_inverse_matrix(k)
        assert (a @ b).is_identity() and (b @ a).is_identity()
        assert a.is_symmetric() and b.is_symmetric()
        assert a.size == b.size == k + 1

    def test_k1_inverse_as_printed(self):
        assert c.a_inverse_matrix(1).entries == ((F(3, 4), F(-1, 4)), (F(-1, 4), F(3, 4)))
        assert c.a_matrix(1).inverse().entries == c.a_inverse_matrix(1).entries

    def test_k2_is_half_d3_plus_corner(self):
        # D_3 forks at its first node, so both off-diagonal entries of row one are -1/2
        h = F(1, 2)
        assert c.a_matrix(2).entries == ((F(3, 2), -h, -h), (-h, 1, 0), (-h, 0, 1))

    def test_k2_matches_cartan_definition(self):
        d = c.d_cartan(3)
        expected = [[(d[i, j] + (1 if i == j == 0 else 0)) / F(2) for j in range(3)] for i in range(3)]
        assert [list(r) for r in c.a_matrix(2).entries] == expected

    def test_d_cartan_d4(self):
        d = c.d_cartan(4)
        assert all(d[i, i] == 2 for i in range(4))
        assert d[1, 2] == d[1, 3] == -1 and d[2, 3] == 0
        assert d.is_symmetric()

    def test_compact_form_entries(self):
        m = c.a_inverse_matrix(3)
        assert m[0, 0] == 1 and m[2, 3] == F(3, 4) and m[3, 3] == F(7, 4)

    @pytest.mark.parametrize("fn", [c.a_matrix, c.a_inverse_matrix])
    def test_domain(self, fn):
        with pytest.raises(DomainError):
            fn(0)


class TestRegistry:
    def test_fourteen_families(self):
        fams = c.list_families()
        assert len(fams) == 14 and {f.id for f in fams} == set(Fam)

    def test_schemas(self):
        schema = {f.id: f.params for f in c.list_families()}
        assert schema[Fam.RAMANUJAN] == ()
        assert schema[Fam.SHIFTED_NS] == ("k", "i", "ell")
        assert all(f.anchor for f in c.list_families())

    @pytest.mark.parametrize("name", ["shifted-ns", "SHIFTED_NS", " Shifted_Ns "])
    def test_parse(self, name):
        assert Fam.parse(name) is Fam.SHIFTED_NS

    def test_parse_unknown_lists_known(self):
        with pytest.raises(DomainError, match="ramanujan"):
            Fam.parse("no-such-family")

    @pytest.mark.parametrize("fid,p", [
        (Fam.AG_FALSE, P(10)),
        (Fam.RAMANUJAN, P(10, k=1)),
        (Fam.SHIFTED_NS, P(10, k=2, i=3, ell=0)),
        (Fam.LOG_NS, P(10, k=2, i=-1)),
        (Fam.AG_FALSE, P(10, k=0)),
    ])
    def test_invalid_params(self, fid, p):
        with pytest.raises(DomainError):
            c.verify_family(fid, p)

    def test_nonpositive_precision(self):
        with pytest.raises(DomainError):
            P(0)


class TestSides:
    def test_ramanujan_left(self):
        assert dict(side(Fam.RAMANUJAN, P(11), Side.LEFT).items()) == {0: 1, 1: -1, 3: 1, 6: -1, 10: 1}

    def test_euler_false_k1_right(self):
        assert dict(side(Fam.EULER_FALSE, P(4, k=1), Side.RIGHT).items()) == {0: 1, 1: 1, 2: 3, 3: 6}

    def test_shifted_ns_trivial_theta(self):
        left = side(Fam.SHIFTED_NS, P(10, k=1, i=0, ell=0), Side.LEFT)
        expected = qs.mul(pochhammer_infinite(-1, F(1, 2), 10), euler_inverse(10))
        assert left == expected

    def test_odd_theta_examples(self):
        for k, i in [(1, 0), (2, 2)]:
            left, right = c.odd_theta_decomposition(k, i, 20)
            assert qs.compare_up_to(left, right, 20).equal

    def test_odd_theta_domain(self):
        with pytest.raises(DomainError):
            c.odd_theta_decomposition(2, 3, 10)


class TestVerify:
    @pytest.mark.parametrize("fid,p", [
        (Fam.RAMANUJAN, P(200)),
        (Fam.SHIFTED_NS, P(40, k=2, i=1, ell=-2)),
        (Fam.EULER_MODULAR, P(30, k=2)),
        (Fam.LOG_NS_11, P(30)),
        (Fam.INV_JACOBI_CT, P(40)),
    ])
    def test_examples_pass(self, fid, p):
        r = c.verify_family(fid, p)
        assert r.passed, r.summary()
        assert r.order == p.prec and r.first_mismatch is None

    @pytest.mark.parametrize("fid", [f for f in Fam if f not in (Fam.EULER_MODULAR,)])
    def test_small_grid(self, fid):
        for p in tuples(fid, range(1, 3), range(-2, 3), prec=15):
            r = c.verify_family(fid, p)
            assert r.passed, r.summary()

    def test_report_json(self):
        js = c.verify_family(Fam.AG_FALSE, P(20, k=2)).to_json(timing=False)
        assert js["family"] == "AG_FALSE" and js["params"] == {"k": 2}
        assert js["order"] == "20/1" and js["status"] == "pass" and js["elapsed_ms"] == 0


class TestLaurentNormalization:
    def test_shift_only_for_ramond_i0_negative_ell(self):
        for fid in (Fam.SHIFTED_NS, Fam.SHIFTED_R):
            for p in tuples(fid, range(1, 4), range(-3, 4)):
                expected = -p.ell if fid is Fam.SHIFTED_R and p.i == 0 and p.ell < 0 else 0
                assert c.normalizing_shift(fid, p) == expected
        assert c.normalizing_shift(Fam.AG_FALSE, P(10, k=2)) == 0

    def test_normalized_sides_start_at_constant(self):
        p = P(15, k=2, i=0, ell=-3)
        left = side(Fam.SHIFTED_R, p, Side.LEFT)
        right = side(Fam.SHIFTED_R, p, Side.RIGHT)
        assert left.prec == 18 and qs.coeff_at(left, 0) == qs.coeff_at(right, 0) != 0

    def test_mismatch_reported_in_original_exponents(self, monkeypatch):
        p = P(12, k=1, i=0, ell=-2)
        real = c._right

        def corrupted(fid, params):
            s = real(fid, params)
            return qs.add(s, qs.monomial(5, 1, s.prec))  # q^3 in the unshifted series

        monkeypatch.setattr(c, "_right", corrupted)
        r = c.verify_family(Fam.SHIFTED_R, p)
        assert not r.passed and r.first_mismatch["exponent"] == 3 and r.order == 12


def _integral(s):
    return all(v.denominator == 1 for _, v in s.items())


class TestCrossFamily:
    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("ell", range(-2, 3))
    def test_ramond_i_equals_k(self, k, ell):
        a = side(Fam.SHIFTED_R, P(30, k=k, i=k, ell=ell), Side.LEFT)
        b = side(Fam.SHIFTED_R_IK, P(30, k=k, ell=ell), Side.LEFT)
        assert qs.compare_up_to(a, b, 30).equal

    def test_euler_false_k1_is_inverse_jacobi(self):
        assert c.right_spec(Fam.EULER_FALSE, P(30, k=1)) == c.right_spec(Fam.INV_JACOBI_CT, P(30))
        a = side(Fam.EULER_FALSE, P(30, k=1), Side.LEFT)
        b = side(Fam.INV_JACOBI_CT, P(30), Side.LEFT)
        assert a == b

    @pytest.mark.parametrize("k", [1, 2])
    def test_even_multisum_is_triple_product(self, k):
        theta = side(Fam.MULTISUM_GENERAL, P(50, k=2 * k), Side.LEFT)
        prod = qs.mul(triple_pochhammer_infinite(1, 2 * k + 2, 2 * k + 3, 2 * k + 3, 50),
                      euler_inverse(50) ** (2 * k + 1))
        assert qs.compare_up_to(theta, prod, 50).equal
        assert qs.compare_up_to(theta, side(Fam.EULER_MODULAR, P(50, k=k), Side.LEFT), 50).equal

    @pytest.mark.parametrize("k", [1, 2])
    def test_log_ns_from_shifted(self, k):
        # weighted sum over ell >= 0 of the shifted right sides, with weight 2 for ell >= 1
        N = F(20)
        for i in range(k + 1):
            total = qs.zero(N)
            ell = 0
            while (e := F(2 * k + 1, 2) * ell * ell + i * ell) < N:
                part = side(Fam.SHIFTED_NS, P(N, k=k, i=i, ell=ell), Side.RIGHT)
                total = qs.add(total, qs.mul(qs.monomial(e, 1 if ell == 0 else 2, N), part))
                ell += 1
            log_ns = side(Fam.LOG_NS, P(N, k=k, i=i), Side.RIGHT)
            assert qs.compare_up_to(total, log_ns, N).equal

    @pytest.mark.parametrize("fid", list(Fam))
    def test_integer_coefficients(self, fid):
        for p in tuples(fid, range(1, 3), range(-2, 3), prec=15):
            for s in (Side.LEFT, Side.RIGHT):
                assert _integral(side(fid, p, s))
