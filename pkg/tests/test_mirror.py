"""Torus mirrors, Jacobian quotients, and wedge spectra."""

from fractions import Fraction

import pytest

from altfrob.linalg import Mat, charpoly, laurent_ring
from altfrob.mirror import (
    BrieskornPoint,
    LaurentPoly,
    compare_quantum_gm,
    convenience_witness,
    gm_wedge,
    is_convenient,
    jacobian_algebra,
    kouchnirenko_bound,
    mirror_brieskorn,
    mirror_f,
    mult_f_matrix,
    subset_sum_charpoly,
    torus_relations,
    ts_tensor,
)
from altfrob.rings import Laurent

QV = ("q",)
QRING = laurent_ring(QV)
ONE = Laurent.const(QV, 1)
ZERO = Laurent.zero(QV)
Q = Laurent.gen(QV, "q")


def qc(c):
    return Laurent.const(QV, c)


class TestLaurentPoly:
    def test_mirror_terms(self):
        f = mirror_f(2)
        assert f.terms == {(1, 0): ONE, (0, 1): ONE, (-1, -1): Q}

    def test_relations_are_binomial(self):
        for rel in torus_relations(mirror_f(3)):
            assert len(rel.terms) == 2

    def test_ring_operations(self):
        u = LaurentPoly.monomial(1, (1,))
        uinv = LaurentPoly.monomial(1, (-1,))
        f = u + uinv
        assert (f * f).terms == {(2,): ONE, (0,): qc(2), (-2,): ONE}
        assert f.shift((1,)).terms == {(2,): ONE, (0,): ONE}
        assert (f - f).is_zero()

    def test_logderiv(self):
        f = mirror_f(2)
        assert f.logderiv(0).terms == {(1, 0): ONE, (-1, -1): -Q}

    def test_json_round_trip(self):
        f = mirror_f(3).scale(Fraction(2, 3))
        assert LaurentPoly.from_json(f.to_json()) == f

    def test_json_shape(self):
        doc = mirror_f(1).to_json()
        assert doc == {"n": 1, "terms": [
            {"exp": [-1], "coef": [[1, "1"]]},
            {"exp": [1], "coef": [[0, "1"]]}]}


class TestConvenience:
    def test_mirror_is_convenient(self):
        for n in range(1, 6):
            assert is_convenient(mirror_f(n))

    def test_single_monomial_is_not(self):
        assert not is_convenient(LaurentPoly.monomial(1, (1,)))
        assert not is_convenient(LaurentPoly.monomial(3, (1, 2, 1)))

    def test_half_space_support(self):
        # u1 + u2 + 1/u1: the second coordinate never goes negative
        f = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (-1, 0): 1})
        witness = convenience_witness(f)
        assert witness is not None and "one side" in witness

    def test_rank_deficient_support(self):
        f = LaurentPoly(2, {(1, 0): 1, (-1, 0): 1})
        assert "rank 1" in convenience_witness(f)

    def test_kouchnirenko_bound(self):
        for n in range(1, 6):
            assert kouchnirenko_bound(mirror_f(n)) == n + 1
        with pytest.raises(ValueError, match="simplex"):
            kouchnirenko_bound(LaurentPoly(1, {(1,): 1, (-1,): 1, (2,): 1}))


class TestJacobianAlgebra:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_mirror_dimension_and_flag_basis(self, n):
        J = jacobian_algebra(mirror_f(n), expected_dim=n + 1)
        assert J.dim == n + 1
        expected = [(0,) * n] + [(0,) * (k - 1) + (-1,) * (n - k + 1)
                                 for k in range(1, n + 1)]
        assert list(J.basis) == expected
        assert J.dressing == (0,) + (1,) * n

    def test_not_convenient_raises(self):
        with pytest.raises(ValueError, match="not convenient"):
            jacobian_algebra(LaurentPoly.monomial(1, (1,)))

    def test_double_cover_of_the_line(self):
        J = jacobian_algebra(LaurentPoly(1, {(1,): 1, (-1,): 1}))
        assert J.dim == 2
        assert J.basis == ((0,), (-1,))

    def test_expected_dim_mismatch_raises(self):
        with pytest.raises(ValueError, match="does not match"):
            jacobian_algebra(mirror_f(1), expected_dim=3)

    def test_reduce_monomial_reaches_outside_the_box(self):
        J = jacobian_algebra(mirror_f(1))
        far = J.reduce_monomial((2 * J.box + 2,))
        # u^k is q^ceil(k/2) times a basis monomial, here an even power
        ((b, v),) = far.items()
        assert b in J.basis
        assert v.try_laurent() is not None


class TestMultiplication:
    def test_printed_matrix_line(self):
        J = jacobian_algebra(mirror_f(1))
        assert mult_f_matrix(J) == Mat([[ZERO, 2 * Q], [qc(2), ZERO]])

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_subdiagonal_shape(self, n):
        M = mult_f_matrix(jacobian_algebra(mirror_f(n)))
        d = n + 1
        for i in range(d):
            for j in range(d):
                if i == j + 1:
                    assert M[i, j] == qc(n + 1)
                elif i == 0 and j == d - 1:
                    assert M[i, j] == (n + 1) * Q
                else:
                    assert M[i, j].is_zero(), (i, j)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_trace_and_charpoly(self, n):
        M = mult_f_matrix(jacobian_algebra(mirror_f(n)))
        assert sum((M[i, i] for i in range(n + 1)), ZERO).is_zero()
        cp = charpoly(M, QRING)
        expected = [ONE] + [ZERO] * n + [qc(-((n + 1) ** (n + 1))) * Q]
        assert cp == expected


class TestTensorAndWedge:
    def test_kronecker_sum_spectrum(self):
        P1 = mirror_brieskorn(1)
        T = ts_tensor(P1, P1)
        assert T.rank == 4
        # eigenvalues +-2 sqrt(q) doubled: at q = 1 the spectrum is 4,0,0,-4
        assert charpoly(T.R0, QRING) == [ONE, ZERO, -16 * Q, ZERO, ZERO]

    def test_tensor_is_associative(self):
        P1 = mirror_brieskorn(1)
        P2 = mirror_brieskorn(2)
        left = ts_tensor(ts_tensor(P1, P2), P1)
        right = ts_tensor(P1, ts_tensor(P2, P1))
        assert charpoly(left.R0, QRING) == charpoly(right.R0, QRING)
        assert left.rank == right.rank == 12

    def test_wedge_of_projective_plane_mirror(self):
        W = gm_wedge(mirror_brieskorn(2), 2)
        assert W.rank == 3
        assert charpoly(W.R0, QRING) == [ONE, ZERO, ZERO, 27 * Q]

    def test_wedge_labels_and_rank(self):
        W = gm_wedge(mirror_brieskorn(2), 2)
        assert len(W.labels) == 3
        assert W.labels[0] == "1^q*u^(-1,-1)"


class TestSubsetSumCharpoly:
    def test_cube_root_pairs(self):
        p = [ONE, ZERO, ZERO, -27 * Q]
        assert subset_sum_charpoly(p, 2) == [ONE, ZERO, ZERO, 27 * Q]

    def test_plus_minus_two(self):
        assert subset_sum_charpoly([ONE, ZERO, qc(-4)], 2) == [ONE, ZERO]

    def test_singletons_reproduce_the_input(self):
        p = [ONE, qc(3), -5 * Q, qc(7)]
        assert subset_sum_charpoly(p, 1) == p

    def test_full_subset_is_the_trace(self):
        # the only 3-subset of a 3x3 spectrum sums to the trace, here 0
        p = [ONE, ZERO, ZERO, -27 * Q]
        assert subset_sum_charpoly(p, 3) == [ONE, ZERO]

    def test_matches_wedge_for_tensor_square(self):
        T = ts_tensor(mirror_brieskorn(1), mirror_brieskorn(1))
        for r in (1, 2, 3):
            assert subset_sum_charpoly(charpoly(T.R0, QRING), r) == \
                charpoly(gm_wedge(T, r).R0, QRING)


class TestQuantumComparison:
    @pytest.mark.parametrize("r,n", [(r, n) for n in range(1, 5)
                                     for r in range(1, n + 1)])
    def test_all_small_wedges_agree(self, r, n):
        rep = compare_quantum_gm(r, n)
        assert rep.ok, "\n".join(rep.lines())

    def test_projective_plane_charpoly_value(self):
        W = gm_wedge(mirror_brieskorn(2), 2)
        assert charpoly(W.R0, QRING) == [ONE, ZERO, ZERO, 27 * Q]

    def test_rejects_bad_degrees(self):
        with pytest.raises(ValueError):
            compare_quantum_gm(3, 2)
        with pytest.raises(ValueError):
            gm_wedge(mirror_brieskorn(1), 3)
