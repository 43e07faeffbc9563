import random
from fractions import Fraction

import pytest

from liepde import reference
from liepde.adjoint import (
    EPS,
    ExpPolynomial,
    ad_exp,
    ad_matrix,
    char_poly,
    mat_apply_row,
    mat_mul,
    matrix_exp,
    rational_eigenvalues,
)
from liepde.errors import UnsupportedSpectrumError

F = Fraction


def unit(n, i):
    v = [F(0)] * n
    v[i] = F(1)
    return tuple(v)


def baseline_matrix(i):
    return [
        [
            ExpPolynomial.constant(0, (EPS,)) if cell == 0
            else ExpPolynomial.term(cell[2], cell[0], cell[1])
            for cell in row
        ]
        for row in reference.adjoint_matrix_entries(i)
    ]


class TestExpPolynomial:
    def test_value_at_zero(self):
        e = ExpPolynomial.term(3, 0, 2) + ExpPolynomial.term(5, 1, 0)
        assert e.value_at_zero() == 3

    def test_ring_ops(self):
        a = ExpPolynomial.term(1, 1, 1)  # eps e^eps
        b = ExpPolynomial.term(2, 0, -1)  # 2 e^-eps
        prod = a * b  # 2 eps
        assert prod == ExpPolynomial.term(2, 1, 0)
        assert (a - a).is_zero()

    def test_unique_keys(self):
        a = ExpPolynomial.term(1, 1, 2) + ExpPolynomial.term(2, 1, 2)
        assert len(a.terms) == 1

    def test_derivative(self):
        e = ExpPolynomial.term(1, 2, 3)  # eps^2 e^{3 eps}
        d = e.derivative()
        assert d == ExpPolynomial.term(2, 1, 3) + ExpPolynomial.term(3, 2, 3)

    def test_integration_against_derivative(self):
        rng = random.Random(67)
        for _ in range(100):
            e = ExpPolynomial.constant(0)
            for _ in range(3):
                e = e + ExpPolynomial.term(
                    F(rng.randint(-4, 4)), rng.randint(0, 2),
                    F(rng.randint(-2, 2)),
                )
            integral = e.integrate()
            assert integral.derivative() == e
            assert integral.value_at_zero() == 0

    def test_substitute_rational(self):
        e = ExpPolynomial.term(1, 1, 0)
        assert e.substitute(EPS, F(3, 2)).rational_value() == F(3, 2)
        exp_part = ExpPolynomial.term(1, 0, 2).substitute(EPS, F(1, 2))
        # e^(2 * 1/2) = e^1: exact constant exponential, not a rational
        assert exp_part.rational_value() is None
        ((r, _, _),) = exp_part.terms
        assert r == 1

    def test_substitute_sum_binomial(self):
        e = ExpPolynomial.term(1, 2, 1)
        expanded = e.substitute_sum(EPS, ("eps", "delta"))
        direct = expanded.substitute("delta", F(0))
        assert direct == e


class TestMatrixExp:
    def test_zero_matrix(self):
        E = matrix_exp([[F(0)]])
        assert E[0][0] == ExpPolynomial.constant(1)

    def test_nilpotent(self):
        E = matrix_exp([[F(0), F(1)], [F(0), F(0)]])
        assert E[0][1] == ExpPolynomial.term(1, 1, 0)

    def test_diagonalizable(self):
        E = matrix_exp([[F(2), F(0)], [F(0), F(-1)]])
        assert E[0][0] == ExpPolynomial.term(1, 0, 2)
        assert E[1][1] == ExpPolynomial.term(1, 0, -1)

    def test_jordan_block(self):
        # [[1,1],[0,1]]: exp = e^t [[1,t],[0,1]]
        E = matrix_exp([[F(1), F(1)], [F(0), F(1)]])
        assert E[0][0] == ExpPolynomial.term(1, 0, 1)
        assert E[0][1] == ExpPolynomial.term(1, 1, 1)

    def test_group_law_two_parameters(self):
        A = [[F(1), F(1)], [F(0), F(-2)]]
        Ee = matrix_exp(A, "eps")
        Ed = matrix_exp(A, "delta")
        prod = mat_mul(Ee, Ed)
        via_sub = [
            [e.substitute_sum("eps", ("eps", "delta")) for e in row] for row in Ee
        ]
        assert all(
            a == b for ra, rb in zip(prod, via_sub) for a, b in zip(ra, rb)
        )

    def test_irrational_spectrum_rejected(self):
        with pytest.raises(UnsupportedSpectrumError):
            matrix_exp([[F(0), F(2)], [F(1), F(0)]])  # eigenvalues +-sqrt(2)

    def test_char_poly_and_roots(self):
        A = [[F(2), F(1)], [F(0), F(3)]]
        p = char_poly(A)
        roots = rational_eigenvalues(p)
        assert roots == {F(2): 1, F(3): 1}


class TestAdMatrix:
    def test_diagonal_action_of_v4(self, algebra):
        A = ad_matrix(algebra, unit(5, 3))
        # ad(v4) v1 = -v1, ad(v4) v3 = -2 v3, zero otherwise
        expected = {(0, 0): F(-1), (2, 2): F(-2)}
        for r in range(5):
            for c in range(5):
                assert A[r][c] == expected.get((r, c), F(0))

    def test_nilpotent_single_entry(self, algebra):
        A = ad_matrix(algebra, unit(5, 0))
        # ad(v1) v4 = v1
        assert A[0][3] == F(1)
        assert sum(1 for r in range(5) for c in range(5) if A[r][c]) == 1

    def test_central_element_zero(self, golden):
        from liepde.structure import structure_constants

        _, _, gens = golden
        L = structure_constants(list(gens[:3]))
        A = ad_matrix(L, unit(3, 0))
        assert all(all(x == 0 for x in row) for row in A)


class TestAdExp:
    def test_matches_baseline_except_stray_entry(self, algebra):
        for i in range(5):
            M = ad_exp(algebra, i)
            B = baseline_matrix(i)
            strays = reference.BASELINE_ADJOINT_DELTAS.get(i, ())
            for r in range(5):
                for c in range(5):
                    if (r, c) in strays:
                        assert M[r][c] != B[r][c]
                    else:
                        assert M[r][c] == B[r][c], (i, r, c)

    def test_lie_series_orientation(self, algebra):
        # Ad(exp(eps v1)) v4 = v4 - eps v1
        M = ad_exp(algebra, 0)
        row = M[3]
        assert row[0] == ExpPolynomial.term(-1, 1, 0)
        assert row[3] == ExpPolynomial.constant(1)

    def test_scaling_entry(self, algebra):
        # Ad(exp(eps v5)) v3 = e^(-4 eps) v3
        M = ad_exp(algebra, 4)
        assert M[2][2] == ExpPolynomial.term(1, 0, -4)

    def test_identity_at_zero(self, algebra):
        for i in range(5):
            M = ad_exp(algebra, i)
            for r in range(5):
                for c in range(5):
                    v = M[r][c].substitute(EPS, F(0)).rational_value()
                    assert v == (1 if r == c else 0)

    def test_inverse_at_negated_parameter(self, algebra):
        # Ad matrices at eps and -eps multiply to the identity; checked at
        # exact rational points (entries stay exact constant exponentials)
        for i in range(5):
            M = ad_exp(algebra, i)
            for val in (F(1, 2), F(-2)):
                A = [[e.substitute(EPS, val) for e in row] for row in M]
                B = [[e.substitute(EPS, -val) for e in row] for row in M]
                P = mat_mul(A, B)
                for r in range(5):
                    for c in range(5):
                        got = P[r][c]
                        want = ExpPolynomial.constant(1 if r == c else 0, ())
                        assert got == want

    def test_ad_homomorphism_preserves_constants(self, algebra):
        # [Ad x_j, Ad x_k] = Ad [x_j, x_k] over ExpPolynomial entries
        n = algebra.n
        for i in range(n):
            M = ad_exp(algebra, i)
            rows = [M[j] for j in range(n)]
            for j in range(n):
                for k in range(n):
                    lhs = [ExpPolynomial.constant(0) for _ in range(n)]
                    # bracket of images, expanded bilinearly
                    for a in range(n):
                        for b in range(n):
                            coeff = rows[j][a] * rows[k][b]
                            if coeff.is_zero():
                                continue
                            cvec = algebra.constants[a][b]
                            for t in range(n):
                                if cvec[t]:
                                    lhs[t] = lhs[t] + coeff * ExpPolynomial.constant(
                                        cvec[t]
                                    )
                    image_bracket = algebra.bracket_coords(unit(n, j), unit(n, k))
                    rhs = mat_apply_row(
                        [ExpPolynomial.constant(x) for x in image_bracket], M
                    )
                    for t in range(n):
                        assert lhs[t] == rhs[t], (i, j, k, t)
