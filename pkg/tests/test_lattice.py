"""Exact lattice engine tests: LLL against the full reduction definition,
sympy as an independent implementation, and brute-force shortest vectors;
SNF against sympy's normal form.
"""

import random
from fractions import Fraction

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from blochlab.errors import DependentRowsError
from blochlab.lattice import (
    determinant,
    identity_matrix,
    integer_matrix_inverse,
    lll_reduce,
    lll_reduce_with_transform,
    mat_mul,
    right_kernel,
    rowspace_rank,
    saturate_rowspace,
    smith_normal_form,
)


def normsq(v):
    return sum(x * x for x in v)


def assert_lll_reduced(basis, delta=Fraction(99, 100)):
    """Check size reduction and the Lovasz condition with exact Fractions."""
    n = len(basis)
    star, mu = [], [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        b = [Fraction(x) for x in basis[i]]
        for j in range(i):
            num = sum(Fraction(x) * y for x, y in zip(basis[i], star[j]))
            den = sum(y * y for y in star[j])
            mu[i][j] = num / den
            b = [bx - mu[i][j] * sx for bx, sx in zip(b, star[j])]
        star.append(b)
    for i in range(n):
        for j in range(i):
            assert abs(mu[i][j]) <= Fraction(1, 2)
    for k in range(1, n):
        bk = sum(x * x for x in star[k])
        bk1 = sum(x * x for x in star[k - 1])
        assert bk >= (delta - mu[k][k - 1] ** 2) * bk1


def test_identity_is_fixed():
    assert lll_reduce(identity_matrix(4)) == identity_matrix(4)


def test_2d_example():
    red = lll_reduce([[1, 0], [4, 1]])
    # brute force: shortest vectors of this lattice (it is Z^2)
    assert max(normsq(r) for r in red) <= normsq([4, 1])
    assert_lll_reduced(red)
    d, _, _ = smith_normal_form(red)
    assert [d[0][0], d[1][1]] == [1, 1]


def test_unimodular_scramble_meets_lll_bound():
    rng = random.Random(9)
    for _ in range(10):
        u = identity_matrix(5)
        for _ in range(15):
            i, j = rng.sample(range(5), 2)
            c = rng.randint(-5, 5)
            for k in range(5):
                u[i][k] += c * u[j][k]
        red = lll_reduce(u)
        # lattice is Z^5 with lambda_1 = 1 (brute-force fact); LLL bound 2^((5-1)/2)
        assert all(normsq(r) <= 2 ** 4 for r in red)
        assert_lll_reduced(red)


def test_lll_transform_is_unimodular_and_exact():
    rng = random.Random(10)
    for _ in range(25):
        n = rng.randint(2, 6)
        a = [[rng.randint(-60, 60) for _ in range(n)] for _ in range(n)]
        if determinant(a) == 0:
            continue
        red, u = lll_reduce_with_transform(a)
        assert mat_mul(u, a) == red
        assert abs(determinant(u)) == 1
        assert_lll_reduced(red)
        # same lattice: identical Smith normal forms
        my = [abs(x) for x in sympy_snf(Matrix(a)).diagonal()]
        theirs = [abs(x) for x in sympy_snf(Matrix(red)).diagonal()]
        assert my == theirs


def test_lll_first_vector_against_brute_force():
    rng = random.Random(12)
    for _ in range(8):
        a = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(3)]
        if determinant(a) == 0:
            continue
        red = lll_reduce(a)
        best = min(
            normsq([sum(c[k] * a[k][j] for k in range(3)) for j in range(3)])
            for c in ((i, j, k) for i in range(-4, 5) for j in range(-4, 5)
                      for k in range(-4, 5))
            if any(c))
        assert normsq(red[0]) <= 4 * best  # 2^(n-1) * lambda_1^2 with n = 3


def test_dependent_rows_detected():
    with pytest.raises(DependentRowsError):
        lll_reduce([[1, 2], [2, 4]])
    with pytest.raises(DependentRowsError):
        lll_reduce([[1, 2, 3], [4, 5, 6], [5, 7, 9]])


def test_snf_against_sympy():
    rng = random.Random(13)
    for _ in range(40):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        a = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        d, u, v = smith_normal_form(a)
        assert mat_mul(mat_mul(u, a), v) == d
        assert abs(determinant(u)) == 1
        assert abs(determinant(v)) == 1
        diag = [d[i][i] for i in range(min(r, c))]
        for i in range(len(diag) - 1):
            if diag[i + 1]:
                assert diag[i] != 0 and diag[i + 1] % diag[i] == 0
        ref = [abs(x) for x in sympy_snf(Matrix(a)).diagonal()]
        ref += [0] * (min(r, c) - len(ref))
        assert diag == ref


def test_integer_inverse():
    u = [[1, 2], [1, 3]]
    assert mat_mul(integer_matrix_inverse(u), u) == identity_matrix(2)


def test_right_kernel():
    a = [[2, 4, 6]]
    kern = right_kernel(a)
    assert len(kern) == 2
    for v in kern:
        assert sum(x * y for x, y in zip(a[0], v)) == 0


def test_saturation():
    assert saturate_rowspace([[2, 4, 6]]) == [[1, 2, 3]]
    sat = saturate_rowspace([[2, 0], [0, 3]])
    assert abs(determinant(sat)) == 1  # saturation of a finite-index lattice is Z^2
    assert saturate_rowspace([]) == []
    assert rowspace_rank([[1, 2], [2, 4]]) == 1
