"""Pre-Bloch calculus tests: five-term relation, multiplicative bases with
exact verification, the mu-map verdicts, the involution and eigenspace
split.  Exactness is the point: ZERO_EXACT claims are proven statements.
"""

import random
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from blochlab.blochgroup import (
    NONZERO_MODULO_SEARCH,
    ZERO_EXACT,
    FormalSum,
    build_multiplicative_basis,
    eigenspace_split,
    five_term,
    formal_sum_from_dict,
    involution,
    mu,
)
from blochlab.dilog import bloch_wigner_d2
from blochlab.errors import DegenerateConfigurationError, NotStableError
from blochlab.numberfield import EmbeddedField, make_field
from blochlab.precision import PrecisionContext

CTX = PrecisionContext(256)


@pytest.fixture(scope="module")
def z6():
    f = make_field("x^2-x+1")
    return EmbeddedField(f, 1)


@pytest.fixture(scope="module")
def z5():
    f = make_field("x^4+x^3+x^2+x+1")
    return EmbeddedField(f, 1)


@pytest.fixture(scope="module")
def cubic():
    f = make_field("x^3-x^2+1")
    return EmbeddedField(f, 2)


def rand_elem(f, rng, h=3):
    while True:
        x = f.element([Fraction(rng.randint(-h, h), rng.randint(1, h))
                       for _ in range(f.degree)])
        if not (x.is_zero() or x.is_one()):
            return x


def rand_five_term(e, rng):
    while True:
        try:
            return five_term(e, rand_elem(e.field, rng), rand_elem(e.field, rng))
        except DegenerateConfigurationError:
            continue


def test_five_term_exact_example(z6):
    f = z6.field
    ft = five_term(z6, f.rational(2), f.rational(3))
    got = {z.as_rational(): c for z, c in ft.items()}
    assert got == {Fraction(2): 1, Fraction(3): -1, Fraction(3, 2): 1,
                   Fraction(3, 4): -1, Fraction(1, 2): 1}


def test_five_term_degenerate(z6):
    f = z6.field
    with pytest.raises(DegenerateConfigurationError) as exc:
        five_term(z6, f.rational(2), f.rational(2))
    assert exc.value.term == "y/x"
    with pytest.raises(DegenerateConfigurationError):
        five_term(z6, f.zero(), f.rational(3))


def test_formal_sum_algebra(z6):
    f = z6.field
    a = FormalSum(z6, [(f.gen(), 2), (f.rational(2), 1)])
    b = FormalSum(z6, [(f.gen(), -2)])
    s = a + b
    assert s.coefficient(f.gen()) == 0
    assert s.coefficient(f.rational(2)) == 1
    assert (s * Fraction(1, 2)).coefficient(f.rational(2)) == Fraction(1, 2)
    with pytest.raises(ValueError):
        FormalSum(z6, [(f.one(), 1)])


def test_basis_all_torsion(z6):
    a = z6.field.gen()
    b = build_multiplicative_basis(z6, [a, a ** -1], CTX)
    assert b.rank == 0
    assert b.expression_of(a).torsion == a


def test_basis_236_relation(z6):
    f = z6.field
    b = build_multiplicative_basis(
        z6, [f.rational(2), f.rational(3), f.rational(6)], CTX)
    assert b.rank == 2
    assert b.relation_lattice == [[1, 1, -1]]
    # expressions reproduce the elements exactly (verified in construction,
    # re-checked here)
    for s in (f.rational(2), f.rational(3), f.rational(6)):
        expr = b.expression_of(s)
        recon = expr.torsion
        for u, c in zip(b.generators, expr.exponents):
            recon = recon * u ** c
        assert recon == s


def test_basis_cubic_unit_identity(cubic):
    # a^3 = a^2 - 1 forces a^2 (1 - a) = 1: {a, 1-a} are dependent mod
    # torsion, so the basis has rank 1 (the relation is proven exactly)
    f = cubic.field
    a = f.gen()
    assert (a * a * (f.one() - a)).is_one()
    b = build_multiplicative_basis(cubic, [a, f.one() - a], CTX)
    assert b.rank == 1
    (rel,) = b.relation_lattice
    assert rel in ([2, 1], [-2, -1])


def test_mu_examples(z6):
    f = z6.field
    a = f.gen()
    w, v = mu(FormalSum(z6, [(a, 2)]), CTX)
    assert v == ZERO_EXACT and w.is_zero()
    x = f.rational(Fraction(1, 3))
    _, v = mu(FormalSum(z6, [(x, 1), (f.one() - x, 1)]), CTX)
    assert v == ZERO_EXACT
    _, v = mu(FormalSum(z6, [(f.rational(2), 1)]), CTX)
    assert v == ZERO_EXACT   # 1 - 2 = -1 is torsion
    w, v = mu(FormalSum(z6, [(f.rational(3), 1)]), CTX)
    assert v == NONZERO_MODULO_SEARCH
    assert w.nonzero_entries()  # 3 ^ 2 survives: unique factorization


def test_mu_vanishes_on_five_term(z6, z5):
    rng = random.Random(29)
    for e in (z6, z5):
        for _ in range(5):
            w, v = mu(rand_five_term(e, rng), CTX)
            assert v == ZERO_EXACT and w.is_zero()


def test_mu_scaling(z6):
    f = z6.field
    beta = FormalSum(z6, [(f.rational(3), 1)])
    w1, v1 = mu(beta, CTX)
    w2, v2 = mu(beta * Fraction(3, 7), CTX)
    assert v1 == v2 == NONZERO_MODULO_SEARCH
    e1 = {(j, k): c for j, k, c in w1.nonzero_entries()}
    e2 = {(j, k): c for j, k, c in w2.nonzero_entries()}
    assert e2 == {k: c * Fraction(3, 7) for k, c in e1.items()}


def test_mu_zero_sum_is_zero(z6):
    w, v = mu(FormalSum(z6, []), CTX)
    assert v == ZERO_EXACT


def test_mu_respects_involution(z6):
    rng = random.Random(31)
    beta = rand_five_term(z6, rng) + FormalSum(z6, [(z6.field.gen(), 3)])
    _, v1 = mu(beta, CTX)
    _, v2 = mu(involution(beta, CTX), CTX)
    assert v1 == v2 == ZERO_EXACT


def test_one_sidedness_zero_stays_zero(z6):
    rng = random.Random(37)
    beta = rand_five_term(z6, rng)
    for prec in (128, 256, 512):
        _, v = mu(beta, PrecisionContext(prec))
        assert v == ZERO_EXACT


def test_involution_examples(z6):
    f = z6.field
    a = f.gen()
    beta = FormalSum(z6, [(a, 1)])
    conj = involution(beta, CTX)
    # conj(zeta6) = 1 - a exactly (the roots of x^2 - x + 1 sum to 1)
    assert conj.coefficient(f.one() - a) == 1
    real = FormalSum(z6, [(f.rational(Fraction(1, 3)), 1)])
    assert involution(real, CTX) == real
    assert involution(conj, CTX) == beta


def test_involution_requires_stability(cubic):
    beta = FormalSum(cubic, [(cubic.field.gen(), 1)])
    with pytest.raises(NotStableError):
        involution(beta, CTX)


def test_eigenspace_split(z6):
    rng = random.Random(41)
    f = z6.field
    beta = rand_five_term(z6, rng) + FormalSum(z6, [(f.gen(), 2)])
    plus, minus = eigenspace_split(beta, CTX)
    assert plus + minus == beta
    assert involution(plus, CTX) == plus
    assert involution(minus, CTX) == minus * Fraction(-1)
    real_beta = FormalSum(z6, [(f.rational(5), 2), (f.rational(Fraction(2, 3)), 1)])
    p, m = eigenspace_split(real_beta, CTX)
    assert p == real_beta and m.is_zero()
    zb = FormalSum(z6, [(f.gen(), 1)])
    p, m = eigenspace_split(zb, CTX)
    assert m.coefficient(f.gen()) == Fraction(1, 2)
    assert m.coefficient(f.one() - f.gen()) == Fraction(-1, 2)


def test_d2_shadow_of_mu_zero(z6):
    # mu = 0 sums have well-defined D2 values; five-term sums evaluate to 0
    rng = random.Random(43)
    ft = rand_five_term(z6, rng)
    _, v = mu(ft, CTX)
    assert v == ZERO_EXACT
    with mp.workprec(300):
        root = z6.root_value(280)
        total = mp.fsum(mpf(c.numerator) / c.denominator *
                        (bloch_wigner_d2(z.numeric(root), CTX)
                         if z.numeric(root).imag != 0 else mpf(0))
                        for z, c in ft.items())
    assert abs(total) < mpf(2) ** -240


def test_serialization_roundtrip(z6):
    f = z6.field
    beta = FormalSum(z6, [(f.gen(), Fraction(2, 3)), (f.rational(5), -1)])
    d = beta.to_dict()
    back = formal_sum_from_dict(d, z6)
    assert back == beta
