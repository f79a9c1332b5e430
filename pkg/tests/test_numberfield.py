"""Number field and embedded-field classification tests.

Exactness oracles: polynomial identities checked by substitution, Sturm
counts cross-checked against sympy's real_roots, discriminant signs, and
known Galois-theoretic facts for the worked fields.
"""

from fractions import Fraction

import pytest
import sympy
from mpmath import mp

import blochlab.polynomials as pq
from blochlab.errors import (
    DivisionByZeroError,
    NotStableError,
    ReduciblePolynomialError,
    UnsupportedDegreeError,
)
from blochlab.numberfield import (
    CM_EMBEDDING,
    CM_FIELD,
    NON_STABLE,
    STABLE_NON_CM,
    TOTALLY_REAL,
    EmbeddedField,
    classify_embedding,
    commuting_pairs,
    compositum_with_conjugate,
    conjugate_intersection,
    element_is_real,
    embeddings,
    is_conjugation_stable,
    make_field,
    real_subfield,
    torsion_orders,
)
from blochlab.precision import PrecisionContext

CTX = PrecisionContext(256)


def _solve_in_span(field, basis, target):
    """Rational coordinates of target in span(basis), or None (exact)."""
    rows = [[b.coords[i] for b in basis] for i in range(field.degree)]
    rhs = list(target.coords)
    cols = len(basis)
    piv = []
    for c in range(cols):
        r = next((i for i in range(len(piv), field.degree) if rows[i][c]), None)
        if r is None:
            continue
        rows[len(piv)], rows[r] = rows[r], rows[len(piv)]
        rhs[len(piv)], rhs[r] = rhs[r], rhs[len(piv)]
        r = len(piv)
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        rhs[r] = rhs[r] * inv
        for i in range(field.degree):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                rhs[i] = rhs[i] - f * rhs[r]
        piv.append(c)
    sol = [Fraction(0)] * cols
    for k, c in enumerate(piv):
        sol[c] = rhs[k]
    for i in range(len(piv), field.degree):
        if rhs[i]:
            return None
    recon = field.zero()
    for s, b in zip(sol, basis):
        recon = recon + b * s
    return sol if recon == target else None


@pytest.fixture(scope="module")
def fields():
    return {
        "i": make_field("x^2+1"),
        "sqrt-3": make_field("x^2+3"),
        "zeta6": make_field("x^2-x+1"),
        "cubic": make_field("x^3-x^2+1"),
        "quartic": make_field("x^4-2"),
        "zeta5": make_field("x^4+x^3+x^2+x+1"),
        "sqrt2": make_field("x^2-2"),
        "cbrt2": make_field("x^3-2"),
    }


def test_make_field_validation():
    assert make_field("x^2+1").degree == 2
    assert make_field([1, 0, 1]).degree == 2
    with pytest.raises(ReduciblePolynomialError):
        make_field("x^2-1")
    with pytest.raises(ValueError):
        make_field("2*x^2+1")  # not monic
    with pytest.raises(UnsupportedDegreeError):
        make_field([1] + [0] * 24 + [1])
    assert make_field("x^3-x^2+1").degree == 3  # rational-root-free cubic


def test_element_arithmetic(fields):
    f = fields["quartic"]
    a = f.gen()
    assert (a ** 4).as_rational() == 2
    assert (a * a.inverse()).is_one()
    x = a ** 3 + 2 * a - f.rational(Fraction(1, 3))
    assert (x * x.inverse()).is_one()
    with pytest.raises(DivisionByZeroError):
        f.zero().inverse()


def test_min_poly_of_verified_by_substitution(fields):
    f = fields["quartic"]
    m = (f.gen() ** 2).min_poly_of()
    assert m == pq.poly([-2, 0, 1])  # x^2 - 2
    # substitution check: m(a^2) = 0 exactly
    acc = f.zero()
    for c in reversed(m):
        acc = acc * (f.gen() ** 2) + f.rational(c)
    assert acc.is_zero()
    # a rational element has a linear minimal polynomial
    assert f.rational(Fraction(3, 7)).min_poly_of() == pq.poly([Fraction(-3, 7), 1])


def test_root_of_unity_detection(fields):
    z6 = fields["zeta6"].gen()
    assert z6.is_root_of_unity() == (True, 6)
    i = fields["i"].gen()
    assert i.is_root_of_unity() == (True, 4)
    assert (i + 1).is_root_of_unity() == (False, None)  # |1+i| = sqrt 2
    assert fields["zeta5"].gen().is_root_of_unity() == (True, 5)
    assert torsion_orders(4) == [1, 2, 3, 4, 5, 6, 8, 10, 12]


def test_embeddings_signatures(fields):
    cases = {
        "i": (0, 1), "zeta6": (0, 1), "cubic": (1, 1), "quartic": (2, 1),
        "zeta5": (0, 2), "sqrt2": (2, 0), "cbrt2": (1, 1),
    }
    for name, (r1, r2) in cases.items():
        table = embeddings(fields[name], CTX)
        assert (table.r1, table.r2) == (r1, r2), name
        assert table.r1 + 2 * table.r2 == fields[name].degree
        # sympy oracle for the real count
        x = sympy.Symbol("x")
        expr = pq.to_sympy(fields[name].min_poly).as_expr()
        assert table.r1 == len(sympy.real_roots(expr, x))


def test_cubic_discriminant_sign(fields):
    # disc = -23 < 0 forces exactly one real root
    assert pq.discriminant_int(fields["cubic"].min_poly) == -23


def test_root_ordering_canonical(fields):
    table = embeddings(fields["quartic"], CTX)
    roots = table.roots
    # two real roots ascending, then the conjugate pair (negative imag first)
    assert roots[0].real < roots[1].real and roots[0].imag == 0
    assert roots[2].imag < 0 < roots[3].imag
    assert abs(roots[2].real - roots[3].real) < 1e-30
    assert table.pairs == [(2, 3)]


def test_pure_imaginary_pairs_order():
    # x^4 + 5x^2 + 5: all four roots purely imaginary, two pairs share Re = 0
    f = make_field("x^4+5*x^2+5")
    table = embeddings(f, CTX)
    assert (table.r1, table.r2) == (0, 2)
    ims = [abs(r.imag) for r in table.roots]
    assert ims[0] == ims[1] < ims[2] == ims[3]  # pairs sorted by |Im|


def test_conjugation_stability(fields):
    st, g = is_conjugation_stable(EmbeddedField(fields["i"], 0), CTX)
    assert st and g == -fields["i"].gen()
    quartic = fields["quartic"]
    st, g = is_conjugation_stable(EmbeddedField(quartic, 3), CTX)
    assert st and g == -quartic.gen()
    # exact involution: g o g = identity
    assert g.apply_poly_map(g) == quartic.gen()
    # odd-degree non-real embedding is never stable
    st, g = is_conjugation_stable(EmbeddedField(fields["cubic"], 2), CTX)
    assert not st and g is None
    # real embeddings are trivially stable with the identity
    st, g = is_conjugation_stable(EmbeddedField(quartic, 0), CTX)
    assert st and g == quartic.gen()


def test_commuting_pairs(fields):
    assert commuting_pairs(EmbeddedField(fields["zeta5"], 1), CTX) == 2
    assert commuting_pairs(EmbeddedField(fields["quartic"], 3), CTX) == 1
    with pytest.raises(NotStableError):
        commuting_pairs(EmbeddedField(fields["cubic"], 2), CTX)


def test_galois_closure_commuting_pairs(fields):
    e = EmbeddedField(fields["cbrt2"], fields["cbrt2"].r1 + 1)
    closure = compositum_with_conjugate(e, CTX)
    assert closure.field.degree == 6
    assert (closure.field.r1, closure.field.r2) == (0, 3)
    # centralizer of a transposition in S3 has order 2: exactly one of the
    # three conjugate pairs commutes
    assert commuting_pairs(closure, CTX) == 1


def test_classification(fields):
    assert classify_embedding(EmbeddedField(fields["sqrt-3"], 0), CTX) == CM_FIELD
    assert classify_embedding(EmbeddedField(fields["zeta5"], 0), CTX) == CM_FIELD
    assert classify_embedding(EmbeddedField(fields["quartic"], 3), CTX) == CM_EMBEDDING
    assert classify_embedding(EmbeddedField(fields["cubic"], 2), CTX) == NON_STABLE
    assert classify_embedding(EmbeddedField(fields["sqrt2"], 0), CTX) == TOTALLY_REAL
    # real embedding of a mixed field: stable but not CM
    assert classify_embedding(EmbeddedField(fields["quartic"], 0), CTX) == STABLE_NON_CM


def test_cm_is_embedding_independent(fields):
    # a CM field classifies identically at every root
    for idx in range(4):
        assert classify_embedding(EmbeddedField(fields["zeta5"], idx), CTX) == CM_FIELD


def test_element_realness(fields):
    e = EmbeddedField(fields["quartic"], 3)
    a = fields["quartic"].gen()
    assert element_is_real(e, a * a, CTX)           # (i 2^(1/4))^2 = -sqrt2
    assert not element_is_real(e, a, CTX)
    assert element_is_real(e, fields["quartic"].rational(5), CTX)
    assert not element_is_real(e, a ** 3, CTX)


def test_real_subfield(fields):
    e = EmbeddedField(fields["i"], 0)
    rs = real_subfield(e, CTX)
    assert rs.degree == 1 and rs.totally_real
    quartic = fields["quartic"]
    e4 = EmbeddedField(quartic, 3)
    rs = real_subfield(e4, CTX)
    assert rs.degree == 2 and rs.totally_real
    # the subfield is exactly the real elements, so it contains a^2
    # (sigma(a^2) = -sqrt 2); certified realness is the membership test
    a2 = quartic.gen() ** 2
    assert element_is_real(e4, a2, CTX)
    assert a2.min_poly_of() == pq.poly([-2, 0, 1])
    # and a^2 is an exact Q-combination of the returned basis
    coords = _solve_in_span(quartic, rs.basis, a2)
    assert coords is not None
    # real embedding: the whole field
    rs = real_subfield(EmbeddedField(quartic, 0), CTX)
    assert rs.degree == 4 and not rs.totally_real
    # non-stable cubic: F cap R = Q
    rs = real_subfield(EmbeddedField(fields["cubic"], 2), CTX)
    assert rs.degree == 1 and rs.totally_real
    # zeta5: the golden-ratio field
    rs = real_subfield(EmbeddedField(fields["zeta5"], 1), CTX)
    assert rs.degree == 2 and rs.totally_real


def test_conjugate_intersection(fields):
    ci = conjugate_intersection(EmbeddedField(fields["quartic"], 3), CTX)
    assert (ci.degree, ci.is_real) == (4, False)    # stable: F' = F
    ci = conjugate_intersection(EmbeddedField(fields["cubic"], 2), CTX)
    assert (ci.degree, ci.is_real) == (1, True)     # only Q
    ci = conjugate_intersection(EmbeddedField(fields["i"], 0), CTX)
    assert (ci.degree, ci.is_real) == (2, False)


def test_conjugate_intersection_degree_divides(fields):
    for name, idx in (("quartic", 3), ("cubic", 2), ("i", 0), ("zeta5", 1)):
        f = fields[name]
        ci = conjugate_intersection(EmbeddedField(f, idx), CTX)
        assert f.degree % ci.degree == 0
        stable, _ = is_conjugation_stable(EmbeddedField(f, idx), CTX)
        assert (ci.degree == f.degree) == stable


def test_compositum(fields):
    e = EmbeddedField(fields["i"], 0)
    assert compositum_with_conjugate(e, CTX).field.degree == 2  # itself
    e3 = EmbeddedField(fields["cubic"], 2)
    comp = compositum_with_conjugate(e3, CTX)
    assert comp.field.degree == 6  # [F Fbar : Q] = 6 for a non-stable cubic
    closure = compositum_with_conjugate(
        EmbeddedField(fields["cbrt2"], fields["cbrt2"].r1 + 1), CTX)
    assert closure.field.degree == 6
    assert len(closure.field.roots_in_self()) == 6  # Galois over Q
    # the compositum is stable under conjugation by construction
    stable, _ = is_conjugation_stable(closure, CTX)
    assert stable


def test_r2_parity_invariant(fields):
    for name, idx in (("i", 0), ("quartic", 3), ("zeta5", 1), ("zeta6", 1)):
        f = fields[name]
        r2p = commuting_pairs(EmbeddedField(f, idx), CTX)
        assert (f.r2 - r2p) % 2 == 0
        assert r2p >= 1  # the defining embedding's pair always commutes
