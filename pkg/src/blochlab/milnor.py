"""Cyclotomic Bloch elements and numerical scanning for rational
relations among dilogarithm values at roots of unity.

A scan computes D2(e^(2 pi i j / N)) for j coprime to N, 0 < j < N/2
(one value per cyclotomic basis element), runs integer relation detection
at the requested bounds, and reports the evidence.  An empty relation
list is consistency evidence at the stated (height, prec) bounds, never a
proof of independence.
"""

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import sympy
from mpmath import mp, mpf

from .blochgroup import FormalSum
from .dilog import bloch_wigner_d2, clausen_cl2
from .errors import InternalAssertionError
from .numberfield import EmbeddedField, NumberField
from .precision import DEFAULT_CONTEXT
from .relations import Relation, find_integer_relation
from . import polynomials as pq


def coprime_residues(n):
    """j with gcd(j, n) = 1 and 0 < j < n/2."""
    return [j for j in range(1, (n + 1) // 2) if math.gcd(j, n) == 1]


def cyclotomic_field(n, ctx=DEFAULT_CONTEXT):
    """Q(zeta_n) with the embedding fixed at the root e^(2 pi i / n)."""
    field = NumberField(pq.cyclotomic(n), name="z")
    system = field.root_system

    def value_fn(prec):
        with mp.workprec(prec + 16):
            v = mp.exp(2 * mp.pi * mp.j / n)
        from .polynomials import _exact
        err = Fraction(1, 1 << (2 * (prec - 2)))
        return (_exact(v.real), _exact(v.imag)), err

    idx = system.match_value(value_fn)
    return EmbeddedField(field, idx)


def cyclotomic_basis(n, ctx=DEFAULT_CONTEXT):
    """The phi(n)/2 generators [zeta_n^j] as exact formal sums over Q(zeta_n)."""
    if n < 3:
        raise ValueError("need N >= 3")
    embedded = cyclotomic_field(n, ctx)
    gen = embedded.field.gen()
    return embedded, [FormalSum(embedded, [(gen ** j, 1)]) for j in coprime_residues(n)]


@dataclass
class CyclotomicScan:
    """Evidence record for one N: values, relations found (if any), bounds."""

    N: int
    values: list                    # [(j, D2 value)] in ascending j
    relations_found: list
    bounds: dict
    clausen_li2_delta: object       # max disagreement of the two D2 routes
    planted: bool = False

    @property
    def consistent_with_independence(self):
        return not self.relations_found

    def to_dict(self):
        return {
            "N": self.N,
            "values": [{"j": j, "d2": mp.nstr(v, 40)} for j, v in self.values],
            "relations_found": [list(r.coefficients) for r in self.relations_found],
            "bounds": self.bounds,
            "consistent_with_independence": self.consistent_with_independence,
            "clausen_li2_delta": mp.nstr(self.clausen_li2_delta, 6),
            "note": "empty relation list is evidence at the stated bounds, not proof",
        }


def d2_root_of_unity(n, j, ctx=DEFAULT_CONTEXT):
    """D2(e^(2 pi i j / n)) via the Clausen series (the scan's primary route)."""
    return _cl2_angle(n, j, ctx)


def _cl2_angle(n, j, ctx):
    with ctx.workprec():
        theta = 2 * mp.pi * j / n
        val = clausen_cl2(theta, ctx)
    return val


def _d2_via_li2(n, j, ctx):
    with ctx.workprec():
        z = mp.exp(2 * mp.pi * mp.j * j / n)
        return bloch_wigner_d2(z, ctx)


def milnor_scan(n, height=10**6, ctx=DEFAULT_CONTEXT, planted_coefficient=None):
    """Scan D2 values at primitive N-th roots for integer relations.

    Values are computed by the Clausen route and cross-checked against the
    dilogarithm route (the agreement is part of the record).  Any relation
    the search returns is re-verified at doubled precision before being
    reported; planted_coefficient=c appends c * (first value) to the input
    list as a detection self-test.
    """
    js = coprime_residues(n)
    if not js:
        raise ValueError(f"no primitive residues below N/2 for N = {n}")
    values = []
    delta = mpf(0)
    with ctx.workprec():
        for j in js:
            v1 = _cl2_angle(n, j, ctx)
            v2 = _d2_via_li2(n, j, ctx)
            d = abs(v1 - v2)
            delta = max(delta, d)
            values.append((j, v1))
        if delta > ctx.tol * 16:
            raise InternalAssertionError(
                f"Clausen and dilogarithm routes disagree by {mp.nstr(delta, 6)}")
    xs = [v for _, v in values]
    labels = [f"D2(zeta^{j})" for j, _ in values]
    if planted_coefficient is not None:
        with ctx.workprec():
            xs = xs + [planted_coefficient * xs[0]]
        labels.append(f"{planted_coefficient}*D2(zeta^{js[0]})")
    relations = []
    if len(xs) == 1:
        # a relation among one value means the value itself vanishes
        with ctx.workprec():
            rel = Relation((1,), abs(xs[0]), 1) if abs(xs[0]) <= ctx.tol else None
    else:
        rel = find_integer_relation(xs, height_bound=height, ctx=ctx)
    if rel is not None:
        # re-verify at doubled precision with recomputed values
        ctx2 = ctx.doubled()
        with ctx2.workprec():
            xs2 = [_cl2_angle(n, j, ctx2) for j in js]
            if planted_coefficient is not None:
                xs2 = xs2 + [planted_coefficient * xs2[0]]
            resid = abs(mp.fsum(c * v for c, v in zip(rel.coefficients, xs2)))
            if resid <= mpf(2) ** (-ctx.prec_bits) * max(abs(v) for v in xs2):
                relations.append(rel)
    return CyclotomicScan(
        N=n,
        values=values,
        relations_found=relations,
        bounds={"height": height, "prec_bits": ctx.prec_bits, "labels": labels},
        clausen_li2_delta=ctx.round_out(delta),
        planted=planted_coefficient is not None,
    )
