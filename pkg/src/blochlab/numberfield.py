"""Exact number-field arithmetic with certified complex embeddings, and
the conjugation taxonomy of an embedded field: stability, commuting pairs
(r2'), CM labels, the real subfield F ∩ R, the conjugate intersection
F' = F ∩ F̄, and composita with the conjugate field.

Architecture: every algebraic fact is discovered numerically (integer
relation detection on embedding data) and then verified exactly (rational
arithmetic, Sturm counts, separation bounds on certified root disks).  No
verdict rests on unverified numerics.
"""

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import sympy
from mpmath import mp, mpc, mpf

from . import polynomials as pq
from .errors import (
    CertificationFailedError,
    DivisionByZeroError,
    InsufficientPrecisionError,
    InternalAssertionError,
    NotStableError,
    ReduciblePolynomialError,
    UnsupportedDegreeError,
)
from .lattice import saturate_rowspace
from .precision import DEFAULT_CONTEXT, PrecisionContext
from .relations import candidate_relation_lattice, find_integer_relation
from .polynomials import RootDisk, _exact

MAX_DEGREE = 24
_MAX_ISOLATION_PREC = 1 << 16


def torsion_orders(n):
    """All m with euler_phi(m) <= n, ascending (torsion orders possible in degree n)."""
    out = []
    for m in range(1, 2 * n * n + 3):
        if sympy.totient(m) <= n:
            out.append(m)
    return out


def torsion_quantum(n):
    """lcm of all possible torsion orders in degree n."""
    return math.lcm(*torsion_orders(n))


# --- fields and elements ------------------------------------------------------

class NumberField:
    """Q[x]/(min_poly) for a monic irreducible min_poly, degree <= 24."""

    def __init__(self, min_poly, name="a"):
        p = pq.poly(min_poly)
        if pq.degree(p) < 1:
            raise ReduciblePolynomialError("constant polynomial")
        if p[-1] != 1:
            raise ValueError("min_poly must be monic")
        if pq.degree(p) > MAX_DEGREE:
            raise UnsupportedDegreeError(f"degree {pq.degree(p)} > {MAX_DEGREE}")
        if pq.degree(p) > 1 and not pq.is_irreducible(p):
            raise ReduciblePolynomialError(f"{list(p)} factors over Q")
        self.min_poly = p
        self.degree = pq.degree(p)
        self.name = name
        self._root_system = None
        self._roots_in_self = None
        self._torsion_elements = None

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.min_poly == other.min_poly

    def __hash__(self):
        return hash(("NumberField", self.min_poly))

    def __repr__(self):
        return f"NumberField({pq.to_sympy(self.min_poly).as_expr()}, {self.name!r})"

    # construction of elements
    def element(self, coords):
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            coords = list(self._reduce(coords))
        coords += [Fraction(0)] * (self.degree - len(coords))
        return FieldElement(self, tuple(coords))

    def zero(self):
        return self.element([])

    def one(self):
        return self.element([1])

    def rational(self, q):
        return self.element([Fraction(q)])

    def gen(self):
        if self.degree == 1:
            return self.element([-self.min_poly[0]])
        return self.element([0, 1])

    def _reduce(self, coeffs):
        _, rem = pq.divmod_poly(pq.trim(coeffs), self.min_poly)
        return rem

    @property
    def root_system(self):
        if self._root_system is None:
            self._root_system = RootSystem(self.min_poly)
        return self._root_system

    @property
    def r1(self):
        return self.root_system.real_count

    @property
    def r2(self):
        return (self.degree - self.r1) // 2

    def embedding(self, root_index):
        return EmbeddedField(self, root_index)

    def embeddings_list(self):
        return [EmbeddedField(self, i) for i in range(self.degree)]

    def roots_in_self(self):
        """All roots of min_poly lying in the field itself (exact elements).

        Computed by factoring min_poly over Q(a) (complete, hence usable to
        *disprove* stability); cached.
        """
        if self._roots_in_self is None:
            x, t = sympy.symbols("x __t")
            f_expr = pq.to_sympy(self.min_poly).as_expr()
            theta = sympy.CRootOf(f_expr, 0)
            out = []
            for fac, _ in sympy.factor_list(f_expr, x, extension=theta)[1]:
                fac = sympy.Poly(fac.as_expr().subs(theta, t), x)
                if fac.degree() != 1:
                    continue
                root_expr = sympy.expand(-fac.nth(0) / fac.nth(1))
                coeffs = sympy.Poly(root_expr, t).all_coeffs()[::-1]
                out.append(self.element([Fraction(c.p, c.q) for c in
                                         map(sympy.Rational, coeffs)]))
            self._roots_in_self = out
        return self._roots_in_self

    def torsion_elements(self):
        """All roots of unity in the field (exact), found by factoring
        cyclotomic polynomials over the field; cached."""
        if self._torsion_elements is None:
            x, t = sympy.symbols("x __t")
            f_expr = pq.to_sympy(self.min_poly).as_expr()
            theta = sympy.CRootOf(f_expr, 0)
            found = {}
            for m in torsion_orders(self.degree):
                if m <= 2:
                    found[self.rational(1 if m == 1 else -1)] = m
                    continue
                phi_m = sympy.cyclotomic_poly(m, x)
                for fac, _ in sympy.factor_list(phi_m, x, extension=theta)[1]:
                    fac = sympy.Poly(fac.as_expr().subs(theta, t), x)
                    if fac.degree() != 1:
                        continue
                    root_expr = sympy.expand(-fac.nth(0) / fac.nth(1))
                    coeffs = sympy.Poly(root_expr, t).all_coeffs()[::-1]
                    elem = self.element([Fraction(c.p, c.q) for c in
                                         map(sympy.Rational, coeffs)])
                    found.setdefault(elem, m)
            self._torsion_elements = found
        return self._torsion_elements


class FieldElement:
    """Exact element of a NumberField: rational coordinates in the power basis."""

    __slots__ = ("parent", "coords", "_min_poly")

    def __init__(self, parent, coords):
        self.parent = parent
        self.coords = coords
        self._min_poly = None

    def __repr__(self):
        a = self.parent.name
        terms = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*{a}" if c != 1 else a)
            else:
                terms.append(f"{c}*{a}^{i}" if c != 1 else f"{a}^{i}")
        return " + ".join(terms) if terms else "0"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.parent.rational(other)
        return (isinstance(other, FieldElement) and self.parent == other.parent
                and self.coords == other.coords)

    def __hash__(self):
        return hash((self.parent.min_poly, self.coords))

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.parent != self.parent:
                raise ValueError("elements of different fields")
            return other
        return self.parent.rational(other)

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.parent,
                            tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.parent, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return FieldElement(self.parent, tuple(c * q for c in self.coords))
        other = self._coerce(other)
        prod = pq.mul(pq.trim(self.coords), pq.trim(other.coords))
        return self.parent.element(self.parent._reduce(prod))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZeroError("inverse of zero")
        # extended euclid: u * self + v * min_poly = 1
        a, b = pq.trim(self.coords), self.parent.min_poly
        u0, u1 = (Fraction(1),), ()
        while b:
            q, r = pq.divmod_poly(a, b)
            a, b = b, r
            u0, u1 = u1, pq.sub(u0, pq.mul(q, u1))
        # a is the gcd (a nonzero constant since min_poly is irreducible)
        if pq.degree(a) != 0:
            raise InternalAssertionError("gcd with irreducible min_poly not constant")
        inv = pq.scale(u0, 1 / a[0])
        return self.parent.element(self.parent._reduce(inv))

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        result = self.parent.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def is_one(self):
        return self.coords[0] == 1 and all(c == 0 for c in self.coords[1:])

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def as_rational(self):
        if not self.is_rational():
            raise ValueError("not a rational element")
        return self.coords[0]

    def min_poly_of(self):
        """Minimal polynomial over Q, by exact linear algebra on powers; cached."""
        if self._min_poly is not None:
            return self._min_poly
        n = self.parent.degree
        power = self.parent.one()
        pivots = []   # (pivot column, reduced-row index)
        reduced = []  # (reduced coordinate vector, power-combination vector)
        for k in range(n + 1):
            vec = list(power.coords)
            combo = [Fraction(0)] * (n + 1)
            combo[k] = Fraction(1)
            for (col, ridx) in pivots:
                if vec[col]:
                    fac = vec[col]
                    rvec, rcombo = reduced[ridx]
                    vec = [a - fac * b for a, b in zip(vec, rvec)]
                    combo = [a - fac * b for a, b in zip(combo, rcombo)]
            lead = next((i for i, v in enumerate(vec) if v), None)
            if lead is None:
                # first dependency among the powers = the minimal polynomial
                self._min_poly = pq.monic(pq.trim(combo))
                return self._min_poly
            inv = 1 / vec[lead]
            vec = [v * inv for v in vec]
            combo = [c * inv for c in combo]
            pivots.append((lead, len(reduced)))
            reduced.append((vec, combo))
            power = power * self
        raise InternalAssertionError("no dependency among n+1 powers")

    def is_root_of_unity(self):
        """(True, order) if some power phi(order) <= degree gives 1, else (False, None)."""
        if self.is_zero():
            return False, None
        for m in torsion_orders(self.parent.degree):
            if (self ** m).is_one():
                return True, m
        return False, None

    def apply_poly_map(self, g):
        """Image under the map a -> g (self viewed as polynomial in a)."""
        acc = g.parent.zero()
        for c in reversed(self.coords):
            acc = acc * g + g.parent.rational(c)
        return acc

    def numeric(self, z):
        """Horner evaluation at a numeric root value z (current mp precision)."""
        acc = mpc(0)
        for c in reversed(self.coords):
            acc = acc * z + mpf(c.numerator) / mpf(c.denominator)
        return acc

    def certified_at(self, disk):
        """Exact evaluation at the disk center plus a rigorous error bound.

        Returns ((re, im) Fractions, err_sq Fraction) with
        |value - sigma(self)| <= sqrt(err_sq) for the root inside the disk.
        """
        cre, cim = _exact(disk.center.real), _exact(disk.center.imag)
        vre, vim = pq.eval_exact_complex(pq.trim(self.coords) or (Fraction(0),), cre, cim)
        rsq = disk.radius_sq
        if rsq == 0:
            return (vre, vim), Fraction(0)
        r_ub = rsq if rsq > 1 else Fraction(1)     # r <= max(1, r^2)
        radius_big = abs(cre) + abs(cim) + r_ub
        deriv_bound = Fraction(0)
        for i, c in enumerate(self.coords):
            if i and c:
                deriv_bound += i * abs(c) * radius_big ** (i - 1)
        err_sq = rsq * deriv_bound * deriv_bound
        return (vre, vim), err_sq


# --- certified root systems ----------------------------------------------------

class RootSystem:
    """Certified, canonically ordered root disks of a squarefree polynomial.

    Order: real roots ascending, then conjugate pairs by (Re, |Im|) with the
    negative-imaginary member first.  Disks refine on demand; indices are
    stable across refinement.
    """

    def __init__(self, p):
        self.poly = pq.monic(pq.squarefree_part(pq.poly(p)))
        self.n = pq.degree(self.poly)
        self.real_intervals = pq.isolate_real_roots(self.poly)
        self.real_count = len(self.real_intervals)
        self.prec = 64
        self._sep_sum_sq = None
        self._sep_diff_sq = None
        self.disks = None
        self.conj_index = None
        self._isolate_and_order()

    # certificates, computed lazily
    @property
    def sep_sum_sq(self):
        if self._sep_sum_sq is None:
            self._sep_sum_sq = pq.mahler_separation_sq(pq.root_sum_poly(self.poly))
        return self._sep_sum_sq

    @property
    def sep_diff_sq(self):
        if self._sep_diff_sq is None:
            h = pq.root_diff_poly(self.poly)
            # strip the zero roots (a - a) before taking the separation bound
            q = list(h)
            while q and q[0] == 0:
                q.pop(0)
            self._sep_diff_sq = pq.mahler_separation_sq(pq.trim(q))
        return self._sep_diff_sq

    def _compute_disks(self, prec):
        approx = pq.approximate_roots(self.poly, prec)
        return [RootDisk(w, pq.certified_radius_sq(self.poly, w)) for w in approx]

    def _pairwise_separated(self, disks):
        for i in range(len(disks)):
            for j in range(i + 1, len(disks)):
                if not disks[i].separated_from(disks[j]):
                    return False
        return True

    def _classify(self, disks):
        """Split disks into real (matched to Sturm intervals) and nonreal.

        Returns (real_matched, nonreal_indices) or None if ambiguous at this
        precision.
        """
        intervals = self.real_intervals
        matched = {}
        nonreal = []
        for i, d in enumerate(disks):
            im_sq = _exact(d.center.imag) ** 2
            if im_sq > d.radius_sq:
                nonreal.append(i)
                continue
            # candidate real disk: find its interval
            hits = []
            cre = _exact(d.center.real)
            r_ub = d.radius_sq if d.radius_sq > 1 else Fraction(1)
            for k, (lo, hi) in enumerate(intervals):
                if lo - r_ub <= cre <= hi + r_ub:
                    hits.append(k)
            if len(hits) != 1:
                return None
            if hits[0] in matched:
                return None
            matched[hits[0]] = i
        if len(matched) != len(intervals):
            return None
        return matched, nonreal

    def _pair_up(self, disks, nonreal):
        pairs = {}
        for i in nonreal:
            ci = disks[i].center
            conj_re, conj_im = _exact(ci.real), -_exact(ci.imag)
            hits = [j for j in nonreal
                    if j != i and disks[j].contains_value(conj_re, conj_im,
                                                          disks[i].radius_sq)]
            if len(hits) != 1:
                return None
            pairs[i] = hits[0]
        for i, j in pairs.items():
            if pairs.get(j) != i:
                return None
        return pairs

    def _isolate_and_order(self):
        prec = self.prec
        while True:
            if prec > _MAX_ISOLATION_PREC:
                raise InternalAssertionError("root isolation failed to converge")
            disks = self._compute_disks(prec)
            if len(disks) == self.n and self._pairwise_separated(disks):
                cls = self._classify(disks)
                if cls is not None:
                    matched, nonreal = cls
                    pairing = self._pair_up(disks, nonreal)
                    if pairing is not None:
                        order = self._try_order(disks, matched, nonreal, pairing)
                        if order is not None:
                            self.prec = prec
                            self._adopt(disks, order)
                            return
            prec *= 2
            # tighten the Sturm intervals along with the numeric precision
            self.real_intervals = [
                pq.refine_real_root(self.poly, iv,
                                    Fraction(1, 1 << min(prec // 2, 4096)))
                for iv in self.real_intervals]

    def _try_order(self, disks, matched, nonreal, pairing):
        """Canonical order, or None if a comparison is unresolved at this precision."""
        order = [matched[k] for k in range(len(self.real_intervals))]
        # group into (neg_im, pos_im) pairs
        pair_list = []
        seen = set()
        for i in nonreal:
            if i in seen:
                continue
            j = pairing[i]
            seen.add(i)
            seen.add(j)
            neg, pos = (i, j) if _exact(disks[i].center.imag) < 0 else (j, i)
            pair_list.append((neg, pos))

        def cmp_pairs(p1, p2):
            d1, d2 = disks[p1[1]], disks[p2[1]]
            re1, re2 = _exact(d1.center.real), _exact(d2.center.real)
            rsum = 2 * (d1.radius_sq + d2.radius_sq)
            if (re1 - re2) ** 2 > rsum:
                return -1 if re1 < re2 else 1
            # possibly equal real parts: certify via the root-sum polynomial
            if 3 * ((2 * (re1 - re2)) ** 2 + 4 * d1.radius_sq + 4 * d2.radius_sq) \
                    < self.sep_sum_sq:
                im1 = abs(_exact(d1.center.imag))
                im2 = abs(_exact(d2.center.imag))
                if (im1 - im2) ** 2 > rsum:
                    return -1 if im1 < im2 else 1
                if 3 * ((2 * (im1 - im2)) ** 2 + 4 * d1.radius_sq + 4 * d2.radius_sq) \
                        < self.sep_diff_sq:
                    raise InternalAssertionError("distinct root pairs coincide")
                return None
            return None

        import functools
        unresolved = False

        def keyfn(a, b):
            nonlocal unresolved
            c = cmp_pairs(a, b)
            if c is None:
                unresolved = True
                return 0
            return c

        pair_list_sorted = sorted(pair_list, key=functools.cmp_to_key(keyfn))
        if unresolved:
            return None
        for neg, pos in pair_list_sorted:
            order.append(neg)
            order.append(pos)
        return order

    def _adopt(self, disks, order):
        old = self.disks
        new_disks = []
        for rank, idx in enumerate(order):
            d = disks[idx]
            d.is_real = rank < self.real_count
            new_disks.append(d)
        self.disks = new_disks
        conj = {}
        for k in range(self.real_count):
            conj[k] = k
        for p in range((self.n - self.real_count) // 2):
            lo = self.real_count + 2 * p
            conj[lo] = lo + 1
            conj[lo + 1] = lo
        self.conj_index = conj
        if old is not None and len(old) == len(new_disks):
            # index stability: each new disk must sit inside its predecessor
            for dn, do in zip(new_disks, old):
                dre, dim = _exact(dn.center.real), _exact(dn.center.imag)
                if not do.contains_value(dre, dim, dn.radius_sq):
                    raise InternalAssertionError("root ordering drifted under refinement")

    def refine(self, factor=2):
        prec = self.prec * factor
        while True:
            if prec > _MAX_ISOLATION_PREC:
                raise InternalAssertionError("refinement exceeded precision cap")
            disks = self._compute_disks(prec)
            new = self._match_to_current(disks)
            if new is not None:
                self.prec = prec
                for d, old in zip(new, self.disks):
                    d.is_real = old.is_real
                self.disks = new
                return
            prec *= 2

    def _match_to_current(self, disks):
        if len(disks) != self.n:
            return None
        assigned = [None] * self.n
        used = set()
        for d in disks:
            dre, dim = _exact(d.center.real), _exact(d.center.imag)
            hits = [k for k, cur in enumerate(self.disks)
                    if cur.contains_value(dre, dim, d.radius_sq)]
            if len(hits) != 1 or hits[0] in used:
                return None
            assigned[hits[0]] = d
            used.add(hits[0])
        return assigned

    def ensure_radius(self, radius_sq):
        guard = 0
        while any(d.radius_sq > radius_sq for d in self.disks):
            self.refine()
            guard += 1
            if guard > 24:
                raise InternalAssertionError("radius target unreachable")

    def ensure_prec(self, prec):
        while self.prec < prec:
            self.refine()

    def match_value(self, value_fn):
        """Index of the root equal to the algebraic number produced by value_fn.

        value_fn(prec) must return ((re, im) exact Fractions, err_sq) for a
        value that IS a root of this polynomial; decision by disk membership.
        """
        prec = self.prec
        for _ in range(24):
            (vre, vim), err_sq = value_fn(prec)
            hits = [k for k, d in enumerate(self.disks)
                    if d.contains_value(vre, vim, err_sq)]
            if len(hits) == 1:
                return hits[0]
            if not hits:
                raise InternalAssertionError("value is not a root of this polynomial")
            self.refine()
            prec = self.prec
        raise InternalAssertionError("root matching failed to converge")


_root_system_cache = {}


def root_system_for(p):
    p = pq.monic(pq.squarefree_part(pq.poly(p)))
    if p not in _root_system_cache:
        _root_system_cache[p] = RootSystem(p)
    return _root_system_cache[p]


# --- embedded fields ------------------------------------------------------------

class EmbeddedField:
    """A number field with one selected complex root (= embedding into C)."""

    def __init__(self, field, root_index):
        if not 0 <= root_index < field.degree:
            raise ValueError("root_index out of range")
        self.field = field
        self.root_index = root_index
        self._stability = None

    def __eq__(self, other):
        return (isinstance(other, EmbeddedField) and self.field == other.field
                and self.root_index == other.root_index)

    def __hash__(self):
        return hash((self.field.min_poly, self.root_index))

    def __repr__(self):
        return f"EmbeddedField({self.field!r}, root {self.root_index})"

    @property
    def system(self):
        return self.field.root_system

    def disk(self, prec=None):
        if prec is not None:
            self.system.ensure_radius(Fraction(1, 1 << (2 * prec)))
        return self.system.disks[self.root_index]

    @property
    def is_real_embedding(self):
        return self.system.disks[self.root_index].is_real

    @property
    def conjugate_index(self):
        return self.system.conj_index[self.root_index]

    def root_value(self, prec):
        return mpc(self.disk(prec).center)

    def sigma(self, x, prec=None):
        """Numeric image of a field element under this embedding."""
        prec = prec or mp.prec
        return x.numeric(self.root_value(prec + 16))

    def sigma_certified(self, x, prec):
        d = self.disk(prec)
        return x.certified_at(d)

    def conjugate_embedding(self):
        return EmbeddedField(self.field, self.conjugate_index)


@dataclass
class EmbeddingTable:
    """Signature data of a field: real embeddings, conjugate pairs, r2'."""

    r1: int
    r2: int
    real_indices: list
    pairs: list                # [(neg_im_index, pos_im_index)] canonical order
    roots: list                # mpc snapshots, canonical order
    r2_prime: object = None    # filled only for conjugation-stable embedded fields

    @property
    def degree(self):
        return self.r1 + 2 * self.r2


def parse_min_poly(spec):
    """Accept 'x^4-2'-style strings or low-to-high coefficient lists."""
    if isinstance(spec, str):
        x = sympy.Symbol("x")
        expr = sympy.sympify(spec.replace("^", "**"), locals={"x": x})
        p = sympy.Poly(expr, x, domain="QQ")
        return pq.from_sympy(p)
    return pq.poly(spec)


def make_field(spec, name="a"):
    """Construct a NumberField; raises REDUCIBLE_POLYNOMIAL / UNSUPPORTED_DEGREE."""
    return NumberField(parse_min_poly(spec), name)


def embeddings(f, ctx=DEFAULT_CONTEXT):
    """Certified embedding table: r1, r2, canonically ordered roots and pairs."""
    system = f.root_system
    system.ensure_radius(Fraction(1, 1 << min(2 * ctx.prec_bits, 2048)))
    real_idx = [i for i in range(f.degree) if system.disks[i].is_real]
    pairs = []
    for p in range((f.degree - system.real_count) // 2):
        lo = system.real_count + 2 * p
        pairs.append((lo, lo + 1))
    return EmbeddingTable(
        r1=system.real_count,
        r2=(f.degree - system.real_count) // 2,
        real_indices=real_idx,
        pairs=pairs,
        roots=[mpc(d.center) for d in system.disks],
    )


# --- conjugation stability -------------------------------------------------------

def _verify_automorphism(e, g):
    """Exact checks: min_poly(g) = 0 and g o g = identity; then certified match
    of sigma(g) with the conjugate root."""
    f = e.field
    # f(g) = 0 in F
    acc = f.zero()
    for c in reversed(f.min_poly):
        acc = acc * g + f.rational(c)
    if not acc.is_zero():
        return False
    if g.apply_poly_map(g) != f.gen():
        return False

    def value_fn(prec):
        return e.sigma_certified(g, prec)

    return e.system.match_value(value_fn) == e.conjugate_index


def is_conjugation_stable(e, ctx=DEFAULT_CONTEXT):
    """(stable, conj_auto): is conj(sigma(F)) = sigma(F)?

    Real embeddings are trivially stable with the identity automorphism.
    Odd-degree non-real embeddings are never stable (an order-2 automorphism
    needs even degree).  Otherwise: numeric candidate via integer relations,
    exact verification; a complete factorization fallback decides the
    negative case soundly.  Cached on the embedded field.
    """
    if e._stability is not None:
        return e._stability
    result = _is_conjugation_stable_uncached(e, ctx)
    e._stability = result
    return result


def _is_conjugation_stable_uncached(e, ctx):
    f = e.field
    if e.is_real_embedding:
        return True, f.gen()
    if f.degree % 2 == 1:
        return False, None
    n = f.degree
    prec_bits = ctx.prec_bits
    for _ in range(3):
        attempt_ctx = PrecisionContext(prec_bits)
        with attempt_ctx.workprec():
            root = e.root_value(prec_bits)
            values = [mp.conj(root)] + [root ** i for i in range(n)]
            try:
                rel = find_integer_relation(values, height_bound=10 ** 8, ctx=attempt_ctx)
            except InsufficientPrecisionError:
                rel = None
        if rel is not None and rel.coefficients[0] != 0:
            m0 = rel.coefficients[0]
            g = f.element([Fraction(-c, m0) for c in rel.coefficients[1:]])
            if _verify_automorphism(e, g):
                return True, g
        prec_bits *= 2
    # complete decision via factorization of min_poly over F
    for cand in f.roots_in_self():
        if cand == f.gen():
            continue
        if _verify_automorphism(e, cand):
            return True, cand
    return False, None


def commuting_flags(e, ctx=DEFAULT_CONTEXT):
    """For each conjugate pair (tau, tau-bar): does tau commute with conjugation?

    Returns (flags, conj_image) where conj_image[i] is the root index of
    tau_i(g) for the positive-imaginary representative tau_i of pair i.
    """
    stable, g = is_conjugation_stable(e, ctx)
    if not stable:
        raise NotStableError("commuting pairs require a conjugation-stable field")
    f = e.field
    system = f.root_system
    flags = []
    images = []
    for p in range(f.r2):
        pos = system.real_count + 2 * p + 1
        tau = EmbeddedField(f, pos)

        def value_fn(prec, tau=tau):
            return tau.sigma_certified(g, prec)

        idx = system.match_value(value_fn)
        images.append(idx)
        flags.append(idx == system.conj_index[pos])
    return flags, images


def commuting_pairs(e, ctx=DEFAULT_CONTEXT):
    """r2' = number of conjugate pairs commuting with the conjugation of e."""
    flags, _ = commuting_flags(e, ctx)
    r2p = sum(flags)
    if (e.field.r2 - r2p) % 2:
        raise InternalAssertionError("r2 - r2' must be even")
    return r2p


# --- classification ---------------------------------------------------------------

TOTALLY_REAL = "totally_real"
CM_FIELD = "cm_field"
CM_EMBEDDING = "cm_embedding"
STABLE_NON_CM = "stable_non_cm"
NON_STABLE = "non_stable"


def classify_embedding(e, ctx=DEFAULT_CONTEXT):
    """Taxonomy of an embedded field; the strongest applicable label.

    totally_real: r2 = 0.  cm_field: every embedding is a CM-embedding
    (equivalently: totally imaginary, stable, and an imaginary quadratic
    extension of a totally real subfield).  cm_embedding: this particular
    embedding is an imaginary quadratic extension of a totally real field.
    Real embeddings of mixed fields are stable (identity) but not CM.
    """
    f = e.field
    if f.r2 == 0:
        return TOTALLY_REAL
    if e.is_real_embedding:
        return STABLE_NON_CM
    stable, _ = is_conjugation_stable(e, ctx)
    if not stable:
        return NON_STABLE
    rs = real_subfield(e, ctx)
    cm_embedded = (f.degree == 2 * rs.degree) and rs.totally_real
    if cm_embedded and f.r1 == 0:
        return CM_FIELD
    if cm_embedded:
        return CM_EMBEDDING
    return STABLE_NON_CM


# --- realness and subfields ------------------------------------------------------

def element_is_real(e, x, ctx=DEFAULT_CONTEXT):
    """Exact decision: is sigma(x) real?  Via the minimal polynomial of x and
    certified matching of sigma(x) against its root system."""
    if x.is_rational():
        return True
    if e.is_real_embedding:
        return True
    m = x.min_poly_of()
    sysm = root_system_for(m)
    if sysm.real_count == 0:
        return False
    if sysm.real_count == sysm.n:
        return True

    def value_fn(prec):
        return e.sigma_certified(x, prec)

    idx = sysm.match_value(value_fn)
    return sysm.disks[idx].is_real


@dataclass
class RealSubfield:
    degree: int
    totally_real: bool
    basis: list
    min_poly: tuple          # of a primitive element
    primitive: object        # FieldElement


def _primitive_of_span(f, basis):
    """A primitive element of the Q-span of the given field elements
    (assumed to be a subfield), with its minimal polynomial."""
    d = len(basis)
    if d == 1:
        x = basis[0]
        return x, x.min_poly_of()
    for t in range(0, 8 * d * d):
        x = f.zero()
        w = 1
        for b in basis:
            x = x + b * w
            w *= (t + 1)
        m = x.min_poly_of()
        if pq.degree(m) == d:
            return x, m
    raise InternalAssertionError("no primitive element found for subfield span")


def real_subfield(e, ctx=DEFAULT_CONTEXT):
    """The subfield {x in F : sigma(x) real}, with exact certification.

    Stable fields use the fixed space of the conjugation automorphism
    (pure linear algebra); otherwise candidates come from integer relations
    on the imaginary parts of power-basis images, each verified exactly.
    """
    f = e.field
    n = f.degree
    if e.is_real_embedding:
        basis = [f.gen() ** i for i in range(n)]
        return RealSubfield(n, f.r2 == 0, basis, f.min_poly, f.gen())
    stable, g = is_conjugation_stable(e, ctx)
    if stable:
        # fixed space of a -> g: kernel of (M_g - I) over Q
        cols = [(f.gen() ** i).apply_poly_map(g) for i in range(n)]
        rows = []
        for i in range(n):
            row = [cols[j].coords[i] - (1 if i == j else 0) for j in range(n)]
            rows.append(row)
        basis_vecs = _rational_kernel(rows)
        basis = [f.element(v) for v in basis_vecs]
    else:
        basis = _real_elements_by_relations(e, ctx)
    prim, m = _primitive_of_span(f, basis)
    tot_real = pq.count_real_roots(m) == pq.degree(m)
    return RealSubfield(len(basis), tot_real, basis, m, prim)


def _rational_kernel(rows):
    """Kernel basis of a rational matrix (rows x cols), exact; echelon form."""
    if not rows:
        return []
    ncols = len(rows[0])
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                fac = m[i][c]
                m[i] = [x - fac * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        out.append(v)
    return out


def _real_elements_by_relations(e, ctx):
    """Certified basis of {x : sigma(x) real} for non-stable embeddings."""
    f = e.field
    n = f.degree
    attempt_ctx = ctx
    for _ in range(4):
        with attempt_ctx.workprec():
            root = e.root_value(attempt_ctx.prec_bits)
            ims = [(root ** i).imag for i in range(n)]
            candidates = candidate_relation_lattice([ims], attempt_ctx)
        height_cap = 1 << (attempt_ctx.prec_bits // 8)
        verified = []
        for c in candidates:
            if max(abs(v) for v in c) > height_cap:
                continue
            x = f.element(c)
            if x.is_zero():
                continue
            if element_is_real(e, x, attempt_ctx):
                verified.append(list(c))
        if verified:
            sat = saturate_rowspace(verified)
            basis = []
            for v in sat:
                x = f.element(v)
                if not element_is_real(e, x, attempt_ctx):
                    raise CertificationFailedError(
                        "saturated real-subfield vector failed verification")
                basis.append(x)
            return basis
        attempt_ctx = attempt_ctx.doubled()
    raise InsufficientPrecisionError("no real-subfield relations found (not even 1)")


# --- conjugate intersection -------------------------------------------------------

@dataclass
class ConjugateIntersection:
    degree: int
    is_real: bool
    basis: list               # elements of F spanning sigma(F) cap conj(sigma(F))
    embedded: object          # EmbeddedField for F' (None when degree == 1)


def _algebraic_equal(e, x, y_conj, ctx):
    """Decide sigma(x) == conj(sigma(y)) exactly via separation bounds."""
    mx = x.min_poly_of()
    my = y_conj.min_poly_of()
    prod = mx if mx == my else pq.mul(mx, my)
    sep_sq = pq.mahler_separation_sq(prod)
    prec = ctx.prec_bits
    for _ in range(24):
        (xre, xim), ex = e.sigma_certified(x, prec)
        (yre, yim), ey = e.sigma_certified(y_conj, prec)
        yim = -yim  # conjugate
        dist_sq = (xre - yre) ** 2 + (xim - yim) ** 2
        if dist_sq > 2 * (ex + ey):
            return False
        if 3 * (dist_sq + ex + ey) < sep_sq:
            return True
        prec *= 2
        e.system.ensure_radius(Fraction(1, 1 << min(2 * prec, 2 * _MAX_ISOLATION_PREC)))
    raise CertificationFailedError("algebraic equality undecided at max precision")


def conjugate_intersection(e, ctx=DEFAULT_CONTEXT):
    """F' = sigma(F) cap conj(sigma(F)) as (degree, is_real, basis, embedded field).

    Stable fields give F' = F directly.  Otherwise relations among
    {sigma(a)^i} u {conj(sigma(a))^j} are detected numerically and each
    candidate is certified by exact algebraic-number equality.
    """
    f = e.field
    n = f.degree
    stable, _ = is_conjugation_stable(e, ctx)
    if stable:
        return ConjugateIntersection(n, e.is_real_embedding,
                                     [f.gen() ** i for i in range(n)], e)
    attempt_ctx = ctx
    for _ in range(4):
        with attempt_ctx.workprec():
            root = e.root_value(attempt_ctx.prec_bits)
            croot = mp.conj(root)
            vals = [root ** i for i in range(n)] + [croot ** j for j in range(n)]
            cols_re = [v.real for v in vals]
            cols_im = [v.imag for v in vals]
            candidates = candidate_relation_lattice([cols_re, cols_im], attempt_ctx)
        height_cap = 1 << (attempt_ctx.prec_bits // 8)
        verified = []
        for vec in candidates:
            if max(abs(v) for v in vec) > height_cap:
                continue
            c, d = vec[:n], vec[n:]
            x = f.element(c)
            y = f.element([-dj for dj in d])
            if x.is_zero() and y.is_zero():
                continue
            if x.is_zero() or y.is_zero():
                continue  # powers of a root are independent; impossible relation
            try:
                if _algebraic_equal(e, x, y, attempt_ctx):
                    verified.append(list(vec))
            except CertificationFailedError:
                continue
        if verified:
            sat = saturate_rowspace(verified)
            basis = []
            for vec in sat:
                x = f.element(vec[:n])
                y = f.element([-dj for dj in vec[n:]])
                if not _algebraic_equal(e, x, y, attempt_ctx):
                    raise CertificationFailedError(
                        "saturated intersection vector failed verification")
                basis.append(x)
            degree = len(basis)
            is_real = all(element_is_real(e, x, attempt_ctx) for x in basis)
            embedded = None
            if degree > 1:
                prim, m = _primitive_of_span(f, basis)
                sysm = root_system_for(m)

                def value_fn(prec, prim=prim):
                    return e.sigma_certified(prim, prec)

                embedded = EmbeddedField(NumberField(m, name="b"),
                                         sysm.match_value(value_fn))
            return ConjugateIntersection(degree, is_real, basis, embedded)
        attempt_ctx = attempt_ctx.doubled()
    raise InsufficientPrecisionError("conjugate intersection not found (not even Q)")


# --- compositum -------------------------------------------------------------------

def compositum_with_conjugate(e, ctx=DEFAULT_CONTEXT):
    """Embedded field containing sigma(F) and conj(sigma(F)).

    gamma = a + t * conj(a) for the smallest t that is primitive; the minimal
    polynomial comes from an exact resultant, the expression of a in gamma is
    found numerically and verified by exact polynomial composition.
    """
    f = e.field
    n = f.degree
    stable, _ = is_conjugation_stable(e, ctx)
    if stable:
        return e
    for t in range(1, n * n + 2):
        h = pq.squarefree_part(pq.scaled_sum_poly(f.min_poly, t))
        factors = [fac for fac, _ in pq.factor_rational(h)]
        target = _factor_at_gamma(e, factors, t, ctx)
        if target is None:
            continue
        big = NumberField(pq.monic(target), name="g")
        deg = big.degree
        if deg < n:
            continue
        expr = _express_root_in_gamma(e, big, t, ctx)
        if expr is None:
            continue
        sysg = big.root_system

        def gamma_fn(prec, t=t):
            (re, im), err = e.sigma_certified(f.gen(), prec)
            gre = re + t * re
            gim = im - t * im
            return (gre, gim), err * (1 + t) ** 2 * 2
        idx = sysg.match_value(gamma_fn)
        return EmbeddedField(big, idx)
    raise InternalAssertionError("no primitive t found for the compositum")


def _factor_at_gamma(e, factors, t, ctx):
    """The unique irreducible factor vanishing at gamma = sigma(a) + t conj(sigma(a))."""
    f = e.field
    for _ in range(24):
        (re, im), err = e.sigma_certified(f.gen(), ctx.prec_bits)
        gre, gim = re + t * re, im - t * im
        gerr = err * (1 + t) ** 2 * 2
        live = []
        for fac in factors:
            vre, vim = pq.eval_exact_complex(fac, gre, gim)
            # |fac(gamma_center)| small enough to be compatible with a zero:
            # use a derivative bound on a disk of radius sqrt(gerr)
            r_ub = gerr if gerr > 1 else Fraction(1)
            radius_big = abs(gre) + abs(gim) + r_ub
            dbound = Fraction(0)
            for i, c in enumerate(fac):
                if i and c:
                    dbound += i * abs(c) * radius_big ** (i - 1)
            slack_sq = gerr * dbound * dbound
            if vre * vre + vim * vim <= 4 * max(slack_sq, Fraction(1, 1 << (4 * ctx.prec_bits))):
                live.append(fac)
        if len(live) == 1:
            return live[0]
        if not live:
            raise InternalAssertionError("gamma is not a root of the resultant")
        e.system.refine()
    raise CertificationFailedError("factor identification did not converge")


def _express_root_in_gamma(e, big, t, ctx):
    """Coordinates of sigma(a) as a polynomial in gamma, exactly verified.

    Verification: f(p(x)) == 0 mod min_poly(gamma), plus a certified numeric
    match of p(gamma) with sigma(a).  Returns the coordinate list or None.
    """
    f = e.field
    deg = big.degree
    prec_bits = max(ctx.prec_bits, 2 * big.degree * 16)
    for _ in range(3):
        attempt_ctx = PrecisionContext(prec_bits)
        with attempt_ctx.workprec():
            root = e.root_value(prec_bits)
            gamma = root + t * mp.conj(root)
            values = [root] + [gamma ** i for i in range(deg)]
            try:
                rel = find_integer_relation(values, height_bound=10 ** 9, ctx=attempt_ctx)
            except InsufficientPrecisionError:
                rel = None
        if rel is not None and rel.coefficients[0] != 0:
            m0 = rel.coefficients[0]
            coords = [Fraction(-c, m0) for c in rel.coefficients[1:]]
            p = pq.trim(coords)
            comp = pq.compose(f.min_poly, p)
            _, rem = pq.divmod_poly(comp, big.min_poly)
            if not rem:
                return coords
        prec_bits *= 2
    return None
