"""Pre-Bloch calculus over an embedded number field: formal sums of [z],
the five-term relation, the exact mu-map into the second exterior power of
a constructed multiplicative basis, the conjugation involution, and the
+-1 eigenspace split.

All statements live in the rationalized Bloch group: torsion is dropped
throughout, so mu is computed in the torsion-free quotient of the subgroup
generated by the support.  ZERO_EXACT verdicts are proven (an exact wedge
expression vanishes); NONZERO_MODULO_SEARCH means nonzero unless a
multiplicative relation above the recorded search bounds was missed.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

from .errors import (
    CertificationFailedError,
    DegenerateConfigurationError,
    InternalAssertionError,
    NotStableError,
)
from .lattice import mat_mul, saturate_rowspace, smith_normal_form, integer_matrix_inverse
from .numberfield import is_conjugation_stable, torsion_quantum
from .precision import DEFAULT_CONTEXT
from .relations import candidate_relation_lattice

ZERO_EXACT = "ZERO_EXACT"
NONZERO_MODULO_SEARCH = "NONZERO_MODULO_SEARCH"


class FormalSum:
    """Q-linear combination of generators [z], z in F \\ {0, 1}.

    Immutable; terms with zero coefficient are dropped, keys compared by
    exact field equality.
    """

    __slots__ = ("parent", "_terms")

    def __init__(self, parent, terms=()):
        self.parent = parent
        acc = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for z, c in items:
            c = Fraction(c)
            if not c:
                continue
            if z.is_zero() or z.is_one():
                raise ValueError("generators must avoid {0, 1}")
            acc[z] = acc.get(z, Fraction(0)) + c
        self._terms = {z: c for z, c in acc.items() if c}

    def items(self):
        return list(self._terms.items())

    def support(self):
        return list(self._terms.keys())

    def coefficient(self, z):
        return self._terms.get(z, Fraction(0))

    def is_zero(self):
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __add__(self, other):
        if other.parent != self.parent:
            raise ValueError("formal sums over different embedded fields")
        merged = dict(self._terms)
        for z, c in other._terms.items():
            merged[z] = merged.get(z, Fraction(0)) + c
        return FormalSum(self.parent, merged)

    def __neg__(self):
        return FormalSum(self.parent, {z: -c for z, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, q):
        q = Fraction(q)
        return FormalSum(self.parent, {z: c * q for z, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, FormalSum) and self.parent == other.parent
                and self._terms == other._terms)

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*[{z}]" for z, c in self._terms.items())

    def to_dict(self):
        """JSON-ready form: field description plus (coefficient, coords) pairs."""
        return {
            "minpoly": [str(c) for c in self.parent.field.min_poly],
            "root_index": self.parent.root_index,
            "terms": [
                {"coefficient": str(c), "coords": [str(x) for x in z.coords]}
                for z, c in sorted(self._terms.items(),
                                   key=lambda t: tuple(t[0].coords))
            ],
        }


def formal_sum_from_dict(d, embedded):
    terms = []
    for t in d["terms"]:
        z = embedded.field.element([Fraction(x) for x in t["coords"]])
        terms.append((z, Fraction(t["coefficient"])))
    return FormalSum(embedded, terms)


def five_term(e, x, y):
    """The five-term relation [x] - [y] + [y/x] - [(1-1/x)/(1-1/y)] + [(1-x)/(1-y)].

    Exact field arithmetic; raises DegenerateConfigurationError naming the
    first term that lands in {0, 1}.
    """
    f = e.field
    one = f.one()

    def check(name, v):
        if v.is_zero() or v.is_one():
            raise DegenerateConfigurationError(name)
        return v

    x = check("x", x)
    y = check("y", y)
    t3 = check("y/x", y / x)
    t4 = check("(1-1/x)/(1-1/y)", (one - x.inverse()) / (one - y.inverse()))
    t5 = check("(1-x)/(1-y)", (one - x) / (one - y))
    return FormalSum(e, [(x, 1), (y, -1), (t3, 1), (t4, -1), (t5, 1)])


@dataclass
class Expression:
    """s = torsion * prod u_j^exponents[j], an exact identity in F."""

    torsion: object            # FieldElement, a root of unity
    exponents: tuple           # integers over the basis generators


class MultiplicativeBasis:
    """Generators of the subgroup of F* generated by S, modulo torsion.

    relation_lattice rows are verified relations: prod s^m is a root of
    unity, checked exactly.  Missed relations only enlarge the basis; they
    never make a stored expression wrong.
    """

    def __init__(self, embedded, elements, generators, relation_lattice,
                 expressions, provenance):
        self.embedded = embedded
        self.elements = elements            # deduped S
        self.generators = generators        # list of FieldElement (mod torsion)
        self.relation_lattice = relation_lattice
        self.expressions = expressions      # dict FieldElement -> Expression
        self.provenance = provenance        # dict: prec_bits, height_cap, retries

    @property
    def rank(self):
        return len(self.generators)

    def expression_of(self, s):
        return self.expressions[s]


def _embedding_log_columns(e, elems, prec_bits):
    """Archimedean log-modulus rows plus the principal-argument row at e.

    Returns a list of value columns for the relation search; each column has
    one entry per element plus one trailing slot for the synthetic winding
    coordinate (2/W in the argument column, 0 elsewhere).
    """
    f = e.field
    system = f.root_system
    w_quantum = Fraction(2, torsion_quantum(f.degree))
    rep_indices = [i for i in range(f.degree) if system.disks[i].is_real]
    rep_indices += [system.real_count + 2 * p + 1 for p in range(f.r2)]
    columns = []
    roots = {i: e.field.embedding(i).root_value(prec_bits) for i in rep_indices}
    for i in rep_indices:
        col = [mp.log(abs(s.numeric(roots[i]))) for s in elems]
        col.append(mpf(0))
        columns.append(col)
    sigma_root = e.root_value(prec_bits)
    arg_col = [mp.arg(s.numeric(sigma_root)) / mp.pi for s in elems]
    arg_col.append(mpf(w_quantum.numerator) / w_quantum.denominator)
    columns.append(arg_col)
    return columns


def build_multiplicative_basis(e, elements, ctx=DEFAULT_CONTEXT):
    """Verified relation lattice and basis for the subgroup generated by S.

    Candidates come from LLL on archimedean log-modulus data (plus the
    principal-argument row with a rational winding slot); every candidate is
    verified exactly via a root-of-unity test before it enters the lattice.
    Candidates that pass numerically but fail verification trigger a
    precision doubling (up to 3 retries).
    """
    f = e.field
    for s in elements:
        if s.is_zero():
            raise ValueError("multiplicative basis requires nonzero elements")
    seen = []
    for s in elements:
        if s not in seen:
            seen.append(s)
    torsion_expr = {}
    nontorsion = []
    for s in seen:
        is_tors, _ = s.is_root_of_unity()
        if is_tors:
            torsion_expr[s] = s
        else:
            nontorsion.append(s)

    k = len(nontorsion)
    provenance = {"prec_bits": ctx.prec_bits, "retries": 0}
    verified = []
    if k:
        attempt_ctx = ctx
        for retry in range(4):
            height_cap = 1 << max(8, attempt_ctx.prec_bits // 16)
            provenance.update(prec_bits=attempt_ctx.prec_bits,
                              height_cap=height_cap, retries=retry)
            with attempt_ctx.workprec():
                columns = _embedding_log_columns(e, nontorsion,
                                                 attempt_ctx.prec_bits)
                candidates = candidate_relation_lattice(columns, attempt_ctx)
            numeric_pass = 0
            for vec in candidates:
                m = vec[:k]
                if not any(m):
                    continue
                if max(abs(c) for c in m) > height_cap:
                    continue
                numeric_pass += 1
                prod = f.one()
                for s, c in zip(nontorsion, m):
                    if c:
                        prod = prod * s ** c
                if prod.is_root_of_unity()[0]:
                    verified.append(list(m))
            if verified or numeric_pass == 0:
                break
            attempt_ctx = attempt_ctx.doubled()

    if verified:
        lattice = saturate_rowspace(verified)
        for m in lattice:
            prod = f.one()
            for s, c in zip(nontorsion, m):
                if c:
                    prod = prod * s ** c
            if not prod.is_root_of_unity()[0]:
                raise CertificationFailedError(
                    "saturated multiplicative relation failed the exact test")
    else:
        lattice = []

    r = len(lattice)
    if r:
        d, _, v = smith_normal_form(lattice)
        diag = [d[i][i] for i in range(min(len(d), k))]
        if any(x != 1 for x in diag[:r]):
            raise InternalAssertionError("saturated lattice has nontrivial divisors")
        w_rows = integer_matrix_inverse(v)
    else:
        v = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
        w_rows = v

    def power_product(exps):
        prod = f.one()
        for s, c in zip(nontorsion, exps):
            if c:
                prod = prod * s ** c
        return prod

    torsion_units = [power_product(w_rows[j]) for j in range(r)]
    generators = [power_product(w_rows[j]) for j in range(r, k)]

    expressions = {}
    for i, s in enumerate(nontorsion):
        coeffs = v[i]
        tors = f.one()
        for j in range(r):
            c = coeffs[j]
            if c:
                tors = tors * torsion_units[j] ** c
        exps = tuple(coeffs[j] for j in range(r, k))
        recon = tors
        for u, c in zip(generators, exps):
            if c:
                recon = recon * u ** c
        if recon != s:
            raise InternalAssertionError("basis expression failed to reproduce element")
        if not tors.is_root_of_unity()[0]:
            raise InternalAssertionError("torsion part is not a root of unity")
        expressions[s] = Expression(torsion=tors, exponents=exps)
    for s in torsion_expr:
        expressions[s] = Expression(torsion=s, exponents=(0,) * (k - r))

    return MultiplicativeBasis(e, seen, generators, lattice, expressions, provenance)


class WedgeElement:
    """Exact element of wedge^2 of the constructed multiplicative basis."""

    __slots__ = ("basis", "coords")

    def __init__(self, basis, coords):
        self.basis = basis
        self.coords = coords    # t x t antisymmetric Fraction matrix

    def is_zero(self):
        return all(not c for row in self.coords for c in row)

    def nonzero_entries(self):
        t = len(self.coords)
        return [(j, k, self.coords[j][k])
                for j in range(t) for k in range(j + 1, t) if self.coords[j][k]]

    def __repr__(self):
        entries = self.nonzero_entries()
        if not entries:
            return "0"
        return " + ".join(f"{c}*(u{j}^u{k})" for j, k, c in entries)


def mu(beta, ctx=DEFAULT_CONTEXT):
    """The map sum n_i [z_i] -> sum n_i z_i ^ (1 - z_i), computed exactly.

    Returns (WedgeElement, verdict).  ZERO_EXACT is proven: the wedge
    expression over the constructed basis vanishes identically, which
    forces vanishing in wedge^2(F* tensor Q).
    """
    e = beta.parent
    f = e.field
    if beta.is_zero():
        basis = MultiplicativeBasis(e, [], [], [], {}, {"prec_bits": ctx.prec_bits})
        return WedgeElement(basis, []), ZERO_EXACT
    denom = math.lcm(*[c.denominator for _, c in beta.items()])
    scaled = [(z, int(c * denom)) for z, c in beta.items()]
    one = f.one()
    s_list = []
    for z, _ in scaled:
        s_list.append(z)
        s_list.append(one - z)
    basis = build_multiplicative_basis(e, s_list, ctx)
    t = basis.rank
    coords = [[Fraction(0)] * t for _ in range(t)]
    for z, n in scaled:
        a = basis.expression_of(z).exponents
        b = basis.expression_of(one - z).exponents
        for j in range(t):
            if not a[j] and not b[j]:
                continue
            for kk in range(j + 1, t):
                val = Fraction(n * (a[j] * b[kk] - a[kk] * b[j]), denom)
                if val:
                    coords[j][kk] += val
                    coords[kk][j] -= val
    w = WedgeElement(basis, coords)
    return w, (ZERO_EXACT if w.is_zero() else NONZERO_MODULO_SEARCH)


def involution(beta, ctx=DEFAULT_CONTEXT):
    """[z] -> [conj(z)] term by term, via the exact conjugation automorphism."""
    e = beta.parent
    stable, g = is_conjugation_stable(e, ctx)
    if not stable:
        raise NotStableError("involution requires a conjugation-stable field")
    return FormalSum(e, [(z.apply_poly_map(g), c) for z, c in beta.items()])


def eigenspace_split(beta, ctx=DEFAULT_CONTEXT):
    """(beta_plus, beta_minus) with beta = plus + minus, delta acting as +-1."""
    delta = involution(beta, ctx)
    half = Fraction(1, 2)
    return (beta + delta) * half, (beta - delta) * half
