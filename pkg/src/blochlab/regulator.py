"""Borel regulator matrices, eigenspace rank predictions and their
numerical verification, and the rho-map: volume and Chern-Simons class
with rationality detection.

Conventions (stamped into every report):
  - one embedding per conjugate pair, the positive-imaginary root;
  - ker(e) = C/Q(2) identified via 2*pi*i ^ c  ->  -pi*i * c, the scaling
    that makes Im agree with the D2 regulator (fig-8 volume positive);
  - cs is reported as cs / pi^2 with a rational-recognition verdict, never
    an unconditional irrationality claim.
"""

import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from mpmath import mp, mpc, mpf

from . import dilog
from .blochgroup import (
    ZERO_EXACT,
    FormalSum,
    build_multiplicative_basis,
    eigenspace_split,
    five_term,
    involution,
    mu,
)
from .errors import (
    DegenerateConfigurationError,
    InternalAssertionError,
    MuNonzeroError,
    NotStableError,
    RecognitionFailedError,
    TotallyRealError,
)
from .numberfield import (
    EmbeddedField,
    commuting_flags,
    conjugate_intersection,
    is_conjugation_stable,
    real_subfield,
    torsion_quantum,
)
from .precision import DEFAULT_CONTEXT, mpf_to_fraction
from .relations import qrank, rational_recognize


def embedding_representatives(e, ctx=DEFAULT_CONTEXT):
    """One embedding per conjugate pair: the positive-imaginary root, in
    canonical order.  Raises TOTALLY_REAL when r2 = 0."""
    f = e.field
    if f.r2 == 0:
        raise TotallyRealError("no complex places")
    system = f.root_system
    return [EmbeddedField(f, system.real_count + 2 * p + 1) for p in range(f.r2)]


def _d2_at(rep, z, ctx):
    """D2(sigma_rep(z)) with exact 0 for certified-real images."""
    (vre, vim), err = rep.sigma_certified(z, ctx.prec_bits)
    if vim * vim > 2 * err:
        with ctx.workprec():
            val = rep.sigma(z, ctx.prec_bits)
            return dilog.bloch_wigner_d2(val, ctx)
    # near-real: decide exactly via the minimal polynomial
    from .numberfield import element_is_real
    if element_is_real(rep, z, ctx):
        return mpf(0)
    with ctx.workprec():
        val = rep.sigma(z, 2 * ctx.prec_bits)
        return dilog.bloch_wigner_d2(val, ctx)


@dataclass
class RegulatorMatrix:
    """Rows = formal sums, columns = embedding representatives; entries are
    sums of D2 values."""

    embedded: object
    elements: list
    reps: list
    values: list        # rows of mpf

    def row(self, i):
        return self.values[i]


def borel_matrix(elements, e, ctx=DEFAULT_CONTEXT):
    """The regulator matrix: entry (i, j) = sum_z n_z D2(sigma_j(z_i))."""
    reps = embedding_representatives(e, ctx)
    values = []
    for beta in elements:
        row = []
        for rep in reps:
            acc = mpf(0)
            with ctx.workprec():
                for z, c in beta.items():
                    d2 = _d2_at(rep, z, ctx)
                    if d2:
                        acc += mpf(c.numerator) / c.denominator * d2
            row.append(ctx.round_out(acc))
        values.append(row)
    return RegulatorMatrix(e, list(elements), reps, values)


@dataclass
class RankReport:
    """Theorem-B style report: predicted vs observed eigenspace ranks."""

    predicted_minus: int
    predicted_plus: int
    observed_minus: object = None
    observed_plus: object = None
    consistent: object = None
    zero_block_ok: object = None
    block_matrix: object = None
    details: dict = dc_field(default_factory=dict)


def predicted_ranks(e, ctx=DEFAULT_CONTEXT):
    """Predicted ranks of the +-1 eigenspaces of the rationalized Bloch group.

    Stable non-real fields: ((r2 + r2')/2, (r2 - r2')/2).  Real embeddings
    of mixed fields: (0, r2).  Non-stable fields: reduce to F' = F cap
    conj(F) and F cap R.  Totally real fields raise TOTALLY_REAL.
    """
    f = e.field
    if f.r2 == 0:
        raise TotallyRealError("rank query on a totally real field")
    if e.is_real_embedding:
        return RankReport(0, f.r2, details={"case": "real_embedding"})
    stable, _ = is_conjugation_stable(e, ctx)
    if stable:
        flags, _ = commuting_flags(e, ctx)
        r2p = sum(flags)
        if (f.r2 + r2p) % 2 or (f.r2 - r2p) % 2:
            raise InternalAssertionError("r2 +- r2' must be even")
        return RankReport((f.r2 + r2p) // 2, (f.r2 - r2p) // 2,
                          details={"case": "stable", "r2": f.r2, "r2_prime": r2p})
    ci = conjugate_intersection(e, ctx)
    if ci.is_real or ci.degree == 1 or ci.embedded is None:
        minus = 0
    else:
        sub = predicted_ranks(ci.embedded, ctx)
        minus = sub.predicted_minus
    rs = real_subfield(e, ctx)
    import blochlab.polynomials as pq
    r1_sub = pq.count_real_roots(rs.min_poly)
    r2_sub = (pq.degree(rs.min_poly) - r1_sub) // 2
    return RankReport(minus, r2_sub,
                      details={"case": "non_stable",
                               "conjugate_intersection_degree": ci.degree,
                               "conjugate_intersection_real": ci.is_real,
                               "real_subfield_degree": rs.degree})


def theorem_b_samples(e, ctx=DEFAULT_CONTEXT, n_five_terms=4, seed=7):
    """Sample mu-kernel elements: torsion classes [zeta] (nonzero regulator
    rows) plus five-term instances (zero rows, exercising the kernel check)."""
    f = e.field
    rng = random.Random(seed)
    samples = []
    for zeta in f.torsion_elements():
        if zeta.is_zero() or zeta.is_one():
            continue
        samples.append(FormalSum(e, [(zeta, 1)]))

    def rand_elem():
        return f.element([Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                          for _ in range(f.degree)])

    made = 0
    guard = 0
    while made < n_five_terms and guard < 200:
        guard += 1
        try:
            ft = five_term(e, rand_elem(), rand_elem())
        except (DegenerateConfigurationError, ZeroDivisionError):
            continue
        samples.append(ft)
        made += 1
    return samples


def _norm_form(field):
    """The norm of c0 + c1 a + ... as an explicit polynomial in the coords."""
    import sympy
    import blochlab.polynomials as pq
    n = field.degree
    cs = sympy.symbols(f"c0:{n}")
    x = sympy.Symbol("x")
    fp = pq.to_sympy(field.min_poly).as_expr()
    zp = sum(c * x ** i for i, c in enumerate(cs))
    return sympy.lambdify(cs, sympy.expand(sympy.resultant(fp, zp, x)), "math")


def _smooth(n, primes):
    n = abs(int(n))
    if n == 0:
        return False
    for p in primes:
        while n % p == 0:
            n //= p
    return n == 1


def search_kernel_elements(e, ctx=DEFAULT_CONTEXT, primes=(2, 3, 5, 7), box=4,
                           max_pool=60, want=2):
    """Field-specific mu-kernel elements with nonzero regulator rows.

    Enumerates z with integer coordinates in [-box, box] such that the
    norms of z and 1 - z are both primes-smooth (S-unit pairs), builds the
    joint multiplicative basis, and extracts the integer kernel of the
    wedge-coordinate matrix.  Universal relations (five-term consequences)
    have zero regulator rows; the survivors exhibit actual Bloch-group rank.
    """
    import itertools
    from .lattice import right_kernel
    f = e.field
    one = f.one()
    norm = _norm_form(f)
    pool = []
    for cc in itertools.product(range(-box, box + 1), repeat=f.degree):
        z = f.element(list(cc))
        if z.is_zero() or z.is_one():
            continue
        nz = norm(*cc)
        n1z = norm(*(1 - cc[0], *(-c for c in cc[1:])))
        if _smooth(round(nz), primes) and _smooth(round(n1z), primes):
            pool.append(z)
    pool.sort(key=lambda z: (max(abs(c) for c in z.coords), tuple(z.coords)))
    pool = pool[:max_pool]
    if not pool:
        return []
    s_list = []
    for z in pool:
        s_list.append(z)
        s_list.append(one - z)
    basis = build_multiplicative_basis(e, s_list, ctx)
    t = basis.rank

    def wedge_vec(z):
        za = basis.expression_of(z).exponents
        zb = basis.expression_of(one - z).exponents
        return [za[j] * zb[k] - za[k] * zb[j]
                for j in range(t) for k in range(j + 1, t)]

    cols = [wedge_vec(z) for z in pool]
    rows = [[cols[i][r] for i in range(len(pool))] for r in range(len(cols[0]))]
    rows = [r for r in rows if any(r)]
    kernel = right_kernel(rows) if rows else []
    out = []
    for vec in kernel:
        support = [(z, c) for z, c in zip(pool, vec) if c]
        if not support:
            continue
        beta = FormalSum(e, support)
        _, verdict = mu(beta, ctx)
        if verdict != ZERO_EXACT:
            raise InternalAssertionError("kernel search produced a non-kernel sum")
        reg = borel_matrix([beta], e, ctx)
        if any(abs(v) > mpf(2) ** (-ctx.prec_bits // 4) for v in reg.values[0]):
            out.append(beta)
            if len(out) >= want:
                break
    return out


def verify_theorem_b(e, samples, ctx=DEFAULT_CONTEXT):
    """Observed eigenspace ranks from mu-kernel samples vs Theorem B.

    Splits each sample, computes the regulator matrices of the plus and
    minus parts, and reports observed ranks, the zero-block diagnostic of
    the proof (plus rows vanish at commuting representatives) and the
    B/-B, C/C block symmetry at non-commuting pairs.
    """
    f = e.field
    stable, _ = is_conjugation_stable(e, ctx)
    if not stable:
        raise NotStableError("Theorem B verification requires a stable field")
    pred = predicted_ranks(e, ctx)
    minus_parts, plus_parts = [], []
    for beta in samples:
        _, verdict = mu(beta, ctx)
        if verdict != ZERO_EXACT:
            raise MuNonzeroError("sample is not in the mu-kernel")
        plus, minus = eigenspace_split(beta, ctx)
        plus_parts.append(plus)
        minus_parts.append(minus)

    reg_minus = borel_matrix(minus_parts, e, ctx)
    reg_plus = borel_matrix(plus_parts, e, ctx)
    obs_minus, rep_m = qrank(reg_minus.values, ctx) if minus_parts else (0, None)
    obs_plus, rep_p = qrank(reg_plus.values, ctx) if plus_parts else (0, None)

    flags, images = commuting_flags(e, ctx)
    system = f.root_system
    tol = ctx.tol
    scale = max([abs(v) for row in reg_minus.values + reg_plus.values for v in row]
                + [mpf(1)])
    zero_block_ok = True
    with ctx.workprec():
        for p, flag in enumerate(flags):
            if not flag:
                continue
            for plus in plus_parts:
                rep = EmbeddedField(f, system.real_count + 2 * p + 1)
                acc = mpf(0)
                for z, c in plus.items():
                    acc += mpf(c.numerator) / c.denominator * _d2_at(rep, z, ctx)
                if abs(acc) > tol * scale * 256:
                    zero_block_ok = False
        # non-commuting pairs: minus rows negate, plus rows repeat at tau*delta
        for p, flag in enumerate(flags):
            if flag:
                continue
            rep = EmbeddedField(f, system.real_count + 2 * p + 1)
            rep_delta = EmbeddedField(f, images[p])
            for part, sign in ((minus_parts, -1), (plus_parts, 1)):
                for beta in part:
                    acc = mpf(0)
                    accd = mpf(0)
                    for z, c in beta.items():
                        q = mpf(c.numerator) / c.denominator
                        acc += q * _d2_at(rep, z, ctx)
                        accd += q * _d2_at(rep_delta, z, ctx)
                    if abs(accd - sign * acc) > tol * scale * 256:
                        zero_block_ok = False

    consistent = (obs_minus <= pred.predicted_minus
                  and obs_plus <= pred.predicted_plus)
    return RankReport(
        pred.predicted_minus, pred.predicted_plus,
        observed_minus=obs_minus, observed_plus=obs_plus,
        consistent=consistent, zero_block_ok=zero_block_ok,
        block_matrix={"minus": reg_minus.values, "plus": reg_plus.values,
                      "commuting_flags": flags},
        details={**pred.details,
                 "qrank_minus": rep_m.__dict__ if rep_m else None,
                 "qrank_plus": rep_p.__dict__ if rep_p else None},
    )


# --- the rho-map -----------------------------------------------------------------

@dataclass
class CsRationality:
    """Verdict on cs/pi^2: RATIONAL(p/q) when recognized, else a qualified
    NO_RELATION_FOUND (never an irrationality claim)."""

    kind: str                  # "RATIONAL" | "NO_RELATION_FOUND"
    value: object = None       # the recognized Fraction (RATIONAL only)
    height: int = 0
    prec_bits: int = 0

    @property
    def is_rational(self):
        return self.kind == "RATIONAL"

    def __str__(self):
        if self.kind == "RATIONAL":
            return f"RATIONAL({self.value})"
        return f"NO_RELATION_FOUND(height={self.height}, prec={self.prec_bits})"


@dataclass
class CsClass:
    """Volume and Chern-Simons class of a mu-kernel element.

    volume is absolute; cs lives in R mod pi^2 Q.  cs_over_pi2 is the raw
    real value; class_representative is it taken mod Q: 0 when a rational
    was recognized (the class is then zero in R/pi^2 Q), otherwise the
    value mod 1.  volume_delta records the agreement between Im(rho) and
    the direct D2 sum.
    """

    volume: object
    cs: object
    cs_over_pi2: object
    rationality: CsRationality
    volume_delta: object
    provenance: dict

    @property
    def class_representative(self):
        if self.rationality.is_rational:
            return Fraction(0)
        v = mpf_to_fraction(self.cs_over_pi2)
        return v - math.floor(v)


def _recognize_log_coefficient(value, max_den, ctx):
    """The 2*pi*i coefficient of a branch/torsion residual must be rational."""
    q = rational_recognize(value, max_den, ctx)
    if q is None:
        raise RecognitionFailedError(
            f"2*pi*i coefficient {mp.nstr(value, 20)} not recognized "
            f"(max denominator {max_den})")
    return q


def rho_class(beta, e=None, ctx=DEFAULT_CONTEXT, max_denominator=10**4):
    """Volume and Chern-Simons class of a mu-kernel formal sum.

    Pipeline: exact mu-basis expressions give log sigma(z) as an exact
    rational combination of {2*pi*i, log sigma(u_j)} (the 2*pi*i coefficient
    is recognized and must be rational with denominator bounded by the
    torsion quantum); the wedge assembles into 2*pi*i ^ c with the
    u_j ^ u_k block vanishing exactly; the class is -pi*i*c in C/Q(2).
    """
    if e is None:
        e = beta.parent
    f = e.field
    w, verdict = mu(beta, ctx)
    if verdict != ZERO_EXACT:
        raise MuNonzeroError("rho requires an exact mu-kernel element")
    if not w.is_zero():
        raise InternalAssertionError("mu reported zero but wedge is nonzero")
    basis = w.basis
    wq = torsion_quantum(f.degree)
    one = f.one()

    attempt = ctx
    last_err = None
    while attempt.prec_bits <= 4 * ctx.prec_bits:
        try:
            return _rho_class_at(beta, e, basis, wq, attempt, ctx, max_denominator)
        except RecognitionFailedError as ex:
            last_err = ex
            attempt = attempt.doubled()
    raise last_err


def _rho_class_at(beta, e, basis, wq, attempt, report_ctx, max_denominator):
    f = e.field
    one = f.one()
    t = basis.rank
    with attempt.workprec():
        root = e.root_value(attempt.prec_bits)
        log_u = [mp.log(u.numeric(root)) for u in basis.generators]
        twopii = 2 * mp.pi * mp.j
        c_total = mpc(0)
        qvec = [Fraction(0)] * t
        d2_total = mpf(0)
        for z, coeff in beta.items():
            za = basis.expression_of(z)
            zb = basis.expression_of(one - z)
            zv = z.numeric(root)
            lz, l1z, c_scalar = dilog.rho_scalar(zv, attempt)
            resid_a = lz - mp.fsum([aj * lu for aj, lu in zip(za.exponents, log_u)])
            resid_b = l1z - mp.fsum([bj * lu for bj, lu in zip(zb.exponents, log_u)])
            if abs(resid_a.real) > mpf(2) ** (-attempt.prec_bits // 2) or \
               abs(resid_b.real) > mpf(2) ** (-attempt.prec_bits // 2):
                raise RecognitionFailedError("log residual is not purely imaginary")
            a0 = _recognize_log_coefficient(resid_a.imag / (2 * mp.pi), wq, attempt)
            b0 = _recognize_log_coefficient(resid_b.imag / (2 * mp.pi), wq, attempt)
            qc = mpf(coeff.numerator) / coeff.denominator
            c_total += qc * c_scalar
            for j in range(t):
                qvec[j] += coeff * (a0 * zb.exponents[j] - b0 * za.exponents[j])
            d2_total += qc * dilog.bloch_wigner_d2(zv, attempt) if zv.imag != 0 \
                else mpf(0)
        # the surviving wedge part is 2*pi*i ^ (c_total + sum q_j log u_j);
        # the class in C/Q(2) is -pi*i times the bracket
        bracket = c_total
        for j in range(t):
            if qvec[j]:
                bracket += mpf(qvec[j].numerator) / qvec[j].denominator * log_u[j]
        value = -mp.pi * mp.j * bracket
        volume = value.imag
        cs = value.real
        cs_over_pi2 = cs / mp.pi ** 2
        volume_delta = abs(volume - d2_total)
    if volume_delta > mpf(2) ** (-(report_ctx.prec_bits // 2)) * max(1, abs(volume)):
        raise InternalAssertionError(
            f"Im(rho) disagrees with the D2 sum by {mp.nstr(volume_delta, 8)}")
    rationality = _rationality_verdict(cs_over_pi2, max_denominator, attempt)
    return CsClass(
        volume=report_ctx.round_out(volume),
        cs=report_ctx.round_out(cs),
        cs_over_pi2=report_ctx.round_out(cs_over_pi2),
        rationality=rationality,
        volume_delta=report_ctx.round_out(volume_delta),
        provenance={
            "prec_bits": attempt.prec_bits,
            "basis_rank": t,
            "basis_provenance": basis.provenance,
            "identification": "2*pi*i ^ c -> -pi*i*c",
            "representative": "positive imaginary part",
            "max_denominator": max_denominator,
        },
    )


def _rationality_verdict(cs_over_pi2, max_denominator, ctx):
    q = rational_recognize(cs_over_pi2, max_denominator, ctx)
    if q is None:
        return CsRationality("NO_RELATION_FOUND", height=max_denominator,
                             prec_bits=ctx.prec_bits)
    return CsRationality("RATIONAL", value=q,
                         height=max_denominator, prec_bits=ctx.prec_bits)


def cs_rationality_report(cs_class, height, ctx=DEFAULT_CONTEXT):
    """Re-recognition of cs/pi^2 at a given denominator bound.

    RATIONAL(p/q) with q <= height, else NO_RELATION_FOUND(height, prec):
    explicitly not a proof of irrationality.
    """
    return _rationality_verdict(cs_class.cs_over_pi2, height, ctx)
