"""Numeric-to-exact bridge: integer relation detection, rational
recognition, and Q-rank of numeric matrices.

Detection is LLL on the standard identity-plus-scaled-columns lattice
(column scale 2^(prec_bits/2)).  A returned Relation is only a candidate
certificate: callers that can re-evaluate their inputs must verify it
(exactly, or at doubled precision) before trusting it.  "None" results
are always qualified by (height_bound, prec_bits).
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .errors import InsufficientPrecisionError
from .lattice import lll_reduce
from .precision import DEFAULT_CONTEXT, mpf_to_fraction

_MEANINGFUL_MARGIN_BITS = 16


@dataclass(frozen=True)
class Relation:
    """Integer vector m with |sum m_i x_i| = residual, max |m_i| = height."""

    coefficients: tuple
    residual: object  # mpf
    height: int

    def __iter__(self):
        return iter(self.coefficients)


def _require_meaningful(n_values, height_bound, ctx):
    """Reject searches the working precision cannot support.

    The lattice scale is 2^(prec/2); a search is meaningful only if that
    dominates the coefficient space: prec/2 >= log2(height) + log2(n) + margin.
    """
    need = math.log2(max(height_bound, 2)) + math.log2(max(n_values, 2)) + _MEANINGFUL_MARGIN_BITS
    if ctx.prec_bits / 2 < need:
        raise InsufficientPrecisionError(
            f"{ctx.prec_bits} bits cannot support height {height_bound} "
            f"over {n_values} values (need >= {2 * need:.0f} bits)"
        )


def _as_real_columns(xs):
    """Split a list of real/complex numbers into real coordinate columns.

    Complex entries contribute simultaneous (re, im) columns.
    """
    cols_re = []
    cols_im = []
    has_im = False
    for x in xs:
        z = mpmath.mpmathify(x)
        if isinstance(z, mpmath.mpc):
            cols_re.append(z.real)
            cols_im.append(z.imag)
            if z.imag != 0:
                has_im = True
        else:
            cols_re.append(mpf(z))
            cols_im.append(mpf(0))
    columns = [cols_re]
    if has_im:
        columns.append(cols_im)
    return columns


def candidate_relation_lattice(columns, ctx, scale_bits=None):
    """LLL-reduce the identity ⊕ scaled-columns lattice; return small rows.

    columns: list of real-value lists, one list per simultaneous constraint;
    each value list has one entry per unknown.  Returns integer coefficient
    vectors (the identity part of reduced rows), shortest first.  Candidates
    only: exact or doubled-precision verification is the caller's job.
    """
    k = len(columns[0])
    if any(len(c) != k for c in columns):
        raise ValueError("ragged value columns")
    if scale_bits is None:
        scale_bits = ctx.prec_bits // 2
    scale = mpf(2) ** scale_bits
    norm = max([abs(v) for col in columns for v in col] + [mpf(1)])
    rows = []
    for i in range(k):
        row = [0] * k
        row[i] = 1
        for col in columns:
            row.append(int(mp.nint(scale * col[i] / norm)))
        rows.append(row)
    reduced = lll_reduce(rows)
    out = []
    for row in reduced:
        coeffs = tuple(row[:k])
        if not any(coeffs):
            continue
        tail = row[k:]
        out.append((sum(t * t for t in tail), sum(c * c for c in coeffs), coeffs))
    out.sort()
    return [c for _, _, c in out]


def _canonical_sign(coeffs):
    for c in coeffs:
        if c:
            return coeffs if c > 0 else tuple(-x for x in coeffs)
    return coeffs


def find_integer_relation(xs, height_bound=10**6, ctx=DEFAULT_CONTEXT):
    """Find m with |sum m_i x_i| <= 2^(-prec/2) max|x_i|, max|m_i| <= height_bound.

    Complex values are treated as simultaneous relations on (re, im).
    Returns a Relation or None; None means only that no relation was
    detectable at these bounds, never a nonexistence proof.  Ties among
    minimal-height candidates go to the lexicographically smallest
    coefficient vector with positive leading entry.
    """
    if len(xs) < 2:
        raise ValueError("need at least two values")
    _require_meaningful(len(xs), height_bound, ctx)
    with ctx.workprec():
        values = [mpmath.mpmathify(x) for x in xs]
        columns = _as_real_columns(values)
        norm = max([abs(v) for v in values] + [mpf(1)])
        threshold = mpf(2) ** (-ctx.prec_bits // 2) * norm
        candidates = candidate_relation_lattice(columns, ctx)
        best = None
        for coeffs in candidates:
            height = max(abs(c) for c in coeffs)
            if height > height_bound:
                continue
            resid = abs(mpmath.fsum(c * v for c, v in zip(coeffs, values)))
            if resid > threshold:
                continue
            coeffs = _canonical_sign(coeffs)
            key = (height, coeffs)
            if best is None or key < best[0]:
                best = (key, coeffs, resid)
        if best is None:
            return None
        _, coeffs, resid = best
        return Relation(coefficients=coeffs, residual=ctx.round_out(resid),
                        height=max(abs(c) for c in coeffs))


def rational_recognize(x, max_denominator=10**4, ctx=DEFAULT_CONTEXT):
    """Continued-fraction rational recognition: p/q with q <= max_denominator
    and |x - p/q| <= 2^(-prec/2), or None.
    """
    with ctx.workprec():
        x = mpf(x) if not isinstance(x, Fraction) else x
        if abs(x) >= mpf(2) ** (ctx.prec_bits // 4):
            raise ValueError("|x| too large for reliable recognition")
        exact = mpf_to_fraction(x)
        cand = exact.limit_denominator(max_denominator)
        err = abs(x - mpf(cand.numerator) / cand.denominator)
        if err <= mpf(2) ** (-ctx.prec_bits // 2):
            return cand
    return None


@dataclass(frozen=True)
class RankReport:
    """Numerical rank with the evidence behind it."""

    rank: int
    threshold: object        # mpf cutoff on singular values
    kept_min: object         # smallest kept singular value (or None)
    discarded_max: object    # largest discarded singular value (or None)

    @property
    def gap(self):
        if self.kept_min is None or self.discarded_max in (None, 0):
            return None
        if self.discarded_max == 0:
            return None
        return self.kept_min / self.discarded_max


def qrank(rows, ctx=DEFAULT_CONTEXT):
    """Numerical Q-rank with singular-value threshold 2^(-prec/4) * ||m||.

    rows: list of lists of mpf-able reals.  Returns (rank, RankReport).
    """
    if not rows or not rows[0]:
        return 0, RankReport(0, mpf(0), None, None)
    with ctx.workprec():
        m = mpmath.matrix([[mpf(x) for x in row] for row in rows])
        sv = mpmath.svd_r(m, compute_uv=False)
        svals = sorted((abs(sv[i]) for i in range(sv.rows)), reverse=True)
        norm = svals[0] if svals else mpf(0)
        if norm == 0:
            return 0, RankReport(0, mpf(0), None, None)
        threshold = mpf(2) ** (-(ctx.prec_bits // 4)) * norm
        kept = [s for s in svals if s > threshold]
        discarded = [s for s in svals if s <= threshold]
        report = RankReport(
            rank=len(kept),
            threshold=ctx.round_out(threshold),
            kept_min=ctx.round_out(kept[-1]) if kept else None,
            discarded_max=ctx.round_out(discarded[0]) if discarded else None,
        )
        return len(kept), report
