"""Ingestion, validation and analysis of ideal-triangulation shape data
over an invariant trace field.

A record carries the field (min poly + selected root), exact shapes (one
cross-ratio parameter per ideal tetrahedron), and optional metadata.  The
gluing constraint sum z_i ^ (1 - z_i) = 0 is checked exactly through the
mu-map; volume, the Chern-Simons class, the embedding classification and
the rationality verdict come out of the regulator pipeline.
"""

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from importlib import resources

from mpmath import mp, mpc, mpf

from . import dilog
from .blochgroup import ZERO_EXACT, FormalSum, mu
from .errors import (
    CoincidentPointsError,
    DegenerateShapeError,
    NotValidatedError,
    ThurstonViolationError,
)
from .numberfield import (
    EmbeddedField,
    NumberField,
    classify_embedding,
    conjugate_intersection,
    element_is_real,
    make_field,
)
from .precision import DEFAULT_CONTEXT
from .regulator import CsClass, rho_class
from .relations import candidate_relation_lattice

INFINITY = object()  # point at infinity on the projective line

FIXTURES = ("fig8", "fig8_double", "cubic", "galois_closure")


def fixture_path(name):
    """Filesystem path of a shipped fixture record (name without .json)."""
    return str(resources.files("blochlab").joinpath(f"data/{name}.json"))


def load_fixture(name, ctx=DEFAULT_CONTEXT):
    return ManifoldRecord.from_json(fixture_path(name), ctx)

RATIONAL_BY_THEOREM_A = "RATIONAL_BY_THEOREM_A"
CONJECTURED_IRRATIONAL = "CONJECTURED_IRRATIONAL"
UNKNOWN = "UNKNOWN"


def cross_ratio(a0, a1, a2, a3):
    """Cross ratio (a2-a1)(a3-a0) / ((a2-a0)(a3-a1)) on P^1(F), infinity allowed.

    Points are FieldElements of one field, or INFINITY.  Even vertex
    permutations map z to {z, 1-1/z, 1/(1-z)}.  Raises
    CoincidentPointsError when any two points coincide.
    """
    pts = [a0, a1, a2, a3]
    parent = next((p.parent for p in pts if p is not INFINITY), None)
    if parent is None:
        raise CoincidentPointsError("all four points at infinity")
    proj = []
    for p in pts:
        if p is INFINITY:
            proj.append((parent.one(), parent.zero()))
        else:
            proj.append((p, parent.one()))
    for i in range(4):
        for j in range(i + 1, 4):
            if _det(proj[i], proj[j]).is_zero():
                raise CoincidentPointsError(f"points {i} and {j} coincide")
    num = _det(proj[2], proj[1]) * _det(proj[3], proj[0])
    den = _det(proj[2], proj[0]) * _det(proj[3], proj[1])
    z = num / den
    if z.is_zero() or z.is_one():
        raise CoincidentPointsError("degenerate cross ratio")
    return z


def _det(p, q):
    return p[0] * q[1] - p[1] * q[0]


def _fraction_to_str(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fraction_from_json(v):
    if isinstance(v, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise ValueError(f"not a bit-exact rational: {v!r}")


@dataclass
class ValidationReport:
    valid: bool
    thurston_verdict: str
    mixed_orientation: bool
    degenerate: list
    bounds: dict
    messages: list = dc_field(default_factory=list)


class ManifoldRecord:
    """Shape-list presentation of a hyperbolic 3-manifold over its
    invariant trace field (supplied, never computed here)."""

    def __init__(self, name, embedded, shapes, meta=None):
        self.name = name
        self.embedded = embedded
        self.shapes = list(shapes)
        self.meta = dict(meta or {})
        self.validation = None
        for z in self.shapes:
            if z.is_zero() or z.is_one():
                raise DegenerateShapeError(f"shape {z} in {{0, 1}}")

    @property
    def field(self):
        return self.embedded.field

    @classmethod
    def from_dict(cls, d, ctx=DEFAULT_CONTEXT):
        field = make_field([_fraction_from_json(c) for c in d["minpoly"]])
        embedded = EmbeddedField(field, int(d["root_index"]))
        if d.get("shapes"):
            shapes = [field.element([_fraction_from_json(c) for c in coords])
                      for coords in d["shapes"]]
        elif d.get("numeric_shapes"):
            shapes = [_match_numeric_shape(embedded, re_im, ctx)
                      for re_im in d["numeric_shapes"]]
        else:
            raise ValueError("record carries neither shapes nor numeric_shapes")
        return cls(d["name"], embedded, shapes, d.get("meta"))

    @classmethod
    def from_json(cls, text_or_path, ctx=DEFAULT_CONTEXT):
        if isinstance(text_or_path, str) and text_or_path.lstrip().startswith("{"):
            return cls.from_dict(json.loads(text_or_path), ctx)
        with open(text_or_path) as fh:
            return cls.from_dict(json.load(fh), ctx)

    def to_dict(self):
        return {
            "name": self.name,
            "minpoly": [_fraction_to_str(c) for c in self.field.min_poly],
            "root_index": self.embedded.root_index,
            "shapes": [[_fraction_to_str(c) for c in z.coords] for z in self.shapes],
            "meta": self.meta,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _match_numeric_shape(embedded, re_im, ctx, tol_bits=36, max_height=10**6):
    """Match a floating shape to an exact field element: relation detection
    against root powers, then a certified proximity check."""
    target = mpc(mpf(re_im[0]), mpf(re_im[1]))
    f = embedded.field
    n = f.degree
    with ctx.workprec():
        root = embedded.root_value(ctx.prec_bits)
        values = [target] + [root ** i for i in range(n)]
        cols_re = [v.real for v in values]
        cols_im = [v.imag for v in values]
        candidates = candidate_relation_lattice([cols_re, cols_im], ctx,
                                                scale_bits=44)
    for vec in candidates:
        if vec[0] == 0 or max(abs(v) for v in vec) > max_height:
            continue
        coords = [Fraction(-c, vec[0]) for c in vec[1:]]
        z = f.element(coords)
        (vre, vim), err = embedded.sigma_certified(z, ctx.prec_bits)
        with ctx.workprec():
            dist = abs(mpc(mpf(vre.numerator) / vre.denominator,
                           mpf(vim.numerator) / vim.denominator) - target)
            if dist <= mpf(2) ** (-tol_bits):
                return z
    raise DegenerateShapeError(
        f"numeric shape {re_im} matches no field element at 2^-{tol_bits}")


def validate(record, ctx=DEFAULT_CONTEXT):
    """Exact gluing-relation check plus nondegeneracy certification.

    Raises DegenerateShapeError for real (flat) shapes and
    ThurstonViolationError (with the offending wedge coordinates) when
    mu of the shape sum is not exactly zero.  Mixed orientations (both
    signs of Im) are allowed and flagged informationally.
    """
    e = record.embedded
    degenerate = []
    signs = set()
    for z in record.shapes:
        if element_is_real(e, z, ctx):
            degenerate.append(z)
            continue
        (_, vim), err = e.sigma_certified(z, ctx.prec_bits)
        signs.add(1 if vim > 0 else -1)
    if degenerate:
        record.validation = None
        raise DegenerateShapeError(
            f"real (flat) shapes at the chosen embedding: {degenerate}")
    beta = FormalSum(e, [(z, 1) for z in record.shapes])
    w, verdict = mu(beta, ctx)
    if verdict != ZERO_EXACT:
        record.validation = None
        raise ThurstonViolationError(w.nonzero_entries())
    report = ValidationReport(
        valid=True,
        thurston_verdict=verdict,
        mixed_orientation=(len(signs) > 1),
        degenerate=[],
        bounds=dict(w.basis.provenance),
    )
    if report.mixed_orientation:
        report.messages.append("shapes carry both orientations (informational)")
    record.validation = report
    return report


def bloch_invariant(record):
    """beta(M) = sum [z_i] as a formal sum over the invariant trace field."""
    if record.validation is None or not record.validation.valid:
        raise NotValidatedError("validate() must pass before taking the invariant")
    return FormalSum(record.embedded, [(z, 1) for z in record.shapes])


@dataclass
class AnalysisReport:
    name: str
    volume: object
    cs: CsClass
    classification: str
    conjugate_intersection_degree: int
    conjugate_intersection_real: bool
    verdict: str
    validation: ValidationReport
    provenance: dict

    def to_dict(self):
        return {
            "name": self.name,
            "volume": mp.nstr(self.volume, 40),
            "cs_over_pi2": mp.nstr(self.cs.cs_over_pi2, 40),
            "cs_rationality": str(self.cs.rationality),
            "cs_class_mod_q": _fraction_to_str(self.cs.class_representative),
            "classification": self.classification,
            "conjugate_intersection": {
                "degree": self.conjugate_intersection_degree,
                "is_real": self.conjugate_intersection_real,
            },
            "verdict": self.verdict,
            "mixed_orientation": self.validation.mixed_orientation,
            "provenance": {k: str(v) for k, v in self.provenance.items()},
        }


def analyze(record, ctx=DEFAULT_CONTEXT):
    """Full pipeline: validate, volume, Chern-Simons class, classification,
    and the rationality verdict.

    Verdict logic: CM-embedded trace field -> RATIONAL_BY_THEOREM_A;
    F cap conj(F) real (odd degree included) -> CONJECTURED_IRRATIONAL;
    otherwise UNKNOWN.  The numerical cs rationality report is attached
    in every case.
    """
    if record.validation is None:
        validate(record, ctx)
    beta = bloch_invariant(record)
    e = record.embedded
    cs = rho_class(beta, e, ctx)
    classification = classify_embedding(e, ctx)
    n = e.field.degree
    if n % 2 == 1 and not e.is_real_embedding:
        ci_degree, ci_real = None, True   # odd-degree shortcut: F' is real
        ci_note = "odd degree"
    else:
        ci = conjugate_intersection(e, ctx)
        ci_degree, ci_real = ci.degree, ci.is_real
        ci_note = "computed"
    if classification in ("cm_field", "cm_embedding"):
        verdict = RATIONAL_BY_THEOREM_A
    elif ci_real:
        verdict = CONJECTURED_IRRATIONAL
    else:
        verdict = UNKNOWN
    return AnalysisReport(
        name=record.name,
        volume=cs.volume,
        cs=cs,
        classification=classification,
        conjugate_intersection_degree=ci_degree if ci_degree is not None else 1,
        conjugate_intersection_real=ci_real,
        verdict=verdict,
        validation=record.validation,
        provenance={"prec_bits": ctx.prec_bits,
                    "conjugate_intersection": ci_note,
                    **cs.provenance},
    )
