"""Command-line interface: field classification, manifold analysis,
cyclotomic scans, Theorem-B verification, dilogarithm evaluation, and
integer relation detection.

Every report is JSON (schema 1) with the working configuration stamped in;
identical inputs and configuration produce byte-identical output.  Exit
codes: 0 success, 1 input error, 2 precision failure, 3 internal assertion.
"""

import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import click
import mpmath
from mpmath import mp, mpf

from . import __version__
from .errors import BlochLabError, InternalAssertionError, PrecisionError
from .manifold import ManifoldRecord, analyze
from .milnor import milnor_scan
from .numberfield import (
    EmbeddedField,
    classify_embedding,
    commuting_pairs,
    conjugate_intersection,
    embeddings,
    is_conjugation_stable,
    make_field,
    real_subfield,
)
from .precision import PrecisionContext
from .regulator import predicted_ranks, theorem_b_samples, verify_theorem_b
from .relations import find_integer_relation, rational_recognize

SCHEMA = 1


@dataclass
class Config:
    prec_bits: int = 256
    relation_height: int = 10**6
    max_denominator: int = 10**4
    retry_doublings: int = 3
    output: str = "json"

    def __post_init__(self):
        if self.prec_bits < 64:
            raise click.BadParameter("prec must be >= 64")
        if min(self.relation_height, self.max_denominator, self.retry_doublings + 1) <= 0:
            raise click.BadParameter("bounds must be positive")

    @property
    def ctx(self):
        return PrecisionContext(self.prec_bits)

    def stamp(self):
        return {
            "schema": SCHEMA,
            "version": __version__,
            "prec_bits": self.prec_bits,
            "relation_height": self.relation_height,
            "max_denominator": self.max_denominator,
        }


def _emit(cfg, payload):
    payload = {**payload, "config": cfg.stamp()}
    if cfg.output == "json":
        click.echo(json.dumps(payload, sort_keys=True, indent=2, default=str))
    else:
        click.echo("# table mode is lossy; use --json for the full report")
        for k, v in sorted(payload.items()):
            if k == "config":
                continue
            click.echo(f"{k}\t{v}")


def _run(cfg, fn):
    try:
        payload = fn()
    except (click.ClickException, click.Abort):
        raise
    except InternalAssertionError as ex:
        click.echo(f"internal assertion: {ex}", err=True)
        sys.exit(3)
    except PrecisionError as ex:
        click.echo(f"precision failure: {ex}", err=True)
        sys.exit(2)
    except (BlochLabError, ValueError, OSError, json.JSONDecodeError) as ex:
        click.echo(f"input error: {ex}", err=True)
        sys.exit(1)
    _emit(cfg, payload)


def _config_options(fn):
    fn = click.option("--prec", "prec_bits", type=int,
                      default=lambda: int(os.environ.get("BLOCHLAB_PREC", 256)),
                      help="working precision in bits (env BLOCHLAB_PREC)")(fn)
    fn = click.option("--height", "relation_height", type=float, default=1e6,
                      help="integer relation height bound")(fn)
    fn = click.option("--maxden", "max_denominator", type=int, default=10**4,
                      help="rational recognition denominator bound")(fn)
    fn = click.option("--json/--table", "as_json", default=True,
                      help="output format (table is lossy)")(fn)
    return fn


def _cfg(prec_bits, relation_height, max_denominator, as_json):
    return Config(prec_bits=int(prec_bits), relation_height=int(relation_height),
                  max_denominator=max_denominator,
                  output="json" if as_json else "table")


@click.group()
@click.version_option(__version__)
def main():
    """Bloch groups of embedded number fields: exact mu-map, Borel regulator
    ranks, and volume / Chern-Simons rationality verdicts."""


@main.command("field")
@click.argument("minpoly")
@click.option("--root-index", type=int, default=None,
              help="canonical root index (default: first complex root if any)")
@_config_options
def cmd_field(minpoly, root_index, prec_bits, relation_height, max_denominator, as_json):
    """Classify an embedded field: signature, stability, r2', CM labels,
    subfield degrees, predicted eigenspace ranks."""
    cfg = _cfg(prec_bits, relation_height, max_denominator, as_json)

    def work():
        ctx = cfg.ctx
        f = make_field(minpoly)
        table = embeddings(f, ctx)
        idx = root_index
        if idx is None:
            idx = table.pairs[0][1] if table.pairs else 0
        e = EmbeddedField(f, idx)
        stable, g = is_conjugation_stable(e, ctx)
        payload = {
            "minpoly": minpoly,
            "degree": f.degree,
            "root_index": idx,
            "root": mpmath.nstr(e.root_value(64), 24),
            "r1": table.r1,
            "r2": table.r2,
            "stable": stable,
            "conjugation_automorphism": str(g) if g is not None else None,
            "classification": classify_embedding(e, ctx),
        }
        if stable and not e.is_real_embedding:
            payload["r2_prime"] = commuting_pairs(e, ctx)
        rs = real_subfield(e, ctx)
        payload["real_subfield"] = {"degree": rs.degree,
                                    "totally_real": rs.totally_real}
        ci = conjugate_intersection(e, ctx)
        payload["conjugate_intersection"] = {"degree": ci.degree,
                                             "is_real": ci.is_real}
        try:
            ranks = predicted_ranks(e, ctx)
            payload["predicted_ranks"] = {"minus": ranks.predicted_minus,
                                          "plus": ranks.predicted_plus}
        except BlochLabError as ex:
            payload["predicted_ranks"] = {"error": "TOTALLY_REAL", "detail": str(ex)}
        return payload

    _run(cfg, work)


@main.command("manifold")
@click.argument("record", type=click.Path(exists=True))
@_config_options
def cmd_manifold(record, prec_bits, relation_height, max_denominator, as_json):
    """Validate and analyze a manifold shape record (JSON file)."""
    cfg = _cfg(prec_bits, relation_height, max_denominator, as_json)

    def work():
        ctx = cfg.ctx
        rec = ManifoldRecord.from_json(record, ctx)
        report = analyze(rec, ctx)
        return report.to_dict()

    _run(cfg, work)


@main.group("milnor")
def milnor_group():
    """Cyclotomic dilogarithm scans."""


@milnor_group.command("scan")
@click.option("--N", "n", type=int, required=True)
@_config_options
def cmd_milnor_scan(n, prec_bits, relation_height, max_denominator, as_json):
    """Scan D2 at primitive N-th roots of unity for rational relations."""
    cfg = _cfg(prec_bits, relation_height, max_denominator, as_json)

    def work():
        scan = milnor_scan(n, height=cfg.relation_height, ctx=cfg.ctx)
        payload = scan.to_dict()
        payload["verdict"] = (
            "consistent with independence at the stated bounds"
            if scan.consistent_with_independence
            else "RELATIONS FOUND (see relations_found)")
        return payload

    _run(cfg, work)


@main.command("theoremb")
@click.argument("minpoly")
@click.option("--root-index", type=int, default=None)
@_config_options
def cmd_theoremb(minpoly, root_index, prec_bits, relation_height, max_denominator,
                 as_json):
    """Verify the eigenspace rank formulas on auto-generated mu-kernel samples."""
    cfg = _cfg(prec_bits, relation_height, max_denominator, as_json)

    def work():
        ctx = cfg.ctx
        f = make_field(minpoly)
        table = embeddings(f, ctx)
        idx = root_index
        if idx is None:
            if not table.pairs:
                raise BlochLabError("totally real field: no complex embedding")
            idx = table.pairs[0][1]
        e = EmbeddedField(f, idx)
        samples = theorem_b_samples(e, ctx)
        rep = verify_theorem_b(e, samples, ctx)
        return {
            "minpoly": minpoly,
            "root_index": idx,
            "n_samples": len(samples),
            "sample_sources": "torsion classes + five-term instances",
            "predicted": {"minus": rep.predicted_minus, "plus": rep.predicted_plus},
            "observed": {"minus": rep.observed_minus, "plus": rep.observed_plus},
            "consistent": rep.consistent,
            "zero_block_diagnostic": rep.zero_block_ok,
        }

    _run(cfg, work)


@main.command("dilog")
@click.argument("z")
@_config_options
def cmd_dilog(z, prec_bits, relation_height, max_denominator, as_json):
    """Evaluate D2 (and Li2 off the cut) at a complex point like '0.5+0.25i'."""
    cfg = _cfg(prec_bits, relation_height, max_denominator, as_json)

    def work():
        from .dilog import bloch_wigner_d2, li2
        from .errors import BranchCutError
        ctx = cfg.ctx
        with ctx.workprec():
            val = mpmath.mpmathify(z.replace("i", "j"))
        digits = int(cfg.prec_bits * 0.301)

        def fmt(v):
            if isinstance(v, mpmath.mpc) and v.imag == 0:
                v = v.real
            return mpmath.nstr(v, digits)

        payload = {"z": z, "d2": fmt(bloch_wigner_d2(val, ctx))}
        try:
            payload["li2"] = fmt(li2(val, ctx))
        except BranchCutError:
            payload["li2"] = "BRANCH_CUT [1, oo)"
        return payload

    _run(cfg, work)


@main.command("relations")
@click.argument("values", nargs=-1, required=True)
@_config_options
def cmd_relations(values, prec_bits, relation_height, max_denominator, as_json):
    """Find an integer relation among decimal values, or recognize one
    value as a rational (single argument)."""
    cfg = _cfg(prec_bits, relation_height, max_denominator, as_json)

    def work():
        ctx = cfg.ctx
        with ctx.workprec():
            xs = [mpmath.mpmathify(v.replace("i", "j")) for v in values]
        if len(xs) == 1:
            q = rational_recognize(xs[0], cfg.max_denominator, ctx)
            return {"value": values[0],
                    "rational": str(q) if q is not None else None,
                    "verdict": (f"RATIONAL({q})" if q is not None else
                                f"NO_RELATION_FOUND(maxden={cfg.max_denominator}, "
                                f"prec={cfg.prec_bits})")}
        rel = find_integer_relation(xs, height_bound=cfg.relation_height, ctx=ctx)
        if rel is None:
            return {"values": list(values), "relation": None,
                    "verdict": f"none found (height={cfg.relation_height}, "
                               f"prec={cfg.prec_bits}); not a nonexistence proof"}
        return {"values": list(values),
                "relation": list(rel.coefficients),
                "residual": mpmath.nstr(rel.residual, 6),
                "height": rel.height}

    _run(cfg, work)


if __name__ == "__main__":
    main()
