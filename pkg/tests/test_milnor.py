"""Cyclotomic scan tests: basis counts, value oracles, relation search
behavior (including planted relations), and the dual evaluation routes."""

from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf

from blochlab.blochgroup import ZERO_EXACT, mu
from blochlab.milnor import (
    coprime_residues,
    cyclotomic_basis,
    d2_root_of_unity,
    milnor_scan,
)
from blochlab.precision import PrecisionContext
from blochlab.regulator import borel_matrix, predicted_ranks
from blochlab.relations import qrank

CTX = PrecisionContext(256)
TOL = mpf(2) ** -240


def test_basis_counts():
    for n, count in ((5, 2), (4, 1), (6, 1), (7, 3), (12, 2), (30, 4)):
        _, basis = cyclotomic_basis(n, CTX)
        assert len(basis) == count
        assert len(coprime_residues(n)) == count


def test_basis_elements_are_mu_kernel():
    embedded, basis = cyclotomic_basis(5, CTX)
    for beta in basis:
        _, verdict = mu(beta, CTX)
        assert verdict == ZERO_EXACT


def test_basis_embedding_is_first_root():
    embedded, _ = cyclotomic_basis(5, CTX)
    with mp.workprec(300):
        target = mp.exp(2 * mp.pi * mp.j / 5)
        assert abs(embedded.root_value(280) - target) < mpf(2) ** -240


def test_scan_n4_value_is_catalan():
    scan = milnor_scan(4, ctx=CTX)
    assert len(scan.values) == 1
    assert abs(scan.values[0][1] - mp.catalan) < TOL
    assert scan.consistent_with_independence
    assert scan.values[0][1] > CTX.tol  # nonzero beyond tolerance


def test_scan_n5_no_relation():
    scan = milnor_scan(5, height=10 ** 6, ctx=CTX)
    assert scan.relations_found == []
    assert scan.bounds["height"] == 10 ** 6
    assert scan.bounds["prec_bits"] == 256


def test_scan_n12_with_theorem_b_cross_check():
    scan = milnor_scan(12, height=10 ** 6, ctx=CTX)
    assert scan.consistent_with_independence
    # Q(zeta12) is CM: predicted plus rank 0, and the D2 matrix of the
    # cyclotomic basis has full rank 2
    embedded, basis = cyclotomic_basis(12, CTX)
    ranks = predicted_ranks(embedded, CTX)
    assert (ranks.predicted_minus, ranks.predicted_plus) == (2, 0)
    reg = borel_matrix(basis, embedded, CTX)
    rank, _ = qrank(reg.values, CTX)
    assert rank == 2


def test_planted_relation_detected_exactly():
    scan = milnor_scan(7, height=10 ** 6, ctx=CTX, planted_coefficient=7)
    assert scan.planted
    assert len(scan.relations_found) == 1
    coeffs = list(scan.relations_found[0].coefficients)
    k = len(coeffs)
    expected = [7] + [0] * (k - 2) + [-1]
    neg = [-c for c in expected]
    assert coeffs in (expected, neg)


def test_dual_routes_agree():
    scan = milnor_scan(9, ctx=CTX)
    assert scan.clausen_li2_delta < CTX.tol * 16
    for j in (1, 2, 4):
        with mp.workprec(300):
            z = mp.exp(2 * mp.pi * mp.j * j / 9)
        from blochlab.dilog import bloch_wigner_d2
        assert abs(d2_root_of_unity(9, j, CTX) - bloch_wigner_d2(z, CTX)) < TOL


def test_scan_report_shape():
    scan = milnor_scan(5, ctx=CTX)
    d = scan.to_dict()
    assert d["N"] == 5
    assert d["consistent_with_independence"] is True
    assert "not proof" in d["note"]
    assert len(d["values"]) == 2
