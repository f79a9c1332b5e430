"""Dilogarithm / Bloch-Wigner tests.

Expected values come from independent oracles: the defining power series
summed with acceleration (mpmath.nsum), closed forms in pi and log 2,
Hurwitz zeta combinations for Clausen values, and mpmath's own polylog as
a cross-implementation check.
"""

import random

import mpmath
import pytest
from mpmath import mp, mpc, mpf

from blochlab.dilog import (
    bloch_wigner_d2,
    catalan_const,
    clausen_cl2,
    li2,
    pi_const,
    rho_scalar,
)
from blochlab.errors import BranchCutError, DegenerateArgumentError
from blochlab.precision import PrecisionContext

CTX = PrecisionContext(256)
TOL = mpf(2) ** -250


def test_li2_zero_is_zero():
    assert li2(0, CTX) == 0


def test_li2_half_closed_form():
    # pi^2/12 - log(2)^2/2, evaluated independently at higher precision
    with mp.workprec(320):
        expected = mp.pi ** 2 / 12 - mp.log(2) ** 2 / 2
    assert abs(li2(mpf(1) / 2, CTX) - expected) < TOL


def test_li2_approaches_pi2_over_6_below_one():
    with mp.workprec(320):
        expected = mp.pi ** 2 / 6
        eps = mpf(2) ** -80
        val = li2(1 - eps, CTX)
        # Li2(1 - eps) = pi^2/6 + eps log eps + O(eps)
        assert abs(val - expected) < eps * 90


def test_li2_imag_at_i_is_catalan_alternating_series_oracle():
    # oracle: sum (-1)^k / (2k+1)^2 via alternating-series acceleration
    with mp.workprec(300):
        oracle = mpmath.nsum(lambda k: (-1) ** k / (2 * k + 1) ** 2,
                             [0, mpmath.inf], method="a")
    val = li2(mpc(0, 1), CTX)
    assert abs(val.imag - oracle) < TOL
    assert abs(catalan_const(CTX) - oracle) < TOL


def test_li2_matches_mpmath_polylog_on_random_points():
    rng = random.Random(42)
    with mp.workprec(300):
        for _ in range(60):
            z = mpc(rng.uniform(-4, 4), rng.uniform(-4, 4))
            if abs(z.imag) < 1e-3:
                z = mpc(z.real, 0.7)
            ref = mpmath.polylog(2, z)
            assert abs(li2(z, CTX) - ref) < TOL


def test_li2_branch_cut_errors():
    with pytest.raises(BranchCutError):
        li2(1, CTX)
    with pytest.raises(BranchCutError):
        li2(mpf(2), CTX)
    with pytest.raises(BranchCutError):
        li2(mpf("1e10"), CTX)


def test_d2_real_arguments_exactly_zero():
    for x in (mpf(1) / 2, mpf(-3), mpf("0.9999"), 7):
        assert bloch_wigner_d2(x, CTX) == 0


def test_d2_degenerate_arguments():
    for z in (0, 1):
        with pytest.raises(DegenerateArgumentError):
            bloch_wigner_d2(z, CTX)


def test_d2_at_i_is_catalan():
    assert abs(bloch_wigner_d2(mpc(0, 1), CTX) - mp.catalan) < TOL


def test_d2_at_sixth_root_reference_digits():
    # Clausen closed form via Hurwitz zeta:
    # Cl2(pi/3) = (sqrt3/72) [z(2,1/6) + z(2,1/3) - z(2,2/3) - z(2,5/6)]
    with mp.workprec(320):
        oracle = mp.sqrt(3) / 72 * (mp.zeta(2, mpf(1) / 6) + mp.zeta(2, mpf(1) / 3)
                                    - mp.zeta(2, mpf(2) / 3) - mp.zeta(2, mpf(5) / 6))
        z = mp.exp(mp.j * mp.pi / 3)
    val = bloch_wigner_d2(z, CTX)
    assert abs(val - oracle) < TOL
    assert mpmath.nstr(val, 17).startswith("1.014941606409653")


def test_d2_conjugation_antisymmetry():
    rng = random.Random(3)
    with mp.workprec(300):
        for _ in range(50):
            z = mpc(rng.uniform(-3, 3), rng.uniform(0.05, 3))
            assert abs(bloch_wigner_d2(z, CTX) + bloch_wigner_d2(mp.conj(z), CTX)) < TOL


def test_d2_threefold_cross_ratio_symmetry():
    rng = random.Random(5)
    with mp.workprec(300):
        for _ in range(200):
            z = mpc(rng.uniform(-3, 3), rng.uniform(0.05, 3))
            d = bloch_wigner_d2(z, CTX)
            assert abs(d - bloch_wigner_d2(1 - 1 / z, CTX)) < TOL
            assert abs(d - bloch_wigner_d2(1 / (1 - z), CTX)) < TOL


def test_d2_five_term_functional_equation():
    rng = random.Random(7)
    with mp.workprec(300):
        for _ in range(100):
            x = mpc(rng.uniform(-2, 2), rng.uniform(0.05, 2))
            y = mpc(rng.uniform(-2, 2), rng.uniform(0.05, 2))
            val = (bloch_wigner_d2(x, CTX) - bloch_wigner_d2(y, CTX)
                   + bloch_wigner_d2(y / x, CTX)
                   - bloch_wigner_d2((1 - 1 / x) / (1 - 1 / y), CTX)
                   + bloch_wigner_d2((1 - x) / (1 - y), CTX))
            assert abs(val) < TOL * 8


def test_precision_doubling_contract():
    pts = [mpc("0.3", "0.7"), mpc("-2.25", "0.125"), mpc("0.875", "-1.5")]
    for z in pts:
        lo = bloch_wigner_d2(z, PrecisionContext(128))
        hi = bloch_wigner_d2(z, PrecisionContext(256))
        assert abs(lo - hi) <= mpf(2) ** (1 - 128) * max(1, abs(hi))
        lo = li2(z, PrecisionContext(128))
        hi = li2(z, PrecisionContext(256))
        assert abs(lo - hi) <= mpf(2) ** (1 - 128) * max(1, abs(hi))


def test_clausen_equals_d2_on_unit_circle():
    for n, j in ((3, 1), (5, 1), (5, 2), (7, 3), (12, 5)):
        with mp.workprec(300):
            theta = 2 * mp.pi * j / n
            z = mp.exp(mp.j * theta)
        assert abs(clausen_cl2(theta, CTX) - bloch_wigner_d2(z, CTX)) < TOL


def test_clausen_oddness_and_period():
    with mp.workprec(300):
        th = mpf(1) / 3
        assert abs(clausen_cl2(th, CTX) + clausen_cl2(-th, CTX)) < TOL
        assert abs(clausen_cl2(th, CTX) - clausen_cl2(th + 2 * mp.pi, CTX)) < TOL * 16
        assert clausen_cl2(mp.pi, CTX) < TOL  # Cl2(pi) = 0


def test_rho_scalar_ingredients():
    lz, l1z, c = rho_scalar(mpf(-1), CTX)
    with mp.workprec(300):
        assert abs(lz - mp.pi * mp.j) < TOL
        assert abs(l1z - mp.log(2)) < TOL
    # real z in (0,1): the dilogarithm combination (2 pi i) c is real
    for x in (mpf(1) / 3, mpf("0.71")):
        _, _, c = rho_scalar(x, CTX)
        with mp.workprec(300):
            num = 2 * mp.pi * mp.j * c
        assert abs(num.imag) < TOL


def test_rho_scalar_d2_reconstruction_identity():
    # D2(z) = -1/2 Im(2 pi i c(z)) + 1/2 Im(conj(log z) log(1-z))
    rng = random.Random(11)
    with mp.workprec(300):
        for _ in range(20):
            z = mpc(rng.uniform(-3, 3), rng.uniform(0.05, 3))
            lz, l1z, c = rho_scalar(z, CTX)
            rhs = -mpf(1) / 2 * (2 * mp.pi * mp.j * c).imag \
                + mpf(1) / 2 * (mp.conj(lz) * l1z).imag
            assert abs(bloch_wigner_d2(z, CTX) - rhs) < TOL


def test_rho_scalar_deterministic():
    with mp.workprec(300):
        z = mp.exp(mp.j * mp.pi / 3)
    a = rho_scalar(z, CTX)
    b = rho_scalar(z, CTX)
    assert all(x == y for x, y in zip(a, b))


def test_constants_exposed():
    with mp.workprec(300):
        assert abs(pi_const(CTX) - mp.pi) < TOL
