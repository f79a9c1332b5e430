"""Arbitrary-precision dilogarithm, Bloch-Wigner function, and the
scalar ingredients of the rho-map.

Branch conventions (fixed for the whole library): principal logarithm
with arg in (-pi, pi], dilogarithm cut on [1, oo).

Evaluation scheme for li2:
  |z| <= 1/2                       power series  sum z^n / n^2
  |z| >  1.5                       inversion     li2(z) = -li2(1/z) - pi^2/6 - log(-z)^2/2
  Re z > 1/2  (and |z| <= 1.5)     reflection    li2(z) = pi^2/6 - log(z) log(1-z) - li2(1-z)
  otherwise                        Debye series  li2(z) = sum B_n u^(n+1) / (n+1)!,  u = -log(1-z)

The Debye region has |u| < 1.8 < 2 pi, so the Bernoulli series converges
geometrically with ratio < (1.8 / 2 pi)^2 per pair of terms.
"""

from fractions import Fraction

import sympy
from mpmath import mp, mpc, mpf

from .errors import BranchCutError, DegenerateArgumentError, PrecisionOverflowError
from .precision import DEFAULT_CONTEXT, fraction_to_mpf

_REAL_TYPES = (int, float, Fraction, mpf)

# Exponent cap: inputs with |log2|z|| beyond this would force internal
# precision past the context cap.
_MAX_EXPONENT_FACTOR = 32


def _to_mpc(z):
    if isinstance(z, _REAL_TYPES):
        if isinstance(z, Fraction):
            return mpc(fraction_to_mpf(z))
        return mpc(z)
    return mpc(z)


def _check_magnitude(z, ctx):
    if z == 0:
        return
    m = max(abs(mp.mag(z.real)) if z.real else 0, abs(mp.mag(z.imag)) if z.imag else 0)
    if m > _MAX_EXPONENT_FACTOR * ctx.prec_bits:
        raise PrecisionOverflowError(
            f"|z| exponent {m} exceeds the supported range at {ctx.prec_bits} bits"
        )


_bernoulli_cache = [Fraction(1), Fraction(-1, 2)]  # B1 = -1/2 convention


def _bernoulli(n):
    """Bernoulli number B_n with B_1 = -1/2 (u/(e^u - 1) generating function)."""
    while len(_bernoulli_cache) <= n:
        k = len(_bernoulli_cache)
        _bernoulli_cache.append(Fraction(sympy.bernoulli(k)) if k % 2 == 0 else Fraction(0))
    return _bernoulli_cache[n]


def _li2_series(z):
    """sum z^n / n^2 for |z| <= 1/2; geometric, ~1 bit per term."""
    total = mpc(0)
    term = mpc(1)
    eps = mpf(2) ** (-mp.prec - 8)
    n = 1
    while True:
        term *= z
        add = term / (n * n)
        total += add
        if abs(add) < eps:
            break
        n += 1
    return total


def _li2_debye(z):
    """Bernoulli series in u = -log(1-z); valid for |u| < 2 pi."""
    u = -mp.log(1 - z)
    total = mpc(0)
    # partial powers: u^(n+1)/(n+1)! built incrementally
    upow = u  # u^(n+1) / (n+1)!  at n = 0
    eps = mpf(2) ** (-mp.prec - 8)
    n = 0
    while True:
        b = _bernoulli(n)
        if b:
            add = upow * fraction_to_mpf(b)
            total += add
            if n > 2 and abs(add) < eps:
                break
        n += 1
        upow = upow * u / (n + 1)
        if n > 4 * mp.prec:  # unreachable for |u| < 2 pi; guard against stall
            raise PrecisionOverflowError("Debye series failed to converge")
    return total


def _li2_raw(z):
    """Principal-branch Li2 at the current mp precision; z not on [1, oo)."""
    if z == 0:
        return mpc(0)
    az = abs(z)
    if az <= mpf(1) / 2:
        return _li2_series(z)
    if az > mpf(3) / 2:
        # Li2(z) + Li2(1/z) = -pi^2/6 - log(-z)^2/2   (z off [0, 1])
        lg = mp.log(-z)
        return -_li2_raw(1 / z) - mp.pi**2 / 6 - lg * lg / 2
    if z.real > mpf(1) / 2:
        # reflection: Li2(z) + Li2(1-z) = pi^2/6 - log(z) log(1-z)
        return mp.pi**2 / 6 - mp.log(z) * mp.log(1 - z) - _li2_raw(1 - z)
    return _li2_debye(z)


def li2(z, ctx=DEFAULT_CONTEXT):
    """Principal-branch dilogarithm, absolute error <= 2^(1-prec) max(1, |result|).

    Raises BranchCutError for real z >= 1 (the cut, including z = 1).
    """
    z = _to_mpc(z)
    if not (mp.isfinite(z.real) and mp.isfinite(z.imag)):
        raise ValueError("li2 requires a finite argument")
    if z.imag == 0 and z.real >= 1:
        raise BranchCutError(f"li2 on the cut [1, oo): z = {z.real}")
    with ctx.workprec():
        _check_magnitude(z, ctx)
        val = _li2_raw(z)
    return ctx.round_out(val)


def bloch_wigner_d2(z, ctx=DEFAULT_CONTEXT):
    """Bloch-Wigner function D2(z) = Im Li2(z) + log|z| arg(1 - z).

    Exactly 0 for real arguments (by definition, not by cancellation).
    Raises DegenerateArgumentError for z in {0, 1}.
    """
    z = _to_mpc(z)
    if z == 0 or z == 1:
        raise DegenerateArgumentError(f"D2 undefined at z = {z}")
    if z.imag == 0:
        return mpf(0)
    with ctx.workprec():
        _check_magnitude(z, ctx)
        val = _li2_raw(z).imag + mp.log(abs(z)) * mp.arg(1 - z)
    return ctx.round_out(val)


def clausen_cl2(theta, ctx=DEFAULT_CONTEXT):
    """Clausen function Cl2(theta) = Im Li2(e^(i theta)) = sum sin(n theta)/n^2.

    Evaluated by the accelerated expansion
        Cl2(t) = t - t log t + sum |B_2k| t^(2k+1) / (2k (2k+1)!),  0 < t <= pi,
    extended by oddness and 2-pi periodicity.  This is the independent
    route to D2 at roots of unity used by the cyclotomic scans.
    """
    with ctx.workprec():
        theta = mpf(theta) if not isinstance(theta, Fraction) else fraction_to_mpf(theta)
        twopi = 2 * mp.pi
        t = mp.fmod(theta, twopi)
        if t <= -mp.pi:
            t += twopi
        elif t > mp.pi:
            t -= twopi
        sign = 1
        if t < 0:
            sign, t = -1, -t
        if t == 0:
            return mpf(0)
        total = t - t * mp.log(t)
        tsq = t * t
        upow = t * tsq / 6  # t^(2k+1) / (2k+1)!  at k = 1
        eps = mpf(2) ** (-mp.prec - 8)
        k = 1
        while True:
            add = upow * fraction_to_mpf(abs(_bernoulli(2 * k))) / (2 * k)
            total += add
            if abs(add) < eps:
                break
            k += 1
            upow = upow * tsq / ((2 * k) * (2 * k + 1))
        val = sign * total
    return ctx.round_out(val)


def rho_scalar(z, ctx=DEFAULT_CONTEXT):
    """The three scalar ingredients of rho(z) at principal branches.

    Returns (log z, log(1-z), c) with
        c = (Li2(1-z) - Li2(z) - pi^2/6) / (2 pi i).
    The wedge assembly into a class happens in the regulator module.
    """
    z = _to_mpc(z)
    if z == 0 or z == 1:
        raise DegenerateArgumentError(f"rho undefined at z = {z}")
    with ctx.workprec():
        _check_magnitude(z, ctx)
        log_z = mp.log(z)
        log_1mz = mp.log(1 - z)
        # Li2 on the cut: z real > 1 makes 1-z real < 0 (fine); z real < 0
        # makes 1-z real > 1 (on the cut).  Both dilogarithms are needed, so
        # real z outside (0, 1) goes through the limit from above (Im -> 0+),
        # consistent with arg in (-pi, pi].
        li2_z = _li2_cut_aware(z)
        li2_1mz = _li2_cut_aware(1 - z)
        c = (li2_1mz - li2_z - mp.pi**2 / 6) / (2 * mp.pi * mp.j)
    return ctx.round_out(log_z), ctx.round_out(log_1mz), ctx.round_out(c)


def _li2_cut_aware(z):
    """Li2 with the boundary value from above on the cut (arg log(1-z) = -pi... )."""
    if z.imag == 0 and z.real >= 1:
        if z.real == 1:
            return mp.pi**2 / 6
        # boundary value lim_{eps -> 0+} Li2(x + i eps):
        # Im Li2(x + i0) = +pi log x for x > 1
        x = z.real
        val = _li2_raw(mpc(1) / x)
        lg = mp.log(x)  # log(-(x+i0)) = log x - i pi
        return -val - mp.pi**2 / 6 - (lg - mp.j * mp.pi) ** 2 / 2
    return _li2_raw(z)


def pi_const(ctx=DEFAULT_CONTEXT):
    """pi at context precision (exposed for tests)."""
    with ctx.workprec():
        val = +mp.pi
    return ctx.round_out(val)


def catalan_const(ctx=DEFAULT_CONTEXT):
    """Catalan's constant at context precision (exposed for tests)."""
    with ctx.workprec():
        val = +mp.catalan
    return ctx.round_out(val)
