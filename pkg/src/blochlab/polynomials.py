"""Exact univariate polynomial arithmetic over Q, plus the certified
root machinery the field layer is built on: Sturm sequences, isolation
disks with rigorous radii, and Mahler separation bounds.

Polynomials are tuples of Fractions, low degree first, trimmed; () is the
zero polynomial.  sympy is used for factorization, resultants and
discriminants; everything else is done here.
"""

import math
from fractions import Fraction

import mpmath
import sympy
from mpmath import mp, mpc, mpf

from .errors import InternalAssertionError

_X = sympy.Symbol("x")
_Y = sympy.Symbol("y")


# --- basic arithmetic ---------------------------------------------------------

def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly(coeffs):
    return trim(Fraction(c) for c in coeffs)


def degree(p):
    return len(p) - 1


def add(p, q):
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                for i in range(n))


def neg(p):
    return tuple(-c for c in p)


def sub(p, q):
    return add(p, neg(q))


def mul(p, q):
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def scale(p, c):
    c = Fraction(c)
    if not c:
        return ()
    return tuple(x * c for x in p)


def divmod_poly(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    d = len(q) - 1
    lead = q[-1]
    quot = [Fraction(0)] * max(len(p) - d, 0)
    while len(r) - 1 >= d and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < d:
            break
        s = r[-1] / lead
        k = len(r) - 1 - d
        quot[k] = s
        for i in range(len(q)):
            r[k + i] -= s * q[i]
        r.pop()
    return trim(quot), trim(r)


def monic(p):
    if not p:
        return p
    return tuple(c / p[-1] for c in p)


def gcd_poly(p, q):
    a, b = trim(p), trim(q)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def derivative(p):
    if len(p) <= 1:
        return ()
    return trim(i * p[i] for i in range(1, len(p)))


def squarefree_part(p):
    g = gcd_poly(p, derivative(p))
    if degree(g) == 0:
        return monic(p)
    return monic(divmod_poly(p, g)[0])


def eval_fraction(p, x):
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def eval_exact_complex(p, re, im):
    """Horner at the exact Gaussian rational re + i*im; returns (re, im) Fractions."""
    are, aim = Fraction(0), Fraction(0)
    for c in reversed(p):
        are, aim = are * re - aim * im + c, are * im + aim * re
    return are, aim


def eval_mpc(p, z):
    acc = mpc(0)
    for c in reversed(p):
        acc = acc * z + mpf(c.numerator) / mpf(c.denominator)
    return acc


def compose(p, q):
    """p(q(x)) over Q."""
    acc = ()
    for c in reversed(p):
        acc = add(mul(acc, q), (Fraction(c),) if c else ())
    return acc


# --- sympy bridge -------------------------------------------------------------

def to_sympy(p, var=_X):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(p)],
                      var, domain="QQ")


def from_sympy(sp_poly):
    return trim([Fraction(c.p, c.q) for c in reversed(sp_poly.all_coeffs())])


def is_irreducible(p):
    return to_sympy(p).is_irreducible


def factor_rational(p):
    """Irreducible factorization over Q: list of (factor tuple, multiplicity)."""
    _, factors = to_sympy(p).factor_list()
    return [(from_sympy(f), m) for f, m in factors]


def discriminant_int(p):
    """Discriminant of the primitive integer model of p (exact integer)."""
    return int(sympy.discriminant(to_sympy(integer_model(p)).as_expr(), _X))


def cyclotomic(n):
    return from_sympy(sympy.Poly(sympy.cyclotomic_poly(n, _X), _X, domain="QQ"))


def root_sum_poly(f):
    """Polynomial with roots {a + b : a, b roots of f} (includes 2*Re for conjugates)."""
    return scaled_sum_poly(f, 1)


def root_diff_poly(f):
    """Polynomial with roots {a - b : a, b roots of f} (includes 2i*Im for conjugates)."""
    return scaled_sum_poly(f, -1)


def scaled_sum_poly(f, t):
    """Polynomial with roots {a + t*b : a, b roots of f}, t a nonzero integer."""
    fy = to_sympy(f, _Y).as_expr()
    fxy = to_sympy(f).as_expr().subs(_X, _X - _Y * t)
    res = sympy.resultant(fy, sympy.expand(fxy), _Y)
    return from_sympy(sympy.Poly(res, _X))


# --- integer models and bounds ------------------------------------------------

def integer_model(p):
    """Primitive integer multiple of p (content cleared), as Fraction tuple."""
    if not p:
        return p
    den = math.lcm(*[c.denominator for c in p])
    ints = [c.numerator * (den // c.denominator) for c in p]
    g = math.gcd(*[abs(x) for x in ints])
    if g:
        ints = [x // g for x in ints]
    return tuple(Fraction(x) for x in ints)


def mahler_separation_sq(p):
    """Rigorous rational lower bound for sep(p)^2, p squarefree.

    sep(f) > sqrt(3 |disc|) / (n^((n+2)/2) ||f||_2^(n-1)) for integer squarefree f.
    """
    f = integer_model(squarefree_part(p))
    n = degree(f)
    if n <= 1:
        return Fraction(1)
    disc = abs(discriminant_int(f))
    if disc == 0:
        raise InternalAssertionError("separation bound on non-squarefree input")
    norm_sq = sum(int(c) ** 2 for c in f)
    num = 3 * disc
    den = n ** (n + 2) * norm_sq ** (n - 1)
    return Fraction(num, den)


def cauchy_bound(p):
    """All roots have |z| <= 1 + max |a_i / a_n| (returned as Fraction)."""
    lead = p[-1]
    mx = max((abs(c / lead) for c in p[:-1]), default=Fraction(0))
    return 1 + mx


def min_nonzero_root_sq(p):
    """Rational lower bound for |z|^2 over nonzero roots z of p."""
    q = list(p)
    while q and q[0] == 0:
        q.pop(0)
    if len(q) <= 1:
        return Fraction(1)
    rev = tuple(reversed(q))
    b = cauchy_bound(trim(rev))
    return 1 / (b * b)


# --- Sturm sequences ----------------------------------------------------------

def sturm_chain(p):
    chain = [trim(p), derivative(p)]
    while chain[-1]:
        rem = divmod_poly(chain[-2], chain[-1])[1]
        if not rem:
            break
        chain.append(neg(rem))
    return [c for c in chain if c]


def _sign_changes(chain, x, at_inf=0):
    signs = []
    for c in chain:
        if at_inf:
            s = c[-1] * (1 if at_inf > 0 else (-1) ** degree(c))
        else:
            s = eval_fraction(c, x)
        if s:
            signs.append(1 if s > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p, lo=None, hi=None, chain=None):
    """Distinct real roots of p in (lo, hi] (None = +-infinity); p squarefree-ized."""
    sf = squarefree_part(p)
    chain = chain or sturm_chain(sf)
    va = _sign_changes(chain, lo, at_inf=(-1 if lo is None else 0))
    vb = _sign_changes(chain, hi, at_inf=(+1 if hi is None else 0))
    return va - vb


def isolate_real_roots(p):
    """Disjoint rational intervals (lo, hi], one per distinct real root.

    Endpoints never hit a root (shifted off roots of the squarefree part).
    """
    sf = squarefree_part(p)
    chain = sturm_chain(sf)
    bound = cauchy_bound(sf)
    lo, hi = -bound - 1, bound
    total = count_real_roots(sf, lo, hi, chain=chain)
    out = []

    def split(a, b, count):
        if count == 0:
            return
        if count == 1:
            out.append((a, b))
            return
        mid = (a + b) / 2
        while eval_fraction(sf, mid) == 0:
            mid = (a + mid) / 2
        left = count_real_roots(sf, a, mid, chain=chain)
        split(a, mid, left)
        split(mid, b, count - left)

    split(lo, hi, total)
    return out


def refine_real_root(p, interval, width):
    """Shrink an isolating (lo, hi] to width <= the given Fraction."""
    sf = squarefree_part(p)
    lo, hi = interval
    flo = eval_fraction(sf, lo)
    if flo == 0:
        raise InternalAssertionError("isolating interval endpoint hits a root")
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = eval_fraction(sf, mid)
        if fm == 0:
            # the root is exactly mid; bracket it tightly and restart signs
            eps = min((hi - lo) / 4, width / 4)
            while eval_fraction(sf, mid - eps) == 0 or eval_fraction(sf, mid + eps) == 0:
                eps /= 2
            lo, hi = mid - eps, mid + eps
            break
        if (flo > 0) == (fm > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


# --- certified complex root isolation ------------------------------------------

class RootDisk:
    """Certified isolating disk: |center - root| <= radius, radius^2 exact."""

    __slots__ = ("center", "radius_sq", "is_real")

    def __init__(self, center, radius_sq, is_real=False):
        self.center = center          # mpc, exact binary components
        self.radius_sq = radius_sq    # Fraction upper bound on radius^2
        self.is_real = is_real

    def __repr__(self):
        return f"RootDisk({mpmath.nstr(self.center, 17)}, r2~{float(self.radius_sq):.3g})"

    def separated_from(self, other):
        """Rigorous disjointness: |c1 - c2|^2 > (r1 + r2)^2 via exact arithmetic."""
        dre = _exact(self.center.real) - _exact(other.center.real)
        dim = _exact(self.center.imag) - _exact(other.center.imag)
        dist_sq = dre * dre + dim * dim
        # (r1 + r2)^2 <= 2 (r1^2 + r2^2)
        return dist_sq > 2 * (self.radius_sq + other.radius_sq)

    def contains_value(self, vre, vim, v_err_sq):
        """Could the exact value v (|v - (vre, vim)| <= sqrt(v_err_sq)) be this root?

        True when the disk around (vre, vim) of radius sqrt(v_err_sq) meets
        this disk; certified with exact rationals.
        """
        dre = _exact(self.center.real) - vre
        dim = _exact(self.center.imag) - vim
        dist_sq = dre * dre + dim * dim
        return dist_sq <= 2 * (self.radius_sq + v_err_sq) or dist_sq == 0


def _exact(x):
    """mpf -> exact Fraction (no rounding: reads the mantissa directly)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    tup = x._mpf_ if hasattr(x, "_mpf_") else mpf(x)._mpf_
    sign, man, exp, _ = tup
    man, exp = int(man), int(exp)  # gmpy backend returns mpz
    if man == 0:
        if exp != 0:
            raise ValueError("cannot convert non-finite value exactly")
        return Fraction(0)
    m = -man if sign else man
    return Fraction(m * (1 << exp)) if exp >= 0 else Fraction(m, 1 << (-exp))


def certified_radius_sq(p, w):
    """Exact Fraction r^2 with some root of p within distance r of w.

    Uses min |w - z_i| <= n |p(w) / p'(w)| (simple-root form), falling back
    to (|p(w)| / |lc|)^(1/n) when p'(w) is tiny.
    """
    n = degree(p)
    wre, wim = _exact(w.real), _exact(w.imag)
    fre, fim = eval_exact_complex(p, wre, wim)
    fabs_sq = fre * fre + fim * fim
    if fabs_sq == 0:
        return Fraction(0)
    dp = derivative(p)
    dre, dim_ = eval_exact_complex(dp, wre, wim)
    dabs_sq = dre * dre + dim_ * dim_
    if dabs_sq > 0:
        return Fraction(n * n) * fabs_sq / dabs_sq
    lead = p[-1]
    ratio = fabs_sq / (lead * lead)
    # (ratio)^(1/n) upper bound via mpf with a 4x fudge (p'(w) = 0 is rare)
    with mp.workprec(128):
        approx = (mpf(ratio.numerator) / mpf(ratio.denominator)) ** (mpf(1) / n)
        ub = _exact(+approx) * 4 + Fraction(1, 2**120)
    return ub


def approximate_roots(p, prec_bits):
    """All complex roots of p at ~prec_bits working precision (unordered).

    Coefficients are converted inside the working precision (plus their own
    bit size), so large exact coefficients are not silently rounded.
    """
    coeff_bits = max(max(c.numerator.bit_length(), c.denominator.bit_length())
                     for c in p)
    with mp.workprec(prec_bits + coeff_bits + 16):
        coeffs = [mpf(c.numerator) / mpf(c.denominator) for c in reversed(p)]
        for extra in (50, 200, 800):
            try:
                roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=extra)
                return [mpc(r) for r in roots]
            except mpmath.libmp.NoConvergence:
                continue
    raise InternalAssertionError(f"root finding failed at {prec_bits} bits")
