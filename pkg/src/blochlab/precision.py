"""Working-precision plumbing on top of mpmath.

A PrecisionContext fixes the bit precision of every transcendental
evaluation in the library.  Internally everything runs with GUARD_BITS
extra bits and is rounded once on the way out, so doubling prec_bits can
only move a reported value by about its own last bit.
"""

from fractions import Fraction

from mpmath import mp, mpf

from .errors import PrecisionOverflowError

GUARD_BITS = 32

# Hard cap multiplier on internal precision, relative to the context.
MAX_PREC_FACTOR = 64


class PrecisionContext:
    """Immutable carrier of the working precision (in bits).

    tol = 2**(1 - prec_bits) is the absolute/relative error budget every
    operation must respect on its result.
    """

    __slots__ = ("prec_bits",)

    def __init__(self, prec_bits=256):
        prec_bits = int(prec_bits)
        if prec_bits < 64:
            raise ValueError("prec_bits must be >= 64")
        object.__setattr__(self, "prec_bits", prec_bits)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("PrecisionContext is immutable")

    def __repr__(self):
        return f"PrecisionContext(prec_bits={self.prec_bits})"

    def __eq__(self, other):
        return isinstance(other, PrecisionContext) and self.prec_bits == other.prec_bits

    def __hash__(self):
        return hash(("PrecisionContext", self.prec_bits))

    @property
    def tol(self):
        """Error budget 2**(1 - prec_bits) as an mpf."""
        with mp.workprec(self.prec_bits + GUARD_BITS):
            return mpf(2) ** (1 - self.prec_bits)

    @property
    def working_prec(self):
        return self.prec_bits + GUARD_BITS

    def workprec(self, extra=0):
        """Context manager setting mp precision to prec_bits + guard (+ extra)."""
        total = self.prec_bits + GUARD_BITS + extra
        if total > MAX_PREC_FACTOR * self.prec_bits:
            raise PrecisionOverflowError(
                f"internal precision {total} exceeds {MAX_PREC_FACTOR}x context"
            )
        return mp.workprec(total)

    def doubled(self):
        return PrecisionContext(2 * self.prec_bits)

    def round_out(self, value):
        """Round a computed value once, to the context precision."""
        with mp.workprec(self.prec_bits):
            return +value


DEFAULT_CONTEXT = PrecisionContext(256)


def mpf_to_fraction(x):
    """Exact conversion of a (binary) mpf to Fraction (reads the mantissa,
    never re-rounds)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    tup = x._mpf_ if hasattr(x, "_mpf_") else mp.mpf(x)._mpf_
    sign, man, exp, _ = tup
    man, exp = int(man), int(exp)  # gmpy backend returns mpz
    if man == 0:
        if exp != 0:
            raise ValueError("cannot convert non-finite mpf to Fraction")
        return Fraction(0)
    m = -man if sign else man
    if exp >= 0:
        return Fraction(m * (1 << exp))
    return Fraction(m, 1 << (-exp))


def fraction_to_mpf(q):
    """Round a Fraction to an mpf at the current working precision."""
    return mpf(q.numerator) / mpf(q.denominator)
