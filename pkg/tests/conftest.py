"""Shared test configuration.

Assertion arithmetic in the tests (differences against oracles, etc.)
must not round to mpmath's 53-bit default, so the whole session runs at a
high ambient precision; the library's own evaluations still manage their
precision explicitly via workprec.
"""

import mpmath
import pytest


@pytest.fixture(autouse=True, scope="session")
def high_ambient_precision():
    old = mpmath.mp.prec
    mpmath.mp.prec = 320
    yield
    mpmath.mp.prec = old
