"""Riemann and Hurwitz zeta functions for real arguments s > 1."""

import math

from ._backend import kernels
from .errors import DivergentArgumentError, DomainError


def hurwitz_zeta(s, q):
    """Hurwitz zeta function sum_{i>=0} (i + q)^(-s).

    Evaluated by direct summation of the first few terms followed by an
    Euler-Maclaurin tail correction; absolute error is below 1e-12 for
    s > 1 and q >= 1.

    Parameters
    ----------
    s : float
        Exponent, must exceed 1.
    q : int or float
        Shift, must be >= 1.
    """
    s = float(s)
    if not s > 1.0:
        raise DivergentArgumentError(f"zeta series diverges for s = {s} <= 1")
    if not q >= 1:
        raise DomainError(f"hurwitz_zeta requires q >= 1, got {q}")
    return kernels.hurwitz(s, float(q))


def zeta(s):
    """Riemann zeta function for real s > 1."""
    return hurwitz_zeta(s, 1)


def log_zeta(s):
    return math.log(zeta(s))
