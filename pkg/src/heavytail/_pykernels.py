"""Pure numpy implementations of the numerical kernels.

Mirrors ``_ckernels.pyx`` function for function; used when the compiled
extension is unavailable or ``HEAVYTAIL_BACKEND=python`` is set.
"""

import math

import numpy as np
from scipy.special import erfc

TAIL_POWER = 0
TAIL_LOGNORMAL = 1

DEV_NONE = 0
DEV_UEXP = 1
DEV_LOGISTIC = 2

# B_{2j} / (2j)! for j = 1..9
_EM_COEFFS = (
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
)
_EM_SHIFT = 9
_SQRT2 = math.sqrt(2.0)

name = "python"


def hurwitz(s, q):
    """Hurwitz zeta sum_{k>=0} (k + q)^-s by Euler-Maclaurin summation."""
    total = 0.0
    for k in range(_EM_SHIFT):
        total += (q + k) ** -s
    a = q + _EM_SHIFT
    total += a ** (1.0 - s) / (s - 1.0) + 0.5 * a ** -s
    # rising factorial s(s+1)...(s+2j-2) * a^(-s-2j+1)
    fact = s * a ** (-s - 1.0)
    inv_a2 = 1.0 / (a * a)
    for j, coeff in enumerate(_EM_COEFFS):
        term = coeff * fact
        total += term
        if abs(term) < 1e-17 * total:
            break
        fact *= (s + 2 * j + 1) * (s + 2 * j + 2) * inv_a2
    return total


def _poly(phi, y):
    out = np.zeros_like(y)
    for c in phi[::-1]:
        out = out * y + c
    return out


def _softplus(z):
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _lognormal_sf(y, mu, sigma):
    return 0.5 * erfc((np.log(y) - mu) / (sigma * _SQRT2))


def _lognormal_cdf(y, mu, sigma):
    return 0.5 * erfc(-(np.log(y) - mu) / (sigma * _SQRT2))


def _log_tail_pmf(tail_kind, p0, p1, log_norm, x):
    if tail_kind == TAIL_POWER:
        return -p0 * np.log(x) - log_norm
    lo = (np.log(x - 0.5) - p0) / p1
    right = lo > 0.0
    diff = np.where(
        right,
        _lognormal_sf(x - 0.5, p0, p1) - _lognormal_sf(x + 0.5, p0, p1),
        _lognormal_cdf(x + 0.5, p0, p1) - _lognormal_cdf(x - 0.5, p0, p1),
    )
    with np.errstate(divide="ignore"):
        return np.log(diff) - log_norm


def _log_deviation(dev_kind, phi, x):
    if dev_kind == DEV_NONE:
        return np.zeros_like(x)
    y = x - 1.0
    if dev_kind == DEV_UEXP:
        p = _poly(phi, y)
        with np.errstate(divide="ignore"):
            return np.where(
                p < math.log(2.0),
                np.log(-np.expm1(-p)),
                np.log1p(-np.exp(-p)),
            )
    return -_softplus(-(phi[0] + phi[1] * y))


def _log_defect(dev_kind, phi, x):
    """log(1 - D(x))."""
    y = x - 1.0
    if dev_kind == DEV_UEXP:
        return -_poly(phi, y)
    return -_softplus(phi[0] + phi[1] * y)


def loglik_sum(tail_kind, p0, p1, log_norm, dev_kind, phi, values, counts):
    """sum_v counts[v] * (log g(v) + log D(v)) with g already normalised."""
    phi = np.asarray(phi, dtype=float)
    x = np.asarray(values, dtype=float)
    terms = _log_tail_pmf(tail_kind, p0, p1, log_norm, x)
    terms = terms + _log_deviation(dev_kind, phi, x)
    return float(np.dot(counts, terms))


def _tail_sf(tail_kind, p0, p1, norm, t):
    """P_g(X > t)."""
    if tail_kind == TAIL_POWER:
        return hurwitz(p0, t + 1.0) / norm
    return float(_lognormal_sf(t + 0.5, p0, p1)) / norm


def normalizer(tail_kind, p0, p1, norm, dev_kind, phi, tol, t_max):
    """Adaptive evaluation of C = 1 - sum_x g(x) (1 - D(x)).

    Returns ``(value, T, bound)`` where ``bound`` caps the neglected
    remainder and ``value`` sits at the midpoint of the bracket, so the
    error is at most ``bound / 2``. ``bound > tol`` signals that ``t_max``
    was reached first.
    """
    phi = np.asarray(phi, dtype=float)
    log_norm = math.log(norm)
    defect = 0.0
    lo, hi = 1, 32
    bound = math.inf
    while True:
        x = np.arange(lo, hi + 1, dtype=float)
        log_terms = _log_tail_pmf(tail_kind, p0, p1, log_norm, x)
        log_terms += _log_defect(dev_kind, phi, x)
        defect += float(np.exp(log_terms).sum())
        t = float(hi)
        next_defect = math.exp(float(_log_defect(dev_kind, phi, np.array([t + 1.0]))[0]))
        bound = next_defect * _tail_sf(tail_kind, p0, p1, norm, t)
        if bound <= tol or hi >= t_max:
            return 1.0 - defect - 0.5 * bound, hi, bound
        lo, hi = hi + 1, min(2 * hi, t_max)
