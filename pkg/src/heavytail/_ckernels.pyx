# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Same signatures and semantics as ``_pykernels``; see that module for the
reference implementation.
"""

from libc.math cimport exp, log, log1p, expm1, erfc, pow, fabs, sqrt, INFINITY

import numpy as np

cdef enum:
    C_TAIL_POWER = 0
    C_TAIL_LOGNORMAL = 1
    C_DEV_NONE = 0
    C_DEV_UEXP = 1
    C_DEV_LOGISTIC = 2

TAIL_POWER = C_TAIL_POWER
TAIL_LOGNORMAL = C_TAIL_LOGNORMAL
DEV_NONE = C_DEV_NONE
DEV_UEXP = C_DEV_UEXP
DEV_LOGISTIC = C_DEV_LOGISTIC

cdef double[9] EM_COEFFS
EM_COEFFS[:] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
]
cdef int EM_SHIFT = 9
cdef double SQRT2 = sqrt(2.0)
cdef double LN2 = log(2.0)

name = "cython"


cdef double _hurwitz(double s, double q) nogil:
    cdef double total = 0.0
    cdef double a, fact, inv_a2, term
    cdef int k, j
    for k in range(EM_SHIFT):
        total += pow(q + k, -s)
    a = q + EM_SHIFT
    total += pow(a, 1.0 - s) / (s - 1.0) + 0.5 * pow(a, -s)
    fact = s * pow(a, -s - 1.0)
    inv_a2 = 1.0 / (a * a)
    for j in range(9):
        term = EM_COEFFS[j] * fact
        total += term
        if fabs(term) < 1e-17 * total:
            break
        fact *= (s + 2 * j + 1) * (s + 2 * j + 2) * inv_a2
    return total


def hurwitz(double s, double q):
    return _hurwitz(s, q)


cdef inline double _softplus(double z) nogil:
    if z > 0:
        return z + log1p(exp(-z))
    return log1p(exp(z))


cdef inline double _poly(double[::1] phi, double y) nogil:
    cdef double out = 0.0
    cdef Py_ssize_t i
    for i in range(phi.shape[0] - 1, -1, -1):
        out = out * y + phi[i]
    return out


cdef inline double _ln_sf(double y, double mu, double sigma) nogil:
    return 0.5 * erfc((log(y) - mu) / (sigma * SQRT2))


cdef inline double _ln_cdf(double y, double mu, double sigma) nogil:
    return 0.5 * erfc(-(log(y) - mu) / (sigma * SQRT2))


cdef inline double _log_tail_pmf(int tail_kind, double p0, double p1,
                                 double log_norm, double x) nogil:
    cdef double diff
    if tail_kind == C_TAIL_POWER:
        return -p0 * log(x) - log_norm
    if log(x - 0.5) > p0:
        diff = _ln_sf(x - 0.5, p0, p1) - _ln_sf(x + 0.5, p0, p1)
    else:
        diff = _ln_cdf(x + 0.5, p0, p1) - _ln_cdf(x - 0.5, p0, p1)
    if diff <= 0.0:
        return -INFINITY
    return log(diff) - log_norm


cdef inline double _log_deviation(int dev_kind, double[::1] phi, double x) nogil:
    cdef double p
    if dev_kind == C_DEV_NONE:
        return 0.0
    if dev_kind == C_DEV_UEXP:
        p = _poly(phi, x - 1.0)
        if p <= 0.0:
            return -INFINITY
        if p < LN2:
            return log(-expm1(-p))
        return log1p(-exp(-p))
    return -_softplus(-(phi[0] + phi[1] * (x - 1.0)))


cdef inline double _log_defect(int dev_kind, double[::1] phi, double x) nogil:
    if dev_kind == C_DEV_UEXP:
        return -_poly(phi, x - 1.0)
    return -_softplus(phi[0] + phi[1] * (x - 1.0))


def loglik_sum(int tail_kind, double p0, double p1, double log_norm,
               int dev_kind, phi, values, counts):
    cdef double[::1] ph = np.ascontiguousarray(phi, dtype=np.float64)
    cdef double[::1] xs = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] cs = np.ascontiguousarray(counts, dtype=np.float64)
    cdef double total = 0.0
    cdef Py_ssize_t i
    with nogil:
        for i in range(xs.shape[0]):
            total += cs[i] * (_log_tail_pmf(tail_kind, p0, p1, log_norm, xs[i])
                              + _log_deviation(dev_kind, ph, xs[i]))
    return total


cdef double _tail_sf(int tail_kind, double p0, double p1, double norm, double t) nogil:
    if tail_kind == C_TAIL_POWER:
        return _hurwitz(p0, t + 1.0) / norm
    return _ln_sf(t + 0.5, p0, p1) / norm


def normalizer(int tail_kind, double p0, double p1, double norm,
               int dev_kind, phi, double tol, long t_max):
    cdef double[::1] ph = np.ascontiguousarray(phi, dtype=np.float64)
    cdef double log_norm = log(norm)
    cdef double defect = 0.0
    cdef double bound = INFINITY
    cdef long lo = 1, hi = 32, x
    with nogil:
        while True:
            for x in range(lo, hi + 1):
                defect += exp(_log_tail_pmf(tail_kind, p0, p1, log_norm, <double>x)
                              + _log_defect(dev_kind, ph, <double>x))
            bound = (exp(_log_defect(dev_kind, ph, <double>hi + 1.0))
                     * _tail_sf(tail_kind, p0, p1, norm, <double>hi))
            if bound <= tol or hi >= t_max:
                break
            lo = hi + 1
            hi = 2 * hi if 2 * hi < t_max else t_max
    return 1.0 - defect - 0.5 * bound, hi, bound
