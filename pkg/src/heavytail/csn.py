"""Classical x_min baseline: discrete power-law MLE plus KS selection of x_min.

For each candidate cut-off the exponent is fitted by maximum likelihood
to the observations at or above it; the candidate whose fitted tail has
the smallest Kolmogorov-Smirnov distance to the empirical tail wins.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DataError
from .special import hurwitz_zeta

ALPHA_BOUNDS = (1.0 + 1e-9, 20.0)
MIN_TAIL = 10


def _tail_or_raise(data, xmin, minimum):
    tail = data.tail(xmin)
    if tail.n < minimum:
        raise DataError(
            f"need at least {minimum} observations >= xmin={xmin}, found {tail.n}"
        )
    return tail


def pl_tail_loglik(alpha, tail, xmin):
    """Discrete power-law log-likelihood of ``tail`` above ``xmin``."""
    log_sum = float(np.dot(tail.counts, np.log(tail.values)))
    return -alpha * log_sum - tail.n * math.log(hurwitz_zeta(alpha, xmin))


def pl_mle_discrete(data, xmin):
    """Maximum likelihood exponent of a discrete power law on x >= xmin.

    Bounded Brent search over alpha in (1, 20] to an absolute tolerance of
    1e-6.
    """
    tail = _tail_or_raise(data, xmin, 2)
    log_sum = float(np.dot(tail.counts, np.log(tail.values)))
    n = tail.n

    def nll(alpha):
        return alpha * log_sum + n * math.log(hurwitz_zeta(alpha, xmin))

    res = minimize_scalar(nll, bounds=ALPHA_BOUNDS, method="bounded",
                          options={"xatol": 1e-7, "maxiter": 500})
    return float(res.x)


def pl_tail_cdf(values, xmin, alpha):
    """P(X <= v | X >= xmin) for the discrete power law, at each v in ``values``."""
    norm = hurwitz_zeta(alpha, xmin)
    return np.array([1.0 - hurwitz_zeta(alpha, int(v) + 1) / norm for v in values])


def ks_distance(data, xmin, alpha):
    """Largest gap between empirical and fitted tail CDFs over observed tail values."""
    tail = _tail_or_raise(data, xmin, 1)
    empirical = np.cumsum(tail.counts) / tail.n
    model = pl_tail_cdf(tail.values, xmin, alpha)
    return float(np.max(np.abs(empirical - model)))


@dataclass
class CSNResult:
    xmin: int
    alpha: float
    ks: float
    n_tail: int
    fraction_below: float
    candidates: list

    def to_dict(self):
        out = asdict(self)
        out["candidates"] = [list(c) for c in self.candidates]
        return out


def candidate_xmins(data, min_tail=MIN_TAIL):
    """Distinct observed values that leave at least ``min_tail`` observations at or above."""
    above = data.n - np.concatenate([[0], np.cumsum(data.counts)[:-1]])
    cands = data.values[above >= min_tail]
    if cands.size == 0:
        cands = data.values[above >= 2]
    return [int(v) for v in cands]


def csn_fit(data, min_tail=MIN_TAIL):
    """Scan candidate cut-offs; return the one minimising the KS distance.

    Ties go to the smallest cut-off.
    """
    if data.values.size < 2:
        raise DataError("csn_fit needs at least 2 distinct values")
    best = None
    table = []
    for xmin in candidate_xmins(data, min_tail):
        alpha = pl_mle_discrete(data, xmin)
        ks = ks_distance(data, xmin, alpha)
        table.append((xmin, alpha, ks))
        if best is None or ks < best[2]:
            best = (xmin, alpha, ks)
    xmin, alpha, ks = best
    n_tail = data.tail(xmin).n
    return CSNResult(xmin, alpha, ks, n_tail, 1.0 - n_tail / data.n, table)
