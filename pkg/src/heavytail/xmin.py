"""Cut-off x_min derived from the deviation function.

x_min is the smallest integer x with D(x) > tau, i.e. the point where the
data stop deviating from the backbone. Applied to every posterior draw of
phi it yields a posterior distribution for x_min.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .dist import InverseLogistic, NoDeviation, UnitExpCDF
from .errors import DomainError, SaturationError

# largest x at which float64 still resolves consecutive integers
SEARCH_LIMIT = 2**52


class _Unbounded:
    """Marker for a deviation function that never exceeds the threshold."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Unbounded"

    def __reduce__(self):
        return (_Unbounded, ())


Unbounded = _Unbounded()


def _batch_deviation(devs):
    """Vectorised D for a homogeneous list of deviation families: f(x) -> D_i(x_i)."""
    first = devs[0]
    if isinstance(first, UnitExpCDF):
        width = max(len(d.phi) for d in devs)
        coef = np.zeros((len(devs), width))
        for i, d in enumerate(devs):
            coef[i, : len(d.phi)] = d.phi

        def f(x):
            y = x - 1.0
            p = np.zeros_like(y)
            for j in range(width - 1, -1, -1):
                p = p * y + coef[:, j]
            return -np.expm1(-p)

        return f
    if isinstance(first, InverseLogistic):
        a = np.array([d.phi0 for d in devs])
        b = np.array([d.phi1 for d in devs])
        return lambda x: 0.5 * (1.0 + np.tanh(0.5 * (a + b * (x - 1.0))))
    if isinstance(first, NoDeviation):
        return lambda x: np.ones_like(x)
    raise TypeError(f"unsupported deviation family {type(first).__name__}")


def _search(dev_fn, n, tau):
    """Smallest integer x >= 1 with D(x) > tau, per row; inf when none below SEARCH_LIMIT."""
    ones = np.ones(n)
    result = np.full(n, np.inf)
    done = dev_fn(ones) > tau
    result[done] = 1.0

    # exponential phase: find hi with D(hi) > tau, lo = hi / 2 with D(lo) <= tau
    lo = ones.copy()
    hi = np.full(n, 2.0)
    active = ~done
    while np.any(active):
        hit = dev_fn(hi) > tau
        grow = active & ~hit
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, hi * 2.0, hi)
        active = grow & (hi <= SEARCH_LIMIT)
    bounded = ~done & (hi <= SEARCH_LIMIT)

    # binary phase on (lo, hi]
    lo, hi = lo[bounded], hi[bounded]
    idx = np.flatnonzero(bounded)
    sub = _subset(dev_fn, idx, n)
    while np.any(hi - lo > 1):
        mid = np.floor((lo + hi) / 2.0)
        hit = sub(mid) > tau
        hi = np.where(hit, mid, hi)
        lo = np.where(hit, lo, mid)
    result[idx] = hi
    return result


def _subset(dev_fn, idx, n):
    def f(x):
        full = np.ones(n)
        full[idx] = x
        return dev_fn(full)[idx]

    return f


def _check_tau(tau):
    if not 0.0 < tau < 1.0:
        raise DomainError(f"threshold tau must lie in (0, 1), got {tau}")


def xmin_from_phi(phi, tau=0.95):
    """Smallest integer x >= 1 with D(x; phi) > tau, or ``Unbounded``."""
    _check_tau(tau)
    x = _search(_batch_deviation([phi]), 1, tau)[0]
    return Unbounded if math.isinf(x) else int(x)


@dataclass
class XminPosterior:
    """Posterior sample of x_min; unbounded draws are stored as ``inf``."""

    samples: np.ndarray
    tau: float
    interval: tuple
    median: float

    @property
    def n_unbounded(self):
        return int(np.isinf(self.samples).sum())

    @property
    def histogram(self):
        """Sorted (value, count) pairs over bounded samples."""
        bounded = self.samples[np.isfinite(self.samples)].astype(np.int64)
        return sorted(Counter(bounded.tolist()).items())

    def to_dict(self):
        def num(v):
            return int(v) if math.isfinite(v) else "unbounded"

        return {
            "tau": self.tau,
            "n_samples": int(self.samples.size),
            "n_unbounded": self.n_unbounded,
            "median": num(self.median),
            "interval_95": [num(self.interval[0]), num(self.interval[1])],
            "histogram": [[int(v), int(c)] for v, c in self.histogram],
        }


def xmin_posterior(chain, tau=0.95, dataset="a"):
    """Apply :func:`xmin_from_phi` to every kept draw of ``chain``."""
    _check_tau(tau)
    devs = chain.phi_draws(dataset) if hasattr(chain, "phi_draws") else list(chain)
    if not devs:
        raise ValueError("empty chain")
    samples = _search(_batch_deviation(devs), len(devs), tau)
    if np.all(np.isinf(samples)):
        raise SaturationError(
            f"deviation never exceeds tau = {tau} for any posterior draw"
        )
    lo, med, hi = np.quantile(samples, [0.025, 0.5, 0.975], method="inverted_cdf")
    return XminPosterior(samples, tau, (float(lo), float(hi)), float(med))
