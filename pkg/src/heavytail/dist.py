"""Tail distributions, deviation functions and the composite pmf.

The composite model on x = 1, 2, ... is

    f(x) = g(x) * D(x) / C,    C = sum_x g(x) D(x)

where g is a heavy-tailed backbone (discrete power law or discrete
lognormal) and D is a nondecreasing deviation function in (0, 1] that
tends to 1 in the tail.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import erfc

from ._backend import kernels
from .errors import ConstraintError, DomainError, NormalizerError
from .special import hurwitz_zeta, zeta

DEFAULT_TOL = 1e-10
MAX_TERMS = 1 << 24

_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# tail families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerLaw:
    """Discrete power law g(x) = x^-theta / zeta(theta) on x >= 1."""

    theta: float

    kind = "powerlaw"

    def __post_init__(self):
        if not self.theta > 1.0:
            raise ConstraintError(f"power law requires theta > 1, got {self.theta}")

    @property
    def params(self):
        return (self.theta,)

    @functools.cached_property
    def _norm(self):
        return zeta(self.theta)

    def kernel_args(self):
        return kernels.TAIL_POWER, self.theta, 0.0, self._norm

    def pmf(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-self.theta * np.log(x)) / self._norm

    def sf(self, t):
        """P(X > t) for integer t >= 0."""
        return hurwitz_zeta(self.theta, t + 1) / self._norm

    def draw(self, size, rng):
        return rng.zipf(self.theta, size=size).astype(np.int64)


@dataclass(frozen=True)
class DiscreteLogNormal:
    """Lognormal discretised on half-integer bins and renormalised to x >= 1.

    g(x) = (F(x + 1/2) - F(x - 1/2)) / (1 - F(1/2)), F the lognormal CDF.
    """

    mu: float
    sigma: float

    kind = "lognormal"

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ConstraintError(f"lognormal requires sigma > 0, got {self.sigma}")
        if not math.isfinite(self.mu):
            raise ConstraintError(f"lognormal requires finite mu, got {self.mu}")

    @property
    def params(self):
        return (self.mu, self.sigma)

    def _sf_cont(self, y):
        return 0.5 * erfc((np.log(y) - self.mu) / (self.sigma * _SQRT2))

    def _cdf_cont(self, y):
        return 0.5 * erfc(-(np.log(y) - self.mu) / (self.sigma * _SQRT2))

    @functools.cached_property
    def _norm(self):
        norm = float(self._sf_cont(0.5))
        if norm <= 0.0:
            raise NormalizerError(
                f"lognormal(mu={self.mu}, sigma={self.sigma}) puts no mass above 1/2"
            )
        return norm

    def kernel_args(self):
        return kernels.TAIL_LOGNORMAL, self.mu, self.sigma, self._norm

    def pmf(self, x):
        x = np.asarray(x, dtype=float)
        right = np.log(x - 0.5) > self.mu
        diff = np.where(
            right,
            self._sf_cont(x - 0.5) - self._sf_cont(x + 0.5),
            self._cdf_cont(x + 0.5) - self._cdf_cont(x - 0.5),
        )
        return diff / self._norm

    def sf(self, t):
        return float(self._sf_cont(t + 0.5)) / self._norm

    def draw(self, size, rng):
        out = np.empty(0, dtype=np.int64)
        while out.size < size:
            need = size - out.size
            y = rng.lognormal(self.mu, self.sigma, size=int(need / self._norm * 1.1) + 16)
            y = y[y >= 0.5]
            out = np.concatenate([out, np.floor(y + 0.5).astype(np.int64)])
        return out[:size]


TailFamily = Union[PowerLaw, DiscreteLogNormal]


# ---------------------------------------------------------------------------
# deviation families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitExpCDF:
    """D(x) = 1 - exp(-(phi_0 + phi_1 (x-1) + ... + phi_d (x-1)^d))."""

    phi: tuple

    kind = "uexp"

    def __post_init__(self):
        phi = tuple(float(p) for p in self.phi)
        object.__setattr__(self, "phi", phi)
        if not phi:
            raise ConstraintError("unit exponential deviation needs at least phi_0")
        if any(not (p >= 0.0 and math.isfinite(p)) for p in phi):
            raise ConstraintError(f"deviation coefficients must be finite and >= 0, got {phi}")
        if not any(p > 0.0 for p in phi):
            raise ConstraintError("all deviation coefficients are zero, so D is identically 0")

    @property
    def params(self):
        return self.phi

    @property
    def saturates(self):
        """True when D(x) -> 1 as x grows."""
        return any(p > 0.0 for p in self.phi[1:])

    def kernel_args(self):
        return kernels.DEV_UEXP, np.asarray(self.phi, dtype=float)

    def exponent(self, x):
        y = np.asarray(x, dtype=float) - 1.0
        out = np.zeros_like(y)
        for c in self.phi[::-1]:
            out = out * y + c
        return out

    def __call__(self, x):
        return -np.expm1(-self.exponent(x))

    def defect(self, x):
        """1 - D(x)."""
        return np.exp(-self.exponent(x))


@dataclass(frozen=True)
class InverseLogistic:
    """D(x) = 1 / (1 + exp(-(phi_0 + phi_1 (x-1)))) with phi_1 > 0."""

    phi0: float
    phi1: float

    kind = "logistic"

    def __post_init__(self):
        if not math.isfinite(self.phi0):
            raise ConstraintError(f"phi_0 must be finite, got {self.phi0}")
        if not (self.phi1 > 0.0 and math.isfinite(self.phi1)):
            raise ConstraintError(f"inverse logistic deviation requires phi_1 > 0, got {self.phi1}")

    @property
    def params(self):
        return (self.phi0, self.phi1)

    saturates = True

    def kernel_args(self):
        return kernels.DEV_LOGISTIC, np.array([self.phi0, self.phi1])

    def __call__(self, x):
        z = self.phi0 + self.phi1 * (np.asarray(x, dtype=float) - 1.0)
        return 0.5 * (1.0 + np.tanh(0.5 * z))

    def defect(self, x):
        z = self.phi0 + self.phi1 * (np.asarray(x, dtype=float) - 1.0)
        return 0.5 * (1.0 - np.tanh(0.5 * z))


@dataclass(frozen=True)
class NoDeviation:
    """D(x) = 1 everywhere; the composite model reduces to the tail family."""

    kind = "none"
    saturates = True

    @property
    def params(self):
        return ()

    def kernel_args(self):
        return kernels.DEV_NONE, np.zeros(0)

    def __call__(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def defect(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


DeviationFamily = Union[UnitExpCDF, InverseLogistic, NoDeviation]


@dataclass(frozen=True)
class ParamPoint:
    """One parameter value: a tail family plus a deviation family."""

    tail: TailFamily
    deviation: DeviationFamily = NoDeviation()

    @property
    def theta_block(self):
        return self.tail.params

    @property
    def phi_block(self):
        return self.deviation.params


@dataclass(frozen=True)
class NormalizerResult:
    value: float
    truncation_point: int
    error_bound: float
    tolerance_used: float


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _check_support(x):
    arr = np.asarray(x)
    if np.any(arr < 1):
        raise DomainError(f"support is x = 1, 2, ...; got {x!r}")
    return arr


def tail_pmf(x, family):
    """Backbone pmf g(x) for integer x >= 1 (scalar or array)."""
    _check_support(x)
    out = family.pmf(x)
    return float(out) if np.ndim(out) == 0 else out


def deviation(x, family):
    """Deviation function D(x) in (0, 1]."""
    _check_support(x)
    out = family(x)
    return float(out) if np.ndim(out) == 0 else out


def norm_const(tail, dev, tol=DEFAULT_TOL):
    """Normalising constant C = sum_x g(x) D(x).

    Computed as 1 - sum_{x<=T} g(x)(1 - D(x)) - R with the remainder
    bracketed by 0 <= R <= (1 - D(T+1)) P_g(X > T); T doubles until the
    bracket is narrower than ``tol``.
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    return _norm_const(tail, dev, float(tol))


@functools.lru_cache(maxsize=4096)
def _norm_const(tail, dev, tol):
    if isinstance(dev, NoDeviation):
        return NormalizerResult(1.0, 0, 0.0, tol)
    if not dev.saturates:
        # constant deviation: C = D(1) exactly
        return NormalizerResult(float(dev(1.0)), 1, 0.0, tol)
    tail_kind, p0, p1, norm = tail.kernel_args()
    dev_kind, phi = dev.kernel_args()
    value, t, bound = kernels.normalizer(tail_kind, p0, p1, norm, dev_kind, phi, tol, MAX_TERMS)
    if not bound <= tol:
        raise NormalizerError(
            f"normaliser for {tail} x {dev} did not reach tolerance {tol:g} "
            f"within {t} terms (remainder bound {bound:.3g})"
        )
    if not 0.0 < value <= 1.0:
        raise NormalizerError(f"normaliser for {tail} x {dev} underflowed (C = {value:g})")
    return NormalizerResult(value, int(t), 0.5 * bound, tol)


def model_pmf(x, point, spec=None, tol=DEFAULT_TOL):
    """Composite pmf f(x) = g(x) D(x) / C.

    ``spec`` is accepted for symmetry with the fitting API and is not needed
    to evaluate the pmf; the families inside ``point`` carry everything.
    """
    _check_support(x)
    c = norm_const(point.tail, point.deviation, tol).value
    out = point.tail.pmf(x) * point.deviation(x) / c
    return float(out) if np.ndim(out) == 0 else out


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def thinned_draws(n, tail, accept, rng):
    """Draw n values from ``tail`` keeping each with probability ``accept(x)``."""
    out = []
    kept = 0
    rate = 0.5
    while kept < n:
        need = n - kept
        batch = int(min(need / max(rate, 1e-3) * 1.2 + 32, 1 << 22))
        x = tail.draw(batch, rng)
        u = rng.random(batch)
        x = x[u < accept(x)]
        rate = max(x.size / batch, 1e-3)
        out.append(x)
        kept += x.size
    return np.concatenate(out)[:n]


def sample(n, point, spec=None, seed=None):
    """Exact draws from the composite model by thinning the tail family.

    A draw x from g is kept with probability D(x); since D <= 1 the kept
    values follow g D / C exactly.
    """
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    rng = _as_rng(seed)
    if isinstance(point.deviation, NoDeviation):
        return point.tail.draw(n, rng)
    return thinned_draws(n, point.tail, point.deviation, rng)


def moment_continuous_pl(m, alpha, xmin):
    """Raw moment E[X^m] of the continuous power law on [xmin, inf).

    Returns ``math.inf`` when the moment diverges (m >= alpha - 1).
    """
    if not xmin > 0:
        raise DomainError(f"xmin must be positive, got {xmin}")
    if not alpha > 1:
        raise DomainError(f"alpha must exceed 1, got {alpha}")
    if m < alpha - 1:
        return (alpha - 1) / (alpha - 1 - m) * xmin**m
    return math.inf
