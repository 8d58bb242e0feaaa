"""Model specifications, priors and the unconstrained parametrisation.

Each free parameter carries a transform to an unconstrained coordinate
used by the random-walk sampler:

* ``theta``: u = log(theta - 1)
* ``sigma`` and nonnegative deviation coefficients: u = log(value)
* ``mu``, logistic ``phi0`` and pair offsets: identity
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import (
    DiscreteLogNormal,
    InverseLogistic,
    NoDeviation,
    ParamPoint,
    PowerLaw,
    UnitExpCDF,
)

_LOG_2PI = math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# priors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponential:
    """Exponential density with the given rate on (loc, inf)."""

    rate: float
    loc: float = 0.0

    def logpdf(self, x):
        if x < self.loc:
            return -math.inf
        return math.log(self.rate) - self.rate * (x - self.loc)

    def rvs(self, size, rng):
        return self.loc + rng.exponential(1.0 / self.rate, size=size)


@dataclass(frozen=True)
class Normal:
    loc: float = 0.0
    scale: float = 10.0

    def logpdf(self, x):
        z = (x - self.loc) / self.scale
        return -0.5 * (z * z + _LOG_2PI) - math.log(self.scale)

    def rvs(self, size, rng):
        return rng.normal(self.loc, self.scale, size=size)


@dataclass(frozen=True)
class Flat:
    """Improper uniform density; only for likelihood-only experiments."""

    def logpdf(self, x):
        return 0.0


@dataclass(frozen=True)
class PriorSpec:
    """Prior densities on the natural parameter scale.

    Defaults are weakly informative and proper: theta - 1 ~ Exp(0.1),
    deviation coefficients ~ Exp(1), location-type parameters and
    offsets ~ Normal(0, 10^2), lognormal sigma ~ Exp(0.1).
    """

    theta: object = Exponential(0.1, loc=1.0)
    mu: object = Normal(0.0, 10.0)
    sigma: object = Exponential(0.1)
    phi: object = Exponential(0.01)
    logistic_phi0: object = Normal(0.0, 10.0)
    offset: object = Normal(0.0, 10.0)

    @classmethod
    def flat(cls):
        f = Flat()
        return cls(theta=f, mu=f, sigma=f, phi=f, logistic_phi0=f, offset=f)

    def for_param(self, name):
        if name.startswith("d_"):
            return self.offset
        if name in ("theta", "mu", "sigma"):
            return getattr(self, name)
        if name == "phi0_logistic":
            return self.logistic_phi0
        return self.phi


# ---------------------------------------------------------------------------
# model specification
# ---------------------------------------------------------------------------

TAILS = ("powerlaw", "lognormal")
DEVIATIONS = ("uexp", "logistic", "none")

# transform codes
IDENTITY, LOG, LOG_SHIFT1 = 0, 1, 2


@dataclass(frozen=True)
class ModelSpec:
    """Choice of tail family, deviation family and priors.

    Parameters
    ----------
    name : str
        Label used in reports and comparison tables.
    tail : {"powerlaw", "lognormal"}
    deviation : {"uexp", "logistic", "none"}
    degree : int
        Polynomial degree of the unit-exponential exponent (``uexp`` only).
    prior : PriorSpec
    """

    name: str
    tail: str = "powerlaw"
    deviation: str = "uexp"
    degree: int = 2
    prior: PriorSpec = field(default_factory=PriorSpec)

    def __post_init__(self):
        if self.tail not in TAILS:
            raise ValueError(f"unknown tail family {self.tail!r}; choose from {TAILS}")
        if self.deviation not in DEVIATIONS:
            raise ValueError(f"unknown deviation family {self.deviation!r}; choose from {DEVIATIONS}")
        if self.deviation == "uexp" and self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")

    @property
    def theta_names(self):
        return ("theta",) if self.tail == "powerlaw" else ("mu", "sigma")

    @property
    def phi_names(self):
        if self.deviation == "uexp":
            return tuple(f"phi{i}" for i in range(self.degree + 1))
        if self.deviation == "logistic":
            return ("phi0_logistic", "phi1")
        return ()

    @property
    def param_names(self):
        return self.theta_names + self.phi_names

    @property
    def k(self):
        """Number of free parameters."""
        return len(self.param_names)

    @property
    def transforms(self):
        codes = {"theta": LOG_SHIFT1, "mu": IDENTITY, "sigma": LOG, "phi0_logistic": IDENTITY}
        return tuple(codes.get(n, LOG) for n in self.param_names)

    def make_point(self, theta_block, phi_block=()):
        """Build a validated ParamPoint; raises ConstraintError when invalid."""
        if self.tail == "powerlaw":
            (theta,) = theta_block
            tail = PowerLaw(float(theta))
        else:
            mu, sigma = theta_block
            tail = DiscreteLogNormal(float(mu), float(sigma))
        if self.deviation == "uexp":
            dev = UnitExpCDF(tuple(phi_block))
        elif self.deviation == "logistic":
            dev = InverseLogistic(float(phi_block[0]), float(phi_block[1]))
        else:
            dev = NoDeviation()
        return ParamPoint(tail, dev)

    def point_from_vector(self, vec):
        """ParamPoint from a natural-scale parameter vector ordered as ``param_names``."""
        nt = len(self.theta_names)
        return self.make_point(vec[:nt], vec[nt:])

    def vector_from_point(self, point):
        return np.array(point.theta_block + point.phi_block, dtype=float)

    def default_init(self, data=None):
        """Rough natural-scale starting point, optionally informed by the data."""
        if self.tail == "powerlaw":
            theta = [2.0]
        elif data is not None and data.n > 1:
            logs = np.log(data.values.astype(float))
            m = float(np.average(logs, weights=data.counts))
            s = math.sqrt(float(np.average((logs - m) ** 2, weights=data.counts)))
            theta = [m, max(s, 0.1)]
        else:
            theta = [1.0, 1.0]
        if self.deviation == "uexp":
            phi = [0.5, 0.1] + [0.01] * (self.degree - 1)
            phi = phi[: self.degree + 1]
        elif self.deviation == "logistic":
            phi = [0.0, 0.5]
        else:
            phi = []
        return np.array(theta + phi, dtype=float)


def to_unconstrained(vec, transforms):
    vec = np.asarray(vec, dtype=float)
    out = vec.copy()
    for i, t in enumerate(transforms):
        if t == LOG:
            out[i] = math.log(vec[i])
        elif t == LOG_SHIFT1:
            out[i] = math.log(vec[i] - 1.0)
    return out


def from_unconstrained(u, transforms):
    """Natural-scale vector and log |Jacobian| of the inverse transform."""
    out = np.array(u, dtype=float)
    log_jac = 0.0
    for i, t in enumerate(transforms):
        if t == LOG:
            out[i] = math.exp(u[i])
            log_jac += u[i]
        elif t == LOG_SHIFT1:
            out[i] = 1.0 + math.exp(u[i])
            log_jac += u[i]
    return out, log_jac


M1 = ModelSpec("M1", "powerlaw", "uexp")
M2 = ModelSpec("M2", "lognormal", "uexp")
M3 = ModelSpec("M3", "lognormal", "none")

PRESETS = {"m1": M1, "m2": M2, "m3": M3}


def get_model(name):
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(PRESETS)}") from None
