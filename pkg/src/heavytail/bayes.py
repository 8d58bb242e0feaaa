"""Likelihood, posterior and random-walk Metropolis sampling.

The sampler runs on an unconstrained parametrisation (see
:mod:`heavytail.models`). A pilot run adapts a single step size applied to
per-coordinate step lengths read off the local curvature at the starting
point; the pilot's empirical covariance, scaled by 2.38^2 / d, then drives
a fixed multivariate Gaussian random walk for the main run.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from ._backend import kernels
from .data import CountData
from .dist import DEFAULT_TOL, norm_const
from .errors import ConstraintError, NormalizerError, TuningFailure
from .models import IDENTITY, LOG, LOG_SHIFT1, ModelSpec, PriorSpec, from_unconstrained, to_unconstrained

log = logging.getLogger(__name__)

_MAX_EXP_ARG = 700.0


def log_likelihood(data, point, spec=None, tol=DEFAULT_TOL):
    """sum_v counts(v) log f(v) for the composite model at ``point``.

    ``point`` may be a ParamPoint or a natural-scale vector (``spec`` is
    then required to interpret it); an invalid vector raises
    ConstraintError.
    """
    if not hasattr(point, "tail"):
        if spec is None:
            raise TypeError("a ModelSpec is needed to interpret a parameter vector")
        point = spec.point_from_vector(np.asarray(point, dtype=float))
    if data.n == 0:
        return 0.0
    return _loglik(data.values.astype(float), data.counts.astype(float), data.n, point, tol)


def _loglik(values, counts, n, point, tol):
    tail_kind, p0, p1, norm = point.tail.kernel_args()
    dev_kind, phi = point.deviation.kernel_args()
    ll = kernels.loglik_sum(tail_kind, p0, p1, math.log(norm), dev_kind, phi, values, counts)
    c = norm_const(point.tail, point.deviation, tol).value
    return ll - n * math.log(c)


def log_prior(vec, names, prior):
    total = 0.0
    for name, x in zip(names, vec):
        total += prior.for_param(name).logpdf(x)
    return total


def log_posterior(data, point, spec, prior=None, likelihood_weight=1.0, tol=DEFAULT_TOL):
    """Unnormalised log posterior on the natural parameter scale.

    Returns ``-inf`` for a parameter vector outside the model constraints.
    The sampler works with :class:`Posterior`, which adds the Jacobian of
    the unconstrained transform.
    """
    prior = prior or spec.prior
    if hasattr(point, "tail"):
        vec = spec.vector_from_point(point)
    else:
        vec = np.asarray(point, dtype=float)
        try:
            point = spec.point_from_vector(vec)
        except ConstraintError:
            return -math.inf
    lp = log_prior(vec, spec.param_names, prior)
    if lp == -math.inf:
        return lp
    return likelihood_weight * log_likelihood(data, point, tol=tol) + lp


# ---------------------------------------------------------------------------
# sampling targets on the unconstrained scale
# ---------------------------------------------------------------------------


class Posterior:
    """Log density of a single-dataset posterior in unconstrained coordinates."""

    kind = "single"

    def __init__(self, data, spec, prior=None, likelihood_weight=1.0, tol=DEFAULT_TOL):
        self.data = data
        self.spec = spec
        self.prior = prior or spec.prior
        self.weight = likelihood_weight
        self.tol = tol
        self.names = spec.param_names
        self.transforms = spec.transforms
        self._values = data.values.astype(float)
        self._counts = data.counts.astype(float)
        self._priors = [self.prior.for_param(n) for n in self.names]

    def natural(self, u):
        return from_unconstrained(u, self.transforms)[0]

    def initial(self):
        return to_unconstrained(self.spec.default_init(self.data), self.transforms)

    def _loglik(self, point):
        if self.weight == 0.0:
            return 0.0
        return self.weight * _loglik(self._values, self._counts, self.data.n, point, self.tol)

    def __call__(self, u):
        if np.any(np.asarray(u) > _MAX_EXP_ARG):
            return -math.inf
        vec, log_jac = from_unconstrained(u, self.transforms)
        lp = 0.0
        for pr, x in zip(self._priors, vec):
            lp += pr.logpdf(x)
        if lp == -math.inf:
            return lp
        try:
            point = self.spec.point_from_vector(vec)
            ll = self._loglik(point)
        except (ConstraintError, NormalizerError):
            return -math.inf
        out = ll + lp + log_jac
        return out if out == out else -math.inf


class PairPosterior(Posterior):
    """Joint posterior for two datasets sharing (theta, phi) up to additive offsets.

    Dataset A uses (theta, phi); dataset B uses (theta + d_theta, phi + d_phi).
    """

    kind = "pair"

    def __init__(self, data_a, data_b, spec, prior=None, likelihood_weight=1.0, tol=DEFAULT_TOL):
        super().__init__(data_a, spec, prior, likelihood_weight, tol)
        self.data_b = data_b
        self.names = spec.param_names + tuple(f"d_{n}" for n in spec.param_names)
        self.transforms = spec.transforms + (IDENTITY,) * spec.k
        self._values_b = data_b.values.astype(float)
        self._counts_b = data_b.counts.astype(float)
        self._priors = [self.prior.for_param(n) for n in self.names]

    def initial(self):
        shared = to_unconstrained(self.spec.default_init(self.data), self.spec.transforms)
        return np.concatenate([shared, np.zeros(self.spec.k)])

    def split(self, vec):
        k = self.spec.k
        return vec[:k], vec[:k] + vec[k:]

    def __call__(self, u):
        if np.any(np.asarray(u) > _MAX_EXP_ARG):
            return -math.inf
        vec, log_jac = from_unconstrained(u, self.transforms)
        lp = 0.0
        for pr, x in zip(self._priors, vec):
            lp += pr.logpdf(x)
        if lp == -math.inf:
            return lp
        nat_a, nat_b = self.split(vec)
        try:
            point_a = self.spec.point_from_vector(nat_a)
            point_b = self.spec.point_from_vector(nat_b)
            if self.weight == 0.0:
                ll = 0.0
            else:
                ll = _loglik(self._values, self._counts, self.data.n, point_a, self.tol)
                ll += _loglik(self._values_b, self._counts_b, self.data_b.n, point_b, self.tol)
                ll *= self.weight
        except (ConstraintError, NormalizerError):
            return -math.inf
        out = ll + lp + log_jac
        return out if out == out else -math.inf


def pair_log_likelihood(data_a, data_b, spec, shared, offsets, tol=DEFAULT_TOL):
    """log f(A | theta, phi) + log f(B | theta + d_theta, phi + d_phi)."""
    shared = np.asarray(shared, dtype=float)
    point_a = spec.point_from_vector(shared)
    point_b = spec.point_from_vector(shared + np.asarray(offsets, dtype=float))
    return log_likelihood(data_a, point_a, tol=tol) + log_likelihood(data_b, point_b, tol=tol)


# ---------------------------------------------------------------------------
# sampler
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TuningConfig:
    pilot_iters: int = 5000
    main_iters: int = 50000
    burnin: int = 10000
    thin: int = 1
    proposal_scale_override: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if not self.main_iters > self.burnin >= 0:
            raise ValueError("need main_iters > burnin >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.pilot_iters < 200:
            raise ValueError("pilot_iters must be >= 200")

    @property
    def n_kept(self):
        return (self.main_iters - self.burnin) // self.thin


@dataclass
class PosteriorChain:
    """Kept MCMC draws with the tuning record.

    ``draws`` holds the unconstrained coordinates and ``natural`` the same
    rows on the model's parameter scale.
    """

    names: tuple
    draws: np.ndarray
    natural: np.ndarray
    log_posterior: np.ndarray
    acceptance_rate: float
    pilot_acceptance_rate: float
    proposal_covariance: np.ndarray
    seed: int
    spec: ModelSpec
    tuning: TuningConfig
    kind: str = "single"
    pilot_scale: float = float("nan")
    start: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return self.draws.shape[0]

    def column(self, name):
        return self.natural[:, self.names.index(name)]

    def points(self, dataset="a"):
        """ParamPoint for every kept draw (``dataset`` selects A or B of a pair chain)."""
        k = self.spec.k
        rows = self.natural[:, :k]
        if self.kind == "pair" and dataset == "b":
            rows = rows + self.natural[:, k:]
        elif dataset not in ("a", "b"):
            raise ValueError(f"dataset must be 'a' or 'b', got {dataset!r}")
        return [self.spec.point_from_vector(r) for r in rows]

    def phi_draws(self, dataset="a"):
        return [p.deviation for p in self.points(dataset)]

    def posterior_mean_point(self, dataset="a"):
        k = self.spec.k
        mean = self.natural.mean(axis=0)
        vec = mean[:k] if dataset == "a" else mean[:k] + mean[k:]
        return self.spec.point_from_vector(vec)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["draw", "log_posterior", *self.names])
            for i, (lp, row) in enumerate(zip(self.log_posterior, self.natural)):
                w.writerow([i, repr(float(lp)), *(repr(float(v)) for v in row)])


def _find_start(target, u0):
    """Posterior mode by Nelder-Mead, used to start the pilot run."""
    f0 = target(u0)
    if not np.isfinite(f0):
        raise TuningFailure("log posterior is not finite at the default starting point",
                            {"start": u0.tolist()})

    def neg(u):
        v = target(u)
        return -v if np.isfinite(v) else 1e300

    d = len(u0)
    res = minimize(neg, u0, method="Nelder-Mead",
                   options={"maxfev": 600 * d, "xatol": 1e-4, "fatol": 1e-6, "adaptive": d > 4})
    return res.x if res.fun < -f0 else u0


def _coordinate_scales(target, u, lp):
    """Per-coordinate step lengths from the curvature of the log density at ``u``.

    A central second difference gives 1/sqrt(-d2 lp / du_i^2). Steps that
    leave the support are shrunk; a coordinate with no usable curvature
    falls back to the largest step that stayed finite.
    """
    h = np.ones(len(u))
    for i in range(len(u)):
        fallback = None
        for eps in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5):
            e = np.zeros(len(u))
            e[i] = eps
            up, down = target(u + e), target(u - e)
            if not (np.isfinite(up) and np.isfinite(down)):
                continue
            fallback = fallback or eps
            curv = -(up - 2.0 * lp + down) / eps**2
            if curv > 0 and np.isfinite(curv):
                h[i] = min(max(1.0 / math.sqrt(curv), 1e-8), 10.0)
                break
        else:
            h[i] = fallback or 1e-5
    return h


def _pilot(target, u, lp, iters, rng):
    """Random-walk pilot with a single adapted scale on curvature-scaled steps.

    Returns the pilot draws, the final state, the acceptance rate, the
    final scalar scale and the per-coordinate step lengths it multiplies.
    """
    d = len(u)
    h = _coordinate_scales(target, u, lp)
    log_scale = math.log(2.38 / math.sqrt(d))
    batch = 100
    z = rng.standard_normal((iters, d))
    log_unif = np.log(rng.random(iters))
    out = np.empty((iters, d))
    accepted = batch_acc = 0
    for i in range(iters):
        prop = u + math.exp(log_scale) * h * z[i]
        lp_prop = target(prop)
        if log_unif[i] < lp_prop - lp:
            u, lp = prop, lp_prop
            accepted += 1
            batch_acc += 1
        out[i] = u
        if (i + 1) % batch == 0:
            k = (i + 1) // batch
            rate = batch_acc / batch
            step = (rate - 0.25) / 0.25 * math.log(2.0) / math.sqrt(k)
            log_scale += max(-math.log(2.0), min(math.log(2.0), step))
            batch_acc = 0
    return out, u, lp, accepted / iters, math.exp(log_scale), h


def sample_posterior(target, tuning=TuningConfig(), progress=True):
    """Pilot-tuned random-walk Metropolis on ``target``; returns a PosteriorChain."""
    rng = np.random.default_rng(tuning.seed)
    u = _find_start(target, np.asarray(target.initial(), dtype=float))
    start = u.copy()
    lp = target(u)
    d = len(u)

    pilot, u, lp, pilot_rate, scale, steps0 = _pilot(target, u, lp, tuning.pilot_iters, rng)
    if pilot_rate < 0.01:
        raise TuningFailure(
            f"pilot acceptance rate {pilot_rate:.4f} is below 0.01",
            {"pilot_acceptance_rate": pilot_rate, "final_scale": scale, "start": start.tolist()},
        )
    pilot_cov = np.atleast_2d(np.cov(pilot[tuning.pilot_iters // 2:], rowvar=False))
    ridge = np.diag(np.maximum(np.diag(pilot_cov), (scale * steps0) ** 2) * 1e-6)
    factor = (2.38**2 / d if tuning.proposal_scale_override is None
              else tuning.proposal_scale_override**2)
    cov = factor * (pilot_cov + ridge)
    chol = np.linalg.cholesky(cov)
    log.debug("pilot acceptance %.3f, scale %.4g", pilot_rate, scale)

    n = tuning.main_iters
    steps = rng.standard_normal((n, d)) @ chol.T
    log_unif = np.log(rng.random(n))
    kept_idx = tuning.burnin + tuning.thin * np.arange(tuning.n_kept)
    keep = np.zeros(n, dtype=bool)
    keep[kept_idx] = True
    draws = np.empty((tuning.n_kept, d))
    lps = np.empty(tuning.n_kept)
    accepted = 0
    j = 0
    report_every = max(n // 10, 1)
    for i in range(n):
        prop = u + steps[i]
        lp_prop = target(prop)
        if log_unif[i] < lp_prop - lp:
            u, lp = prop, lp_prop
            accepted += 1
        if keep[i]:
            draws[j] = u
            lps[j] = lp
            j += 1
        if progress and (i + 1) % report_every == 0:
            log.info("iteration %d/%d, acceptance %.3f", i + 1, n, accepted / (i + 1))

    natural = np.column_stack(
        [_natural_column(draws[:, c], t) for c, t in enumerate(target.transforms)]
    )
    return PosteriorChain(
        names=tuple(target.names),
        draws=draws,
        natural=natural,
        log_posterior=lps,
        acceptance_rate=accepted / n,
        pilot_acceptance_rate=pilot_rate,
        proposal_covariance=cov,
        seed=tuning.seed,
        spec=target.spec,
        tuning=tuning,
        kind=target.kind,
        pilot_scale=scale,
        start=start,
    )


def _natural_column(col, transform):
    if transform == LOG:
        return np.exp(col)
    if transform == LOG_SHIFT1:
        return 1.0 + np.exp(col)
    return col


def run_mcmc(data, spec, prior=None, tuning=TuningConfig(), likelihood_weight=1.0,
             tol=DEFAULT_TOL, progress=True):
    """Fit ``spec`` to ``data`` by pilot-tuned random-walk Metropolis."""
    if data.n == 0:
        raise ValueError("cannot fit an empty dataset")
    target = Posterior(data, spec, prior, likelihood_weight, tol)
    return sample_posterior(target, tuning, progress)


def pair_fit(data_a, data_b, spec, prior=None, tuning=TuningConfig(), likelihood_weight=1.0,
             tol=DEFAULT_TOL, progress=True):
    """Joint fit of two datasets with offset parameters for dataset B."""
    if data_a.n == 0 or data_b.n == 0:
        raise ValueError("both datasets must be nonempty")
    target = PairPosterior(data_a, data_b, spec, prior, likelihood_weight, tol)
    return sample_posterior(target, tuning, progress)


def summarize(samples, names):
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    out = {}
    for j, name in enumerate(names):
        col = samples[:, j]
        q = np.percentile(col, [2.5, 50.0, 97.5])
        out[name] = {
            "mean": float(col.mean()),
            "sd": float(col.std(ddof=1)) if col.size > 1 else 0.0,
            "q2.5": float(q[0]),
            "q50": float(q[1]),
            "q97.5": float(q[2]),
        }
    return out


def posterior_summary(chain):
    """Mean, SD and 2.5/50/97.5% quantiles of each parameter on the natural scale."""
    return summarize(chain.natural, chain.names)
