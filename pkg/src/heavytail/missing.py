"""Missing-event imputation under the thinning reading of the composite model.

Events arise from the backbone g and each is recorded independently with
probability D(x). Recorded sizes then follow g D / C and an event is
recorded with overall probability C. Given n recorded events the number
of unrecorded ones is NegativeBinomial(n, C), and each unrecorded size has
pmf proportional to g(x) (1 - D(x)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import DEFAULT_TOL, NoDeviation, norm_const, thinned_draws


def recording_rate(point, tol=DEFAULT_TOL):
    """Probability that an event drawn from the backbone is recorded (= C)."""
    return norm_const(point.tail, point.deviation, tol).value


def draw_missing(n_obs, point, rng, tol=DEFAULT_TOL):
    """One realisation of (number of missing events, their total size)."""
    if isinstance(point.deviation, NoDeviation):
        return 0, 0
    c = recording_rate(point, tol)
    m = int(rng.negative_binomial(n_obs, c)) if c < 1.0 else 0
    if m == 0:
        return 0, 0
    sizes = thinned_draws(m, point.tail, point.deviation.defect, rng)
    return m, int(sizes.sum())


@dataclass
class TotalPosterior:
    events: np.ndarray
    casualties: np.ndarray
    observed_events: int
    observed_total: int
    draws_per_sample: int

    @staticmethod
    def _describe(x):
        q = np.quantile(x, [0.025, 0.05, 0.5, 0.95, 0.975])
        return {
            "mean": float(np.mean(x)),
            "sd": float(np.std(x)),
            "q2.5": float(q[0]),
            "q5": float(q[1]),
            "q50": float(q[2]),
            "q95": float(q[3]),
            "q97.5": float(q[4]),
        }

    def interval(self, level=0.9, what="events"):
        x = self.events if what == "events" else self.casualties
        a = (1.0 - level) / 2.0
        lo, hi = np.quantile(x, [a, 1.0 - a])
        return float(lo), float(hi)

    def to_dict(self):
        return {
            "observed_events": self.observed_events,
            "observed_total": self.observed_total,
            "draws_per_sample": self.draws_per_sample,
            "n_realisations": int(self.events.size),
            "total_events": self._describe(self.events),
            "total_size": self._describe(self.casualties),
        }


def impute_missing(chain, data, draws_per_sample=1, seed=None, dataset="a",
                   max_posterior_draws=None, tol=DEFAULT_TOL):
    """Posterior predictive distribution of total events and total size.

    Parameters
    ----------
    chain : PosteriorChain
    data : CountData
        The recorded data the chain was fitted to.
    draws_per_sample : int
        Imputations per posterior draw.
    seed : int or numpy Generator
    dataset : {"a", "b"}
        Which dataset of a paired chain ``data`` belongs to.
    max_posterior_draws : int, optional
        Use this many evenly spaced posterior draws instead of all of them.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    points = chain.points(dataset) if hasattr(chain, "points") else list(chain)
    if not points:
        raise ValueError("empty chain")
    if max_posterior_draws is not None and max_posterior_draws < len(points):
        idx = np.linspace(0, len(points) - 1, max_posterior_draws).round().astype(int)
        points = [points[i] for i in idx]
    n_obs, obs_total = data.n, data.total
    events, sizes = [], []
    for point in points:
        for _ in range(draws_per_sample):
            m, s = draw_missing(n_obs, point, rng, tol)
            events.append(n_obs + m)
            sizes.append(obs_total + s)
    return TotalPosterior(np.array(events, dtype=np.int64), np.array(sizes, dtype=np.int64),
                          n_obs, obs_total, draws_per_sample)
