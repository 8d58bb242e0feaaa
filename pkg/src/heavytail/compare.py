"""BIC-based comparison of competing models fitted to the same data."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .bayes import TuningConfig, log_likelihood, posterior_summary, run_mcmc
from .errors import HeavyTailError

log = logging.getLogger(__name__)


def bic(loglik, k, n):
    """Bayesian information criterion k ln n - 2 loglik."""
    if n < 1:
        raise ValueError(f"BIC needs n >= 1, got {n}")
    return k * math.log(n) - 2.0 * loglik


def aic(loglik, k):
    return 2.0 * k - 2.0 * loglik


@dataclass
class ModelRow:
    name: str
    k: int
    loglik: float = math.nan
    bic: float = math.nan
    aic: float = math.nan
    posterior_mean: dict = field(default_factory=dict)
    acceptance_rate: float = math.nan
    error: str = None
    best: bool = False

    def to_dict(self):
        return {
            "model": self.name,
            "k": self.k,
            "loglik": self.loglik,
            "bic": self.bic,
            "aic": self.aic,
            "posterior_mean": self.posterior_mean,
            "acceptance_rate": self.acceptance_rate,
            "error": self.error,
            "best": self.best,
        }


def score_chain(data, chain):
    """Log-likelihood, BIC and AIC at the natural-scale posterior mean of ``chain``."""
    spec = chain.spec
    point = chain.posterior_mean_point()
    ll = log_likelihood(data, point)
    summary = posterior_summary(chain)
    row = ModelRow(spec.name, spec.k, ll, bic(ll, spec.k, data.n), aic(ll, spec.k),
                   {n: s["mean"] for n, s in summary.items()}, chain.acceptance_rate)
    return row


def compare_models(data, specs, tuning=TuningConfig(), progress=False):
    """Fit every spec and rank by ascending BIC.

    A failed fit produces a row with ``error`` set instead of aborting the
    comparison. Rows for successful fits come first.
    """
    if len(specs) < 2:
        raise ValueError("compare_models needs at least two model specs")
    rows = []
    for spec in specs:
        try:
            chain = run_mcmc(data, spec, tuning=tuning, progress=progress)
            rows.append(score_chain(data, chain))
        except HeavyTailError as exc:
            log.warning("fit of %s failed: %s", spec.name, exc)
            rows.append(ModelRow(spec.name, spec.k, error=f"{type(exc).__name__}: {exc}"))
    ok = sorted((r for r in rows if r.error is None), key=lambda r: r.bic)
    failed = [r for r in rows if r.error is not None]
    if ok:
        ok[0].best = True
    return ok + failed


def render_table(rows, title=None):
    """Aligned-text table of BIC values, best model marked with '*'."""
    lines = []
    if title:
        lines.append(title)
    header = f"{'Model':<8} {'k':>3} {'log-lik':>16} {'BIC':>16} {'AIC':>16}"
    lines.append(header)
    lines.append("-" * len(header))
    for r in rows:
        if r.error:
            lines.append(f"{r.name:<8} {r.k:>3} {'failed: ' + r.error}")
            continue
        mark = "*" if r.best else " "
        lines.append(f"{r.name:<7}{mark} {r.k:>3} {r.loglik:>16,.2f} {r.bic:>16,.2f} {r.aic:>16,.2f}")
    return "\n".join(lines)
