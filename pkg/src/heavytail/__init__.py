"""Fit heavy-tailed discrete distributions by modelling the deviation from a backbone."""

__version__ = "0.1.0"

from ._backend import kernels
from .bayes import (
    PosteriorChain,
    TuningConfig,
    log_likelihood,
    log_posterior,
    pair_fit,
    posterior_summary,
    run_mcmc,
)
from .compare import bic, compare_models
from .csn import csn_fit, ks_distance, pl_mle_discrete
from .data import CountData
from .dist import (
    DiscreteLogNormal,
    InverseLogistic,
    NoDeviation,
    ParamPoint,
    PowerLaw,
    UnitExpCDF,
    deviation,
    model_pmf,
    moment_continuous_pl,
    norm_const,
    sample,
    tail_pmf,
)
from .missing import impute_missing, recording_rate
from .models import M1, M2, M3, ModelSpec, PriorSpec
from .special import hurwitz_zeta, zeta
from .xmin import Unbounded, xmin_from_phi, xmin_posterior

BACKEND = kernels.name
