"""Reading and writing count data, plot-ready tables and fit reports."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import kernels
from .bayes import TuningConfig, log_likelihood, posterior_summary, run_mcmc
from .compare import aic, bic
from .data import CountData
from .dist import DEFAULT_TOL, model_pmf
from .errors import DataError
from .models import Exponential, Flat, ModelSpec, Normal, PriorSpec

SCHEMA_VERSION = "1.0"
FORMATS = ("raw", "pairs")
SCHEMA_PATH = Path(__file__).parent / "schemas" / "fit_report.schema.json"


def _parse_int(token, line, what):
    token = token.strip()
    try:
        value = int(token)
    except ValueError:
        raise DataError(f"{what} {token!r} is not an integer", line) from None
    return value


def read_counts(path, format="raw"):
    """Load count data.

    ``raw`` files hold one positive integer per line; ``pairs`` files hold
    ``value,count`` rows with an optional header line. Blank lines are
    ignored in both.
    """
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    values, counts = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if format == "raw":
                v, c = _parse_int(line, lineno, "value"), 1
            else:
                parts = line.split(",")
                if len(parts) != 2:
                    raise DataError(f"expected 'value,count', got {line!r}", lineno)
                if not values and not parts[0].strip().lstrip("-").isdigit():
                    continue  # header
                v = _parse_int(parts[0], lineno, "value")
                c = _parse_int(parts[1], lineno, "count")
                if c < 1:
                    raise DataError(f"count must be >= 1, got {c}", lineno)
            if v < 1:
                raise DataError(f"value must be >= 1, got {v}", lineno)
            values.append(v)
            counts.append(c)
    if not values:
        raise DataError(f"{path}: dataset is empty")
    return CountData.from_pairs(values, counts)


def write_counts(data, path, format="raw"):
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    with open(path, "w") as fh:
        fh.write(format_counts(data, format))


def format_counts(data, format="raw"):
    if format == "raw":
        return "".join(f"{v}\n" for v in data.observations())
    return "value,count\n" + "".join(f"{v},{c}\n" for v, c in zip(data.values, data.counts))


def ecdf_export(data):
    """Rows (x, S(x)) with S(x) the fraction of observations >= x."""
    at_or_above = data.n - np.concatenate([[0], np.cumsum(data.counts)[:-1]])
    return np.column_stack([data.values.astype(float), at_or_above / data.n])


def write_table_csv(path_or_file, header, rows):
    own = isinstance(path_or_file, (str, Path))
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    finally:
        if own:
            fh.close()


# ---------------------------------------------------------------------------
# fit report
# ---------------------------------------------------------------------------


def _prior_to_dict(p):
    if isinstance(p, Exponential):
        return {"family": "exponential", "rate": p.rate, "loc": p.loc}
    if isinstance(p, Normal):
        return {"family": "normal", "loc": p.loc, "scale": p.scale}
    if isinstance(p, Flat):
        return {"family": "flat"}
    raise TypeError(f"cannot serialise prior {p!r}")


def _prior_from_dict(d):
    family = d["family"]
    if family == "exponential":
        return Exponential(d["rate"], d.get("loc", 0.0))
    if family == "normal":
        return Normal(d["loc"], d["scale"])
    if family == "flat":
        return Flat()
    raise ValueError(f"unknown prior family {family!r}")


def spec_to_dict(spec):
    prior = {name: _prior_to_dict(getattr(spec.prior, name))
             for name in PriorSpec.__dataclass_fields__}
    return {
        "name": spec.name,
        "tail": spec.tail,
        "deviation": spec.deviation,
        "degree": spec.degree,
        "k": spec.k,
        "param_names": list(spec.param_names),
        "prior": prior,
    }


def spec_from_dict(d):
    prior = PriorSpec(**{k: _prior_from_dict(v) for k, v in d["prior"].items()})
    return ModelSpec(d["name"], d["tail"], d["deviation"], d["degree"], prior)


def _num(v):
    return v if math.isfinite(v) else None


def build_fit_report(data, chain, tol=DEFAULT_TOL, xmin=None, csn=None):
    """Self-contained JSON-ready record of one fit."""
    spec = chain.spec
    point = chain.posterior_mean_point()
    ll = log_likelihood(data, point, tol=tol)
    surv_model = 1.0 - np.concatenate([[0.0], np.cumsum(model_pmf(np.arange(1, data.values[-1]), point, tol=tol))])
    ecdf = ecdf_export(data)
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "heavytail", "version": __version__, "backend": kernels.name},
        "data": {
            "sha256": data.fingerprint(),
            "n": data.n,
            "distinct_values": int(data.values.size),
            "total": data.total,
        },
        "model": spec_to_dict(spec),
        "tuning": asdict(chain.tuning),
        "seed": chain.seed,
        "tolerance": tol,
        "mcmc": {
            "acceptance_rate": chain.acceptance_rate,
            "pilot_acceptance_rate": chain.pilot_acceptance_rate,
            "pilot_scale": chain.pilot_scale,
            "n_kept": len(chain),
        },
        "posterior": posterior_summary(chain),
        "fit": {
            "loglik_at_posterior_mean": ll,
            "bic": bic(ll, spec.k, data.n),
            "aic": aic(ll, spec.k),
        },
        "xmin_posterior": xmin.to_dict() if xmin is not None else None,
        "baseline_csn": csn.to_dict() if csn is not None else None,
        "curves": {
            "x": ecdf[:, 0].astype(int).tolist(),
            "empirical_survival": ecdf[:, 1].tolist(),
            "model_survival": [_num(float(v)) for v in surv_model[data.values - 1]],
            "deviation_at_posterior_mean": [float(v) for v in point.deviation(data.values)],
        },
    }


def rerun_from_report(report, data, progress=False):
    """Repeat the fit recorded in ``report`` on ``data``; returns the new chain."""
    if report["data"]["sha256"] != data.fingerprint():
        raise DataError("data fingerprint does not match the report")
    spec = spec_from_dict(report["model"])
    tuning = TuningConfig(**report["tuning"])
    return run_mcmc(data, spec, tuning=tuning, tol=report["tolerance"], progress=progress)


def load_schema():
    with open(SCHEMA_PATH) as fh:
        return json.load(fh)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dump_json(obj, path_or_file):
    """Write ``obj`` as JSON; non-finite floats become null."""
    text = json.dumps(_clean(obj), indent=2, allow_nan=False, default=_json_default)
    if isinstance(path_or_file, (str, Path)):
        Path(path_or_file).write_text(text + "\n")
    else:
        path_or_file.write(text + "\n")


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"{type(o).__name__} is not JSON serialisable")
