"""Independent reference values, frozen into ``oracle_values.json``.

Nothing here imports heavytail. Values come from direct summation in
numpy (compensated across chunks with math.fsum) and from mpmath at 30
significant digits. Re-run with::

    python3 tests/oracles/compute_oracles.py

The 10^9-term zeta summation takes a few tens of seconds.
"""

import json
import math
from pathlib import Path

import mpmath
import numpy as np

mpmath.mp.dps = 30
OUT = Path(__file__).with_name("oracle_values.json")
CHUNK = 10_000_000


def direct_sum(term, n_terms, start=1):
    """fsum of chunkwise numpy sums of term(x) for x = start .. start + n_terms - 1."""
    parts = []
    lo = start
    stop = start + n_terms
    while lo < stop:
        hi = min(lo + CHUNK, stop)
        x = np.arange(lo, hi, dtype=np.float64)
        parts.append(float(np.sum(term(x))))
        lo = hi
    return math.fsum(parts)


def zeta_brute(s, n_terms):
    """sum_{i<=N} i^-s plus the integral bracket for the remainder.

    int_{N+1}^inf x^-s dx <= remainder <= int_N^inf x^-s dx; the bracket
    midpoint is returned together with its half-width.
    """
    head = direct_sum(lambda x: x ** -s, n_terms)
    lo = (n_terms + 1) ** (1 - s) / (s - 1)
    hi = n_terms ** (1 - s) / (s - 1)
    return head + 0.5 * (lo + hi), 0.5 * (hi - lo)


def hurwitz_brute(s, q, n_terms):
    head = direct_sum(lambda x: x ** -s, n_terms, start=q)
    last = q + n_terms
    lo = last ** (1 - s) / (s - 1)
    hi = (last - 1) ** (1 - s) / (s - 1)
    return head + 0.5 * (lo + hi), 0.5 * (hi - lo)


def uexp(x, phi):
    e = sum(p * (x - 1.0) ** i for i, p in enumerate(phi))
    return -np.expm1(-e)


def main():
    out = {}

    z15, w15 = zeta_brute(1.5, 1_000_000_000)
    out["zeta_1.5"] = {"brute": z15, "bracket_halfwidth": w15,
                       "mpmath": float(mpmath.zeta(1.5)), "terms": 1_000_000_000}

    h, w = hurwitz_brute(2.5, 7, 10_000_000)
    out["hurwitz_2.5_7"] = {"brute": h, "bracket_halfwidth": w,
                            "mpmath": float(mpmath.zeta(2.5, 7)), "terms": 10_000_000}

    # normalising constant of the power law (theta=2.5) times D(x; 0.1, 0.05, 0)
    theta, phi, n = 2.5, (0.1, 0.05, 0.0), 10_000_000
    z = mpmath.zeta(theta)
    head = direct_sum(lambda x: x ** -theta * uexp(x, phi), n)
    # D(x) = 1 to double precision beyond x = 10^7, so the rest is a plain zeta tail
    rest = mpmath.zeta(theta, n + 1)
    c = float((mpmath.mpf(head) + rest) / z)
    out["norm_const_pl2.5_uexp"] = {
        "theta": theta, "phi": list(phi), "terms": n, "value": c,
        "pmf_x1": float(mpmath.mpf(uexp(1.0, phi)) / z / c),
        "pmf_x10": float(mpmath.mpf(10.0 ** -theta * uexp(10.0, phi)) / z / c),
    }

    # single observation x=1 under a theta=2 power law
    out["loglik_x1_theta2"] = float(mpmath.log(6 / mpmath.pi ** 2))

    # x_min by linear scan for D(x) = 1 - exp(-(0.01 + 0.1 (x - 1))), tau = 0.95
    x = 1
    while not (1.0 - math.exp(-(0.01 + 0.1 * (x - 1)))) > 0.95:
        x += 1
    out["xmin_0.01_0.1_0_tau0.95"] = x

    # two-point tail {1: 3, 2: 1} against a theta=2 power law from xmin=1:
    # model CDF at 1 is 6/pi^2, at 2 is (1 + 1/4) 6/pi^2; empirical 3/4 and 1
    F1 = 6 / mpmath.pi ** 2
    F2 = F1 * mpmath.mpf(5) / 4
    out["ks_two_point"] = float(max(abs(mpmath.mpf(3) / 4 - F1), abs(1 - F2)))

    # hand-evaluated log posterior on the natural scale at
    # theta=2.5, phi=(0.1,0.05,0.001), prior theta-1 ~ Exp(0.1), phi_i ~ Exp(0.01),
    # for data {1: 5, 2: 3, 7: 1, 40: 2}
    phi3 = (0.1, 0.05, 0.001)
    z = mpmath.zeta(2.5)
    head = direct_sum(lambda x: x ** -2.5 * uexp(x, phi3), n)
    c3 = (mpmath.mpf(head) + mpmath.zeta(2.5, n + 1)) / z
    data = {1: 5, 2: 3, 7: 1, 40: 2}
    ll = mpmath.mpf(0)
    for v, k in data.items():
        pmf = mpmath.mpf(v) ** -2.5 * (1 - mpmath.exp(-(sum(p * (v - 1) ** i for i, p in enumerate(phi3))))) / z / c3
        ll += k * mpmath.log(pmf)
    lprior = mpmath.log(0.1) - 0.1 * 1.5 + sum(mpmath.log(0.01) - 0.01 * p for p in phi3)
    out["log_posterior_reference"] = {
        "data": [[v, k] for v, k in data.items()],
        "theta": 2.5, "phi": list(phi3),
        "loglik": float(ll), "logprior": float(lprior), "value": float(ll + lprior),
    }

    OUT.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
