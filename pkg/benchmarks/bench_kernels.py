"""Compare the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

Times the three hot paths (Hurwitz zeta, the normalising constant and the
log-likelihood sum) on both backends and checks that their results agree.
"""

import argparse
import time

import numpy as np

from heavytail import _backend


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(k):
    rng = np.random.default_rng(0)
    values = np.unique(rng.zipf(2.5, size=20000)).astype(np.int64)
    counts = rng.integers(1, 50, size=values.size).astype(np.int64)
    phi = np.array([0.1, 0.05, 0.001])
    norm = k.hurwitz(2.5, 1.0)
    return {
        "hurwitz x1000": lambda: [k.hurwitz(1.0 + 0.01 * i, 1.0 + i) for i in range(1, 1001)],
        "normalizer powerlaw/uexp": lambda: k.normalizer(k.TAIL_POWER, 2.5, 0.0, norm,
                                                         k.DEV_UEXP, phi, 1e-10, 1 << 24),
        "normalizer powerlaw/uexp slow": lambda: k.normalizer(k.TAIL_POWER, 1.3, 0.0, k.hurwitz(1.3, 1.0),
                                                              k.DEV_UEXP, np.array([1e-4, 1e-4]),
                                                              1e-10, 1 << 24),
        "loglik x100": lambda: [k.loglik_sum(k.TAIL_POWER, 2.5, 0.0, np.log(norm), k.DEV_UEXP, phi,
                                             values, counts) for _ in range(100)],
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = {}
    for name in ("cython", "python"):
        try:
            backends[name] = _backend.load(name)
        except ImportError as exc:
            print(f"{name}: unavailable ({exc})")
    if not backends:
        return 1

    results = {name: {label: _time(fn, args.repeat) for label, fn in cases(k).items()}
               for name, k in backends.items()}
    labels = list(next(iter(results.values())))
    print(f"{'case':<32}" + "".join(f"{n:>12}" for n in results) + f"{'speedup':>10}{'max rel diff':>14}")
    for label in labels:
        times = [results[n][label][0] for n in results]
        line = f"{label:<32}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            a = np.ravel(np.asarray(results["cython"][label][1], dtype=float))
            b = np.ravel(np.asarray(results["python"][label][1], dtype=float))
            rel = np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300))
            line += f"{times[1] / times[0]:>9.1f}x{rel:>14.2e}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
