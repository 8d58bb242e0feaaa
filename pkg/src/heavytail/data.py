"""Count data container."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DataError


def _frozen(a):
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CountData:
    """Distinct positive integer values with their multiplicities.

    Use :meth:`from_observations` or :meth:`from_pairs` rather than the
    constructor; both deduplicate and sort.
    """

    values: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        values, counts = _frozen(self.values), _frozen(self.counts)
        if values.shape != counts.shape or values.ndim != 1:
            raise DataError("values and counts must be 1-d arrays of equal length")
        if values.size and (values[0] < 1 or np.any(np.diff(values) <= 0)):
            raise DataError("values must be strictly increasing positive integers")
        if np.any(counts < 1):
            raise DataError("counts must be positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_observations(cls, obs):
        obs = np.asarray(obs)
        if obs.size and (obs.dtype.kind == "f" and np.any(obs != np.floor(obs))):
            raise DataError("observations must be integers")
        obs = obs.astype(np.int64)
        if np.any(obs < 1):
            raise DataError("observations must be >= 1")
        values, counts = np.unique(obs, return_counts=True)
        return cls(values, counts)

    @classmethod
    def from_pairs(cls, values, counts):
        values = np.asarray(values, dtype=np.int64)
        counts = np.asarray(counts, dtype=np.int64)
        if np.any(values < 1):
            raise DataError("values must be >= 1")
        if np.any(counts < 1):
            raise DataError("counts must be >= 1")
        uniq, inv = np.unique(values, return_inverse=True)
        summed = np.bincount(inv, weights=counts, minlength=uniq.size).astype(np.int64)
        return cls(uniq, summed)

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @property
    def n(self):
        return int(self.counts.sum())

    @property
    def total(self):
        """Sum of all observations."""
        return int(np.dot(self.values, self.counts))

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, CountData):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(self.counts, other.counts)

    def __hash__(self):
        return hash((self.values.tobytes(), self.counts.tobytes()))

    def observations(self):
        """Expand back to one entry per observation."""
        return np.repeat(self.values, self.counts)

    def tail(self, xmin):
        """Subset with values >= xmin."""
        keep = self.values >= xmin
        return CountData(self.values[keep], self.counts[keep])

    def fingerprint(self):
        h = hashlib.sha256()
        h.update(self.values.astype("<i8").tobytes())
        h.update(self.counts.astype("<i8").tobytes())
        return h.hexdigest()
