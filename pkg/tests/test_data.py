import numpy as np
import pytest

from heavytail.data import CountData
from heavytail.errors import DataError


def test_from_observations():
    d = CountData.from_observations([5, 1, 5, 2])
    assert d.values.tolist() == [1, 2, 5] and d.counts.tolist() == [1, 1, 2]
    assert d.n == 4 and d.total == 13 and len(d) == 4


def test_from_pairs_merges_duplicates():
    d = CountData.from_pairs([3, 1, 3], [2, 1, 4])
    assert d.values.tolist() == [1, 3] and d.counts.tolist() == [1, 6]


def test_equality_and_hash():
    a = CountData.from_observations([1, 2, 2])
    b = CountData.from_pairs([2, 1], [2, 1])
    assert a == b and hash(a) == hash(b) and a.fingerprint() == b.fingerprint()
    assert a != CountData.from_observations([1, 2])


def test_arrays_are_read_only():
    d = CountData.from_observations([1, 2])
    with pytest.raises(ValueError):
        d.values[0] = 7


def test_tail_and_observations():
    d = CountData.from_observations([1, 4, 4, 9])
    assert d.tail(4).values.tolist() == [4, 9] and d.tail(4).n == 3
    assert d.observations().tolist() == [1, 4, 4, 9]


@pytest.mark.parametrize("obs", [[0, 1], [-3], [1.5]])
def test_invalid_observations(obs):
    with pytest.raises(DataError):
        CountData.from_observations(obs)


def test_invalid_pairs():
    with pytest.raises(DataError):
        CountData.from_pairs([1, 2], [1, 0])


def test_empty():
    d = CountData.empty()
    assert d.n == 0 and d.total == 0 and d.values.dtype == np.int64
