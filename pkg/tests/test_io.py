import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heavytail.bayes import TuningConfig, posterior_summary, run_mcmc
from heavytail.csn import csn_fit
from heavytail.data import CountData
from heavytail.dist import sample
from heavytail.errors import DataError
from heavytail.io import (
    build_fit_report,
    dump_json,
    ecdf_export,
    format_counts,
    load_schema,
    read_counts,
    rerun_from_report,
    spec_from_dict,
    spec_to_dict,
    write_counts,
)
from heavytail.models import M1, M2, M3, ModelSpec, PriorSpec
from heavytail.xmin import xmin_posterior

SHORT = TuningConfig(pilot_iters=1000, main_iters=6000, burnin=1000, seed=8)


def write(tmp_path, text, name="d.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_read_raw(tmp_path):
    d = read_counts(write(tmp_path, "1\n1\n3\n"))
    assert d.values.tolist() == [1, 3] and d.counts.tolist() == [2, 1] and d.n == 3


def test_read_pairs(tmp_path):
    d = read_counts(write(tmp_path, "5,2\n2,7\n"), "pairs")
    assert d.values.tolist() == [2, 5] and d.counts.tolist() == [7, 2] and d.n == 9


def test_read_pairs_with_header_and_blanks(tmp_path):
    d = read_counts(write(tmp_path, "value,count\n\n5,2\n5,1\n"), "pairs")
    assert d.values.tolist() == [5] and d.counts.tolist() == [3]


@pytest.mark.parametrize(
    "text,fmt,line",
    [
        ("0\n", "raw", 1),
        ("3\n\nabc\n", "raw", 3),
        ("2.5\n", "raw", 1),
        ("1,2\n3,0\n", "pairs", 2),
        ("1,2\n3\n", "pairs", 2),
        ("1,2\n-4,2\n", "pairs", 2),
    ],
)
def test_read_errors_report_line(tmp_path, text, fmt, line):
    with pytest.raises(DataError) as exc:
        read_counts(write(tmp_path, text), fmt)
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")


def test_read_empty(tmp_path):
    with pytest.raises(DataError):
        read_counts(write(tmp_path, "\n\n"))


def test_read_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        read_counts(write(tmp_path, "1\n"), "json")


@settings(max_examples=50, deadline=None)
@given(obs=st.lists(st.integers(1, 10**9), min_size=1, max_size=200), fmt=st.sampled_from(["raw", "pairs"]))
def test_round_trip(tmp_path_factory, obs, fmt):
    data = CountData.from_observations(obs)
    path = tmp_path_factory.mktemp("rt") / "d.txt"
    write_counts(data, path, fmt)
    assert read_counts(path, fmt) == data


def test_format_counts():
    data = CountData.from_observations([3, 1, 1])
    assert format_counts(data, "raw") == "1\n1\n3\n"
    assert format_counts(data, "pairs") == "value,count\n1,2\n3,1\n"


def test_ecdf_single_point():
    table = ecdf_export(CountData.from_observations([4]))
    assert table.tolist() == [[4.0, 1.0]]


def test_ecdf_against_counting(rng):
    obs = rng.zipf(2.0, size=3000)
    table = ecdf_export(CountData.from_observations(obs))
    assert np.all(np.diff(table[:, 0]) > 0) and np.all(np.diff(table[:, 1]) < 0)
    for x, s in table[:: max(1, len(table) // 50)]:
        assert s == np.sum(obs >= x) / obs.size


def test_spec_round_trip():
    spec = ModelSpec("custom", "lognormal", "logistic", prior=PriorSpec.flat())
    assert spec_from_dict(spec_to_dict(spec)) == spec
    for s in (M1, M2, M3):
        assert spec_from_dict(json.loads(json.dumps(spec_to_dict(s)))) == s


@pytest.fixture(scope="module")
def report_and_data():
    data = CountData.from_observations(sample(1500, M1.make_point([2.5], [0.3, 0.2, 0.0]), seed=1))
    chain = run_mcmc(data, M1, tuning=SHORT, progress=False)
    report = build_fit_report(data, chain, xmin=xmin_posterior(chain), csn=csn_fit(data))
    return json.loads(json.dumps(report)), data, chain


def test_report_validates_against_schema(report_and_data):
    report, _, _ = report_and_data
    jsonschema.validate(report, load_schema())


def test_report_reproducible(report_and_data):
    report, data, _ = report_and_data
    chain = rerun_from_report(report, data)
    again = posterior_summary(chain)
    for name, stats in report["posterior"].items():
        for key, value in stats.items():
            assert again[name][key] == pytest.approx(value, abs=1e-10)


def test_report_rejects_other_data(report_and_data):
    report, _, _ = report_and_data
    with pytest.raises(DataError):
        rerun_from_report(report, CountData.from_observations([1, 2, 3]))


def test_report_fields(report_and_data):
    report, data, chain = report_and_data
    assert report["data"]["n"] == data.n and report["data"]["sha256"] == data.fingerprint()
    assert report["model"]["k"] == 4
    assert report["mcmc"]["n_kept"] == len(chain)
    assert len(report["curves"]["x"]) == data.values.size
    assert report["curves"]["empirical_survival"][0] == 1.0


def test_dump_json_replaces_nonfinite(tmp_path):
    path = tmp_path / "x.json"
    dump_json({"a": float("nan"), "b": [1.0, float("inf")], "c": np.int64(3)}, path)
    assert json.loads(path.read_text()) == {"a": None, "b": [1.0, None], "c": 3}
