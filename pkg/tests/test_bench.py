import json

import pytest

from qtau.bench import TIMING_KEYS, bench_body, run_bench
from qtau.errors import UsageError
from qtau.partitions import enumerate_strict
from qtau.plotting import plot_bench


@pytest.fixture(scope="module")
def small():
    return run_bench(max_weight=10, min_weight=2, repeats=1)


def test_warm_run_needs_no_pfaffians(small):
    t = small["totals"]
    assert t["warm_pfaffian_evaluations"] == 0
    assert t["cold_pfaffian_evaluations"] > 0
    # Q of the empty partition is seeded as 1 and never stored
    assert t["warm_cache_hits"] == t["partitions"] - 1


def test_levels_shape(small):
    weights = [lv["weight"] for lv in small["levels"]]
    assert weights == list(range(2, 11))
    for lv in small["levels"]:
        assert lv["partitions"] == len(enumerate_strict(lv["weight"]))
        assert lv["max_terms"] <= lv["terms"]
        assert lv["assembled_terms"] > 0
    terms = [lv["terms"] for lv in small["levels"]]
    assert terms == sorted(terms)


def test_body_is_deterministic(small, tmp_path):
    again = run_bench(max_weight=10, min_weight=2, repeats=2, cache_dir=tmp_path)
    assert bench_body(small) == bench_body(again)
    body = json.loads(bench_body(small))
    assert not any(k in body["totals"] for k in TIMING_KEYS)
    assert list(tmp_path.iterdir()) == []  # scratch stores are removed


def test_parallel_body_matches(small):
    assert bench_body(run_bench(max_weight=10, min_weight=2, threads=2, repeats=1)) == bench_body(small)


def test_plot(small, tmp_path):
    assert plot_bench(small, tmp_path / "b.png").stat().st_size > 0


@pytest.mark.parametrize("kw", [dict(max_weight=3, min_weight=4), dict(max_weight=300),
                                dict(threads=0), dict(repeats=0)])
def test_bad_arguments(kw):
    with pytest.raises(UsageError):
        run_bench(**kw)
