import csv
import io

import pytest

from regencodes import bench
from regencodes.shares import CodeConfig


@pytest.fixture(scope="module")
def small_run():
    grid = bench.default_grid(ks=(2, 3))
    return bench.run_bench(grid, reps=2, M=64 * 1024, seed=1)


def test_grid_shape(small_run):
    assert len(small_run) == 2 * 4 * 3
    assert {p.scheme for p in small_run} == {"RS", "PM", "EL", "RL"}
    assert {p.phase for p in small_run} == set(bench.PHASES)
    for p in small_run:
        assert p.min_s <= p.median_s <= p.max_s and p.reps == 2
        assert p.n == 2 * p.k and (p.scheme == "RS" or p.d == 2 * p.k - 2)


def test_csv_stable_schema(small_run):
    text = bench.points_to_csv(small_run)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == bench.CSV_COLUMNS
    assert len(rows) == len(small_run)
    assert rows[0]["host"]


def test_systematic_grid_skips_rl():
    grid = bench.default_grid(ks=(4,), systematic=True)
    assert [c.scheme.name for c in grid] == ["RS", "PM", "EL"]
    pts = bench.run_bench(grid, phases=("decode",), reps=1, M=4096)
    assert all(p.label.startswith("S-") for p in pts)


def test_unbuildable_config_is_skipped():
    skipped = []
    bad = CodeConfig("pm", 5, 4, 4)
    pts = bench.run_bench([bad, CodeConfig("rs", 5, 4)], phases=("encode",), reps=1, M=4096, skipped=skipped)
    assert len(pts) == 1 and len(skipped) == 1 and "EL/RL" in skipped[0].reason
    with pytest.raises(Exception):
        bench.run_bench([bad], reps=1, M=4096)
    with pytest.raises(ValueError):
        bench.run_bench([], phases=("verify",))


def test_linear_fit_and_ratios(small_run):
    a, b, r2 = bench.linear_fit([1, 2, 3], [2.0, 4.0, 6.0])
    assert (a, b, r2) == pytest.approx((2.0, 0.0, 1.0))
    r = bench.ratios(small_run)
    assert set(r) == {"encode PM/RS", "decode PM/RS"}
    assert r["encode PM/RS"] == pytest.approx(
        bench.median_of(small_run, "PM", "encode") / bench.median_of(small_run, "RS", "encode")
    )
    with pytest.raises(KeyError):
        bench.median_of(small_run, "S-RS", "encode")
