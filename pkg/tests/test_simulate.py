import math

import numpy as np
import pytest

from regencodes import costmodel as cm
from regencodes import simulate as sm
from regencodes.costmodel import CostModelError, SystemModel


def consistent(res, m, k=3.0):
    """Within k stderr, plus the shift one event can cause (rare states may never be drawn)."""
    one_event = m.n * float(m.lam) * float(m.M) / res.repairs_executed
    return abs(res.mean_cost - res.analytic_cost) <= k * res.stderr + one_event


@pytest.mark.parametrize("p", [0.7, 0.9, 0.99])
@pytest.mark.parametrize("d", [16, 20, 25, 29])
def test_grid_within_three_stderr(p, d):
    m = SystemModel(32, 16, d, p)
    res = sm.run_simulation(sm.SimConfig(m, trials=20, events=50_000, seed=7))
    assert consistent(res, m), (res.mean_cost, res.analytic_cost, res.stderr)


def test_deterministic_limit():
    res = sm.run_simulation(sm.SimConfig(SystemModel(32, 16, 29, 1.0), trials=3, events=1000))
    gamma = cm.msr_point(64.0, 16, 29)[2]
    assert res.mean_cost == pytest.approx(32 * gamma)
    assert res.delayed_fraction == 0


def test_same_seed_same_result():
    cfg = sm.SimConfig(SystemModel(32, 16, 25, 0.8), trials=4, events=2000, seed=42)
    a, b = sm.run_simulation(cfg), sm.run_simulation(cfg)
    assert a.to_dict() == b.to_dict() and a.to_csv() == b.to_csv()
    c = sm.run_simulation(sm.SimConfig(SystemModel(32, 16, 25, 0.8), trials=4, events=2000, seed=43))
    assert c.mean_cost != a.mean_cost


def test_delayed_fraction_tracks_probability():
    res = sm.run_simulation(sm.SimConfig(SystemModel(32, 16, 20, 0.5), trials=5, events=40_000, seed=3))
    want = 1 - cm.availability(31, 16, 0.5)
    draws = res.repairs_executed / (1 - res.delayed_fraction)
    se = math.sqrt(want * (1 - want) / draws)
    assert abs(res.delayed_fraction - want) <= 3 * se


def test_horizon_mode():
    cfg = sm.SimConfig(SystemModel(32, 16, 29, 0.9), horizon_days=2000, trials=10, seed=5)
    res = sm.run_simulation(cfg)
    assert res.repairs_executed == pytest.approx(10 * 32 * 2000, rel=0.01)
    assert consistent(res, cfg.model)


@pytest.mark.parametrize("law", ["survivors", "literal"])
@pytest.mark.parametrize("point", ["mbr", "arc"])
def test_points_and_laws(law, point):
    cfg = sm.SimConfig(SystemModel(32, 16, 24, 0.85), trials=10, events=20_000, seed=11, point=point, law=law)
    assert consistent(sm.run_simulation(cfg), cfg.model)


def test_literal_full_state_optimal():
    cfg = sm.SimConfig(SystemModel(16, 8, 12, 0.95), trials=10, events=20_000, law="literal", full_state="optimal")
    table = sm.cost_table(cfg)
    assert table[16] == table[15]
    res = sm.run_simulation(cfg)
    assert consistent(res, cfg.model)
    # X = n is not a delay even though the conditioned law excludes it
    resampled = sm.run_simulation(sm.SimConfig(cfg.model, trials=2, events=5000, law="literal"))
    assert resampled.delayed_fraction < 0.01


def test_csv_schema():
    res = sm.run_simulation(sm.SimConfig(SystemModel(32, 16, 29, 0.99), trials=2, events=100))
    assert res.to_csv().splitlines()[0] == ",".join(sm.CSV_COLUMNS)


def test_seeds_are_independent_streams():
    seeds = sm.trial_seeds(0, 8)
    assert len(set(seeds)) == 8 and seeds == sm.trial_seeds(0, 8)


def test_validation():
    m = SystemModel(32, 16, 29, 0.99)
    for kw in ({"trials": 0}, {"events": 0}, {"law": "x"}, {"point": "ecc"}, {"full_state": "y"}):
        with pytest.raises(CostModelError):
            sm.SimConfig(m, **kw)
    with pytest.raises(CostModelError):
        sm.SimConfig(m, horizon_days=0)
    assert np.isnan(sm.cost_table(sm.SimConfig(m))[:16]).all()
