import math
from fractions import Fraction as F

import numpy as np
import pytest

from regencodes import costmodel as cm
from regencodes.costmodel import CostModelError, SystemModel


def oracle_cost(n, k, d, p, lam, M, point, trials):
    """Direct conditioned expectation with rationals, states k..n-1."""
    pmf = {i: math.comb(trials, i) * p**i * (1 - p) ** (trials - i) for i in range(k, n)}
    if point == "msr":
        gamma = F(M) * d / (k * (d - k + 1))
    else:
        gamma = F(2 * M) * d / (k * (2 * d - k + 1))
    num = sum(pr * (M if i < d else gamma) for i, pr in pmf.items())
    return n * lam * num / sum(pmf.values())


def test_availability_examples():
    assert cm.availability(2, 1, 0.5) == pytest.approx(0.75)
    assert cm.availability(7, 0, 0.3) == pytest.approx(1.0)
    p = F(7, 10)
    direct = sum(math.comb(32, i) * p**i * (1 - p) ** (32 - i) for i in range(16, 33))
    assert cm.availability(32, 16, p) == direct
    assert cm.availability(32, 16, 0.7) == pytest.approx(float(direct), rel=1e-12)


def test_availability_monotone():
    ps = [F(i, 20) for i in range(1, 20)]
    q = F(3, 5)
    for k in (1, 4, 8):
        for n in range(k + 1, 20):
            a = [cm.availability(n, k, p) for p in ps]
            assert all(x <= y for x, y in zip(a, a[1:]))
            assert cm.availability(n + 1, k, q) >= cm.availability(n, k, q)
            assert cm.availability(n, k + 1, q) <= cm.availability(n, k, q)


def test_operating_points():
    assert cm.msr_point(64, 16, 16)[2] == 64
    assert cm.msr_point(64.0, 16, 29)[2] == pytest.approx(64 * 29 / (16 * 14))
    alpha, _, gamma = cm.mbr_point(F(64), 16, 16, exact=True)
    assert alpha == gamma == F(2 * 64, 17)
    with pytest.raises(CostModelError):
        cm.optimal_gamma("mrs", 64, 16, 20)


@pytest.mark.parametrize("law,trials", [("survivors", 31), ("literal", 32)])
@pytest.mark.parametrize("point", ["msr", "mbr"])
@pytest.mark.parametrize("p", [F(1, 2), F(7, 10), F(99, 100)])
def test_matches_exact_oracle(law, trials, point, p):
    for d in (16, 22, 29, 31):
        rep = cm.system_repair_cost(SystemModel(32, 16, d, p, 1, 64, point), law)
        assert rep.expected_cost == oracle_cost(32, 16, d, p, 1, 64, point, trials)
        flt = cm.system_repair_cost(SystemModel(32, 16, d, float(p), 1.0, 64.0, point), law)
        assert flt.expected_cost == pytest.approx(float(rep.expected_cost), rel=1e-10)
        assert rep.decode_term + rep.optimal_term == rep.expected_cost


def test_limits():
    rep = cm.system_repair_cost(SystemModel(32, 16, 29, 1.0))
    assert rep.expected_cost == pytest.approx(32 * 64 * 29 / (16 * 14))
    for p in (0.5, 0.9, 0.99):
        ecc = cm.system_repair_cost(SystemModel(32, 16, 16, p))
        assert ecc.expected_cost == pytest.approx(32 * 64)
        assert ecc.decode_term == 0


def test_golden_optima():
    assert cm.optimize_d(32, 16, 0.99, point="msr")[0] == 29
    assert cm.optimize_d(32, 16, 0.99, point="mbr")[0] == 28
    assert cm.optimize_d(32, 16, 0.7, point="msr")[0] == 19
    assert cm.optimize_d(32, 16, 0.7, point="mbr")[0] == 16


@pytest.mark.parametrize("p", [0.5, 0.7, 0.9, 0.99])
@pytest.mark.parametrize("point", ["msr", "mbr"])
def test_interior_optimum(p, point):
    assert cm.optimize_d(32, 16, p, point=point)[0] < 31


def test_cost_doubles_at_full_degree():
    p = F(99, 100)
    c31 = cm.system_repair_cost(SystemModel(32, 16, 31, p)).expected_cost
    c29 = cm.system_repair_cost(SystemModel(32, 16, 29, p)).expected_cost
    assert isinstance(c31, F) and c31 / c29 > 2


def test_mbr_at_d_equal_k_stays_close():
    # MBR with d = k is within 40% of its optimum, while MSR with d = k is several times off
    for p in np.arange(0.70, 0.9901, 0.01):
        _, mbr = cm.optimize_d(32, 16, p, point="mbr")
        dk = cm.system_repair_cost(SystemModel(32, 16, 16, p, point="mbr")).expected_cost
        assert dk / mbr.expected_cost < 1.4
    assert cm.improvement_over_ecc(32, 16, 0.99, "msr") > 5


def test_optimize_n():
    for k in (4, 8, 16):
        n, d, _ = cm.optimize_n(k, 1.0, point="msr")
        assert abs(n - cm.n_opt_closed_form(k)) <= 1
        assert d == n - 1
        for p in (0.7, 0.99):
            assert cm.optimize_n(k, p, point="mbr")[:2] == (k + 1, k)
    with pytest.raises(CostModelError):
        cm.optimize_n(4, 0.9, n_max=4)


def test_arc_worked_case_k2():
    M = F(64)
    assert cm.arc_gamma(3, 2, M, exact=True) / 3 == M / 4
    assert cm.arc_gamma(4, 2, M, exact=True) / 4 == M / 6
    assert cm.arc_gamma(2, 2, M, exact=True) == M


def test_arc_lcm_delta_equals_ideal():
    lcm = cm.ideal_arc_delta(32, 16)
    assert lcm == math.lcm(*range(1, 17))
    for p in (0.6, 0.9):
        a = cm.arc_system_cost(32, 16, p, delta=lcm).expected_cost
        b = cm.arc_system_cost(32, 16, p).expected_cost
        assert a == pytest.approx(b, rel=1e-12)


def test_arc_never_worse_than_msr():
    for p in (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999):
        assert cm.arc_savings(32, 16, p) >= 0
    assert cm.arc_savings(32, 16, 0.8, delta=cm.arc_delta(32, 16, 4)) > cm.arc_savings(
        32, 16, 0.8, delta=cm.arc_delta(32, 16, 1)
    )


def test_compare_schemes():
    pts = cm.compare_schemes(16, 0.9, targets=[1e-2, 1e-4], sweep=16)
    rep = [t for t in pts if t.scheme == "REP"]
    for t in rep:
        assert t.unavailability == pytest.approx(0.1**t.n)
        assert t.storage_total == pytest.approx(t.n * 64)
    for t in [t for t in pts if t.scheme == "ECC"]:
        msr_k = cm.system_repair_cost(SystemModel(t.n, 16, 16, 0.9)).expected_cost
        assert t.repair_bandwidth == pytest.approx(msr_k)
    regen = [t for t in pts if t.scheme in ("MSR", "MBR", "ARC")]
    for target in (1e-2, 1e-4):
        for t in pts:
            if t.target == target and t.scheme in ("REP", "ECC"):
                assert cm.dominated(t, [r for r in regen if r.target == target])
    assert not any(t.scheme == "TWIN" for t in pts)
    twin = cm.compare_schemes(16, 0.9, targets=[1e-2], twin_availability=cm.availability)
    assert any(t.scheme == "TWIN" for t in twin)


def test_rep_competitive_at_loose_target():
    pts = cm.compare_schemes(16, 0.9, targets=[1e-1], sweep=16)
    regen = [t for t in pts if t.scheme in ("MSR", "MBR", "ARC")]
    assert not all(cm.dominated(t, regen) for t in pts if t.scheme == "REP")


def test_scale_and_csv():
    assert cm.scale_cost(100.0, files=3, M=32.0, lam=2.0) == pytest.approx(300.0)
    rep = cm.system_repair_cost(SystemModel(32, 16, 29, 0.99))
    text = cm.reports_to_csv([rep, rep])
    lines = text.strip().splitlines()
    assert lines[0] == ",".join(cm.CSV_COLUMNS)
    assert len(lines) == 3 and lines[1] == lines[2]


def test_validation():
    with pytest.raises(CostModelError):
        SystemModel(32, 16, 32, 0.9)
    with pytest.raises(CostModelError):
        SystemModel(32, 16, 20, 0.0)
    with pytest.raises(CostModelError):
        SystemModel(32, 16, 20, 0.9, point="arc")
    with pytest.raises(CostModelError):
        cm.repair_states(32, 16, 0.9, law="other")
    with pytest.raises(CostModelError):
        cm.system_repair_cost(SystemModel(32, 16, 20, 1e-300))
