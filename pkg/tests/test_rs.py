import itertools

import numpy as np
import pytest

from regencodes.errors import CodeConfigError, InsufficientSharesError
from regencodes.rs import ReedSolomon, rs_decode, rs_encode, rs_repair
from regencodes.shares import CodeConfig, TrafficCounter


def payload(size, seed=0):
    return np.random.default_rng(seed).bytes(size)


def test_k1_is_replication():
    data = payload(101)
    a, b = rs_encode(CodeConfig("rs", 2, 1), data)
    assert np.array_equal(a.sub_blocks, b.sub_blocks)
    assert a.sub_blocks.tobytes()[:101] == data


def test_systematic_shares_hold_padded_data():
    cfg = CodeConfig("rs", 4, 2, systematic=True)
    data = payload(37)
    shares = rs_encode(cfg, data)
    raw = shares[0].sub_blocks.tobytes() + shares[1].sub_blocks.tobytes()
    assert raw[:37] == data and not any(raw[37:])
    assert rs_decode(cfg, shares[:2]) == data


@pytest.mark.parametrize("n,k,systematic", [(6, 4, False), (8, 3, True), (8, 5, False)])
def test_any_k_decode(n, k, systematic):
    cfg = CodeConfig("rs", n, k, systematic=systematic)
    data = payload(1000 + n)
    shares = rs_encode(cfg, data)
    for idx in itertools.combinations(range(n), k):
        assert rs_decode(cfg, [shares[i] for i in idx]) == data


def test_too_few_shares():
    cfg = CodeConfig("rs", 6, 4)
    shares = rs_encode(cfg, payload(64))
    with pytest.raises(InsufficientSharesError, match="insufficient shares"):
        rs_decode(cfg, shares[:3])
    with pytest.raises(InsufficientSharesError):
        rs_decode(cfg, [shares[0]] * 4)


@pytest.mark.parametrize("systematic", [False, True])
def test_repair_exact_and_rejoins(systematic):
    n, k = 7, 4
    cfg = CodeConfig("rs", n, k, systematic=systematic)
    data = payload(4000)
    shares = rs_encode(cfg, data)
    for lost in range(n):
        helpers = [s for s in shares if s.node_index != lost]
        t = TrafficCounter()
        new = rs_repair(cfg, helpers, lost, traffic=t)
        assert new == shares[lost]
        # traffic equals the file: k shares, each M/k
        assert t.bytes == k * shares[0].payload_bytes()
        pool = shares[:lost] + [new] + shares[lost + 1 :]
        for idx in itertools.combinations(range(n), k):
            assert rs_decode(cfg, [pool[i] for i in idx]) == data


def test_systematic_repair_is_data_stripe():
    cfg = CodeConfig("rs", 5, 3, systematic=True)
    data = payload(600)
    shares = rs_encode(cfg, data)
    new = rs_repair(cfg, shares[1:], 0)
    assert new.sub_blocks.tobytes() == data[:200]


def test_irregular_lengths():
    cfg = CodeConfig("rs", 5, 3)
    for size in (1, 2, 5, 6, 7, 1023):
        data = payload(size, size)
        assert rs_decode(cfg, rs_encode(cfg, data)[2:]) == data


def test_wrong_scheme_and_field():
    with pytest.raises(CodeConfigError):
        ReedSolomon(CodeConfig("pm", 7, 4, 6))
    with pytest.raises(CodeConfigError):
        CodeConfig("rs", 300, 4, q=8)
