import itertools

import numpy as np
import pytest

from regencodes.codec import Codec
from regencodes.errors import CodeConfigError, InsufficientSharesError
from regencodes.shares import CodeConfig, TrafficCounter

DATA = np.random.default_rng(0).bytes(3000)


@pytest.mark.parametrize("scheme", ["rs", "pm", "el", "rl"])
def test_encode_decode_repair(scheme):
    cfg = CodeConfig(scheme, 7, 4, None if scheme == "rs" else 6)
    codec = Codec(cfg, seed=3)
    shares = codec.encode(DATA)
    for idx in itertools.combinations(range(7), 4):
        assert codec.decode([shares[i] for i in idx]) == DATA
    t = TrafficCounter()
    new = codec.repair([s for s in shares if s.node_index != 2], 2, t)
    if scheme != "rl":
        assert new == shares[2]
    pool = shares[:2] + [new] + shares[3:]
    for idx in itertools.combinations(range(7), 4):
        assert codec.decode([pool[i] for i in idx]) == DATA
    assert t.transfers == codec.repair_degree
    per_node = shares[0].payload_bytes()
    expected = 4 * per_node if scheme == "rs" else 6 * per_node // cfg.alpha
    assert t.bytes == expected


def test_rl_decode_without_generator():
    cfg = CodeConfig("rl", 6, 3, 4)
    shares = Codec(cfg, seed=9).encode(DATA)
    assert Codec(cfg, seed=0).decode(shares[3:]) == DATA


def test_repair_validation():
    codec = Codec(CodeConfig("pm", 7, 4, 6))
    shares = codec.encode(DATA)
    with pytest.raises(CodeConfigError):
        codec.repair(shares, 9)
    with pytest.raises(InsufficientSharesError):
        codec.repair(shares, 1)
    with pytest.raises(InsufficientSharesError, match="needs 6 helpers"):
        codec.repair(shares[2:7], 1)


def test_linear_code_only_for_matrix_codes():
    with pytest.raises(CodeConfigError):
        Codec(CodeConfig("rs", 5, 3)).linear_code
