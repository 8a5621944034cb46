"""Reed-Solomon erasure code over GF(2^q), the baseline MDS code.

Each device stores one sub-block per stripe. Repair downloads k whole
shares, decodes the file and re-encodes the lost row.
"""

from __future__ import annotations

import functools

import numpy as np

from . import linalg
from .errors import CodeConfigError, InsufficientSharesError
from .gf import FieldContext, build_field
from .shares import (
    CodeConfig,
    NodeShare,
    Scheme,
    TrafficCounter,
    check_distinct,
    stripe_layout,
    unstripe,
)


class ReedSolomon:
    def __init__(self, config: CodeConfig, field: FieldContext | None = None):
        if config.scheme is not Scheme.RS:
            raise CodeConfigError(f"expected an RS config, got {config.scheme.name}")
        self.config = config
        self.field = field or build_field(config.q)
        if self.field.q != config.q:
            raise CodeConfigError("field width does not match the code config")
        n, k = config.n, config.k
        V = linalg.vandermonde(self.field, linalg.default_points(self.field, n), k)
        if config.systematic:
            V = linalg.mat_mul(self.field, V, linalg.mat_invert(self.field, V[:k]))
        self.matrix = V
        self._inverse = functools.lru_cache(maxsize=64)(self._inverse_uncached)

    def _inverse_uncached(self, idx: tuple) -> np.ndarray:
        return linalg.mat_invert(self.field, self.matrix[list(idx)])

    def encode(self, data: bytes) -> list[NodeShare]:
        D = stripe_layout(self.field, data, self.config.k)
        Y = linalg.apply(self.field, self.matrix, D)
        return [NodeShare(self.config, i, Y[i : i + 1], len(data)) for i in range(self.config.n)]

    def decode_rows(self, shares) -> np.ndarray:
        k = self.config.k
        check_distinct(shares, k)
        shares = sorted(shares, key=lambda s: s.node_index)[:k]
        idx = tuple(s.node_index for s in shares)
        Y = np.concatenate([s.sub_blocks for s in shares], axis=0)
        if self.config.systematic and idx == tuple(range(k)):
            return Y
        return linalg.apply(self.field, self._inverse(idx), Y)

    def decode(self, shares) -> bytes:
        rows = self.decode_rows(shares)
        return unstripe(self.field, rows, shares[0].file_size)

    def repair(self, shares, lost_index: int, traffic: TrafficCounter | None = None) -> NodeShare:
        if any(s.node_index == lost_index for s in shares):
            raise InsufficientSharesError(f"node {lost_index} cannot help repair itself")
        if not 0 <= lost_index < self.config.n:
            raise CodeConfigError(f"lost index {lost_index} out of range")
        k = self.config.k
        check_distinct(shares, k)
        used = sorted(shares, key=lambda s: s.node_index)[:k]
        if traffic is not None:
            for s in used:
                traffic.add(s.payload_bytes())
        D = self.decode_rows(used)
        row = linalg.apply(self.field, self.matrix[lost_index : lost_index + 1], D)
        return NodeShare(self.config, lost_index, row, used[0].file_size)


def rs_encode(config: CodeConfig, data: bytes, field: FieldContext | None = None):
    return ReedSolomon(config, field).encode(data)


def rs_decode(config: CodeConfig, shares, field: FieldContext | None = None) -> bytes:
    return ReedSolomon(config, field).decode(shares)


def rs_repair(config: CodeConfig, shares, lost_index: int, traffic=None, field=None) -> NodeShare:
    return ReedSolomon(config, field).repair(shares, lost_index, traffic)
