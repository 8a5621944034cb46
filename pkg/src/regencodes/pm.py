"""Product-matrix MSR code with exact repair from d = 2k - 2 helpers.

Per stripe the message is two symmetric alpha x alpha matrices S1, S2
(alpha = k - 1) packed from ``k * alpha`` source symbols, upper triangle
row-major. Node i stores the row ``phi_i^T S1 + lambda_i phi_i^T S2``
where ``phi_i = (1, x_i, ..., x_i^(alpha-1))`` and ``lambda_i = x_i^alpha``,
which makes the node's full encoding vector ``psi_i`` a Vandermonde row of
length d.

Encoding and decoding run stripe by stripe in compiled loops; repair
goes through the generic ``linalg.apply`` kernel.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import kernels, linalg
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


@dataclass
class RepairPacket:
    """One helper's contribution to a repair: beta = 1 symbol per stripe."""

    helper_index: int
    failed_index: int
    symbols: np.ndarray
    file_size: int

    @property
    def nbytes(self) -> int:
        return self.symbols.nbytes


def check_pm_params(n: int, k: int, d: int):
    if k < 2:
        raise CodeConfigError("product-matrix MSR needs k >= 2")
    if n < 2 * k - 1:
        raise CodeConfigError(
            f"product-matrix MSR requires d=2k-2={2 * k - 2} helpers to exist "
            f"(n >= {2 * k - 1}, got n={n}); use EL/RL with a smaller d or RS instead"
        )
    if d != 2 * k - 2:
        raise CodeConfigError(
            f"product-matrix MSR is built for d = 2k-2 = {2 * k - 2}, got d={d}"
        )


class ProductMatrixMSR:
    def __init__(self, config: CodeConfig, field: FieldContext | None = None):
        check_pm_params(config.n, config.k, config.d)
        self.config = config
        self.field = f = field or build_field(config.q)
        n, k = config.n, config.k
        self.alpha = a = k - 1
        self.d = 2 * a
        self.half = a * (a + 1) // 2

        self.points = linalg.default_points(f, n)
        self.phi = linalg.vandermonde(f, self.points, a)
        self.psi = linalg.vandermonde(f, self.points, self.d)
        self.lam = [f.pow(x, a) for x in self.points]
        if len(set(self.lam)) != n:
            raise CodeConfigError(
                f"lambda_i = x_i^{a} are not distinct for n={n} in GF(2^{f.q}); "
                "use a larger field"
            )

        tri = np.zeros((a, a), dtype=np.intp)
        t = 0
        for r in range(a):
            for c in range(r, a):
                tri[r, c] = tri[c, r] = t
                t += 1
        self.tri = tri
        self._upper = [(r, c) for r in range(a) for c in range(r, a)]
        self._up_r = np.array([r for r, _ in self._upper], dtype=np.intp)
        self._up_c = np.array([c for _, c in self._upper], dtype=np.intp)
        self._inv_cache = functools.lru_cache(maxsize=256)(self._invert)
        self._plan_cache = functools.lru_cache(maxsize=64)(self._decode_plan)

    def _invert(self, which: str, idx: tuple) -> np.ndarray:
        src = self.phi if which == "phi" else self.psi
        return linalg.mat_invert(self.field, src[list(idx)])

    # -- message <-> node rows ---------------------------------------------

    def encode_message(self, msg: np.ndarray, nodes=None) -> np.ndarray:
        """Node rows for a packed message ``(k*alpha, S)``; returns ``(len(nodes), alpha, S)``."""
        f = self.field
        nodes = list(range(self.config.n) if nodes is None else nodes)
        lphi = np.ascontiguousarray(f.log_ext[self.phi[nodes]])
        llam = f.log_ext[np.array([self.lam[i] for i in nodes], dtype=f.dtype)]
        xt = np.ascontiguousarray(msg.T, dtype=f.dtype)
        return kernels.pm_encode(
            xt, self.half, lphi, llam, self._up_r, self._up_c, f.log_ext, f.exp_ext
        )

    def _decode_plan(self, idx: tuple):
        f = self.field
        a, k = self.alpha, self.config.k
        lam = [self.lam[i] for i in idx]
        lpair = np.full((k, k), f.zero_log, dtype=np.int32)
        for i in range(k):
            for j in range(i + 1, k):
                lpair[i, j] = lpair[j, i] = f.log(f.inv(lam[i] ^ lam[j]))
        others = np.array([[j for j in range(k) if j != m] for m in range(a)], dtype=np.intp)
        lw = np.stack(
            [f.log_ext[self._inv_cache("phi", tuple(idx[j] for j in others[m]))] for m in range(a)]
        )
        return (
            np.ascontiguousarray(f.log_ext[self.phi[list(idx)]]),
            lpair,
            f.log_ext[np.array(lam, dtype=f.dtype)],
            others,
            np.ascontiguousarray(lw),
            np.ascontiguousarray(f.log_ext[self._inv_cache("phi", idx[:a])]),
        )

    def decode_message(self, rows: np.ndarray, idx) -> np.ndarray:
        """Recover the packed message from the rows ``(k, alpha, S)`` of nodes ``idx``.

        Pairing the rows of nodes i and j gives ``P_ij + lambda_i Q_ij`` and
        ``P_ij + lambda_j Q_ij``, which separates the contributions of S1
        and S2; the first alpha nodes then pin down both matrices.
        """
        f = self.field
        plan = self._plan_cache(tuple(int(i) for i in idx))
        yt = np.ascontiguousarray(rows.transpose(2, 0, 1), dtype=f.dtype)
        return kernels.pm_decode(
            yt, *plan, self._up_r, self._up_c, f.log_ext, f.exp_ext, f.zero_log
        )

    # -- public codec ---------------------------------------------------------

    def precode(self, data: bytes) -> np.ndarray:
        """Message whose encoding puts the raw data on nodes 0..k-1."""
        k, a = self.config.k, self.alpha
        D = stripe_layout(self.field, data, k * a)
        return self.decode_message(D.reshape(k, a, -1), range(k))

    def encode(self, data: bytes) -> list[NodeShare]:
        cfg = self.config
        k, a = cfg.k, self.alpha
        D = stripe_layout(self.field, data, k * a)
        if cfg.systematic:
            msg = self.decode_message(D.reshape(k, a, -1), range(k))
            parity = self.encode_message(msg, range(k, cfg.n))
            rows = list(D.reshape(k, a, -1)) + list(parity)
        else:
            rows = list(self.encode_message(D))
        return [NodeShare(cfg, i, rows[i], len(data)) for i in range(cfg.n)]

    def decode_rows(self, shares) -> np.ndarray:
        cfg = self.config
        k, a = cfg.k, self.alpha
        check_distinct(shares, k)
        shares = sorted(shares, key=lambda s: s.node_index)[:k]
        idx = [s.node_index for s in shares]
        Y = np.stack([s.sub_blocks for s in shares])
        if cfg.systematic and idx == list(range(k)):
            return Y.reshape(k * a, -1)
        msg = self.decode_message(Y, idx)
        if not cfg.systematic:
            return msg
        return self.encode_message(msg, range(k)).reshape(k * a, -1)

    def decode(self, shares) -> bytes:
        return unstripe(self.field, self.decode_rows(shares), shares[0].file_size)

    def repair_extract(self, helper: NodeShare, failed_index: int) -> RepairPacket:
        if helper.node_index == failed_index:
            raise InsufficientSharesError("a node cannot help repair itself")
        sym = linalg.apply(self.field, self.phi[failed_index : failed_index + 1], helper.sub_blocks)
        return RepairPacket(helper.node_index, failed_index, sym, helper.file_size)

    def repair_rebuild(self, packets, failed_index: int, traffic: TrafficCounter | None = None) -> NodeShare:
        a = self.alpha
        if len(packets) != self.d:
            raise InsufficientSharesError(
                f"exact repair needs exactly d={self.d} packets, got {len(packets)}"
            )
        packets = sorted(packets, key=lambda p: p.helper_index)
        helpers = tuple(p.helper_index for p in packets)
        if len(set(helpers)) != len(helpers):
            raise InsufficientSharesError(f"duplicate helpers {helpers}")
        if failed_index in helpers or any(p.failed_index != failed_index for p in packets):
            raise InsufficientSharesError("packets were not extracted for this failure")
        if traffic is not None:
            for p in packets:
                traffic.add(p.nbytes)
        inv = self._inv_cache("psi", helpers)
        # [S1 phi_f; S2 phi_f] = Psi_H^-1 p ; lost row = S1 phi_f + lambda_f S2 phi_f
        combine = np.concatenate(
            [linalg.identity(self.field, a), np.eye(a, dtype=self.field.dtype) * self.lam[failed_index]],
            axis=1,
        )
        R = linalg.mat_mul(self.field, combine, inv)
        stacked = np.concatenate([p.symbols for p in packets])
        row = linalg.apply(self.field, R, stacked)
        return NodeShare(self.config, failed_index, row, packets[0].file_size)

    def repair(self, helpers, failed_index: int, traffic: TrafficCounter | None = None) -> NodeShare:
        packets = [self.repair_extract(h, failed_index) for h in helpers]
        return self.repair_rebuild(packets, failed_index, traffic)


@functools.lru_cache(maxsize=32)
def _code(config: CodeConfig, field: FieldContext | None) -> ProductMatrixMSR:
    return ProductMatrixMSR(config, field)


def _pm_config(config: CodeConfig) -> CodeConfig:
    if config.scheme is not Scheme.PM:
        raise CodeConfigError(f"expected a PM config, got {config.scheme.name}")
    return config


def pm_encode(config: CodeConfig, data: bytes, field=None) -> list[NodeShare]:
    return _code(_pm_config(config), field).encode(data)


def pm_decode(config: CodeConfig, shares, field=None) -> bytes:
    return _code(_pm_config(config), field).decode(shares)


def pm_repair_extract(config: CodeConfig, helper: NodeShare, failed_index: int, field=None) -> RepairPacket:
    return _code(_pm_config(config), field).repair_extract(helper, failed_index)


def pm_repair_rebuild(config: CodeConfig, packets, failed_index: int, traffic=None, field=None) -> NodeShare:
    return _code(_pm_config(config), field).repair_rebuild(packets, failed_index, traffic)


def pm_systematic_precode(config: CodeConfig, data: bytes, field=None) -> np.ndarray:
    return _code(config, field).precode(data)
