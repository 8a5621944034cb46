"""Linear regenerating codes driven by an explicit generator matrix.

Both flavours store a ``(k*alpha) x (n*alpha)`` generator ``G``; node i
owns columns ``i*alpha .. i*alpha + alpha - 1`` and stores ``G_i^T x`` for
the message vector ``x`` of each stripe.

* EL (exact linear): ``G`` is the product-matrix MSR code written out as
  a flat matrix, so shares match PM shares symbol for symbol and repair
  is exact.
* RL (random linear): ``G`` is uniformly random. Repair is functional:
  the newcomer stores fresh random combinations, and every share carries
  its own coefficient rows so decodability can be checked later.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import CodeConfigError, InsufficientSharesError, SingularMatrixError, UndecodableError
from .gf import FieldContext, build_field
from .pm import ProductMatrixMSR, RepairPacket, check_pm_params
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
class LinearCode:
    config: CodeConfig
    field: FieldContext
    generator: np.ndarray
    seed: int | None = None
    pm: ProductMatrixMSR | None = None

    def __post_init__(self):
        self.alpha = self.config.alpha
        self.gen_t = np.ascontiguousarray(self.generator.T)
        self._inverse = functools.lru_cache(maxsize=64)(self._inverse_uncached)

    @property
    def message_symbols(self) -> int:
        return self.generator.shape[0]

    def node_columns(self, i: int) -> np.ndarray:
        """The ``(alpha, k*alpha)`` block of ``G^T`` for node i."""
        a = self.alpha
        return self.gen_t[i * a : (i + 1) * a]

    def density(self) -> float:
        return float(np.count_nonzero(self.generator)) / self.generator.size

    def _inverse_uncached(self, idx: tuple) -> np.ndarray:
        C = np.concatenate([self.node_columns(i) for i in idx])
        return linalg.mat_invert(self.field, C)


def el_build(config: CodeConfig, field: FieldContext | None = None) -> LinearCode:
    """Flatten the product-matrix encoder into an explicit generator."""
    if config.scheme is not Scheme.EL:
        raise CodeConfigError(f"expected an EL config, got {config.scheme.name}")
    check_pm_params(config.n, config.k, config.d)
    return _el_build_cached(config, field or build_field(config.q))


@functools.lru_cache(maxsize=16)
def _el_build_cached(config: CodeConfig, field: FieldContext) -> LinearCode:
    pm = ProductMatrixMSR(config, field)
    n, a, d, h = config.n, pm.alpha, pm.d, pm.half
    G = np.zeros((config.k * a, n * a), dtype=field.dtype)
    for i in range(n):
        for j in range(a):
            col = i * a + j
            for r in range(d):
                b = int(pm.tri[r % a, j]) + (h if r >= a else 0)
                G[b, col] ^= pm.psi[i, r]
    if config.systematic:
        B = config.k * a
        G = linalg.mat_mul(field, linalg.mat_invert(field, G[:, :B]), G)
    G.flags.writeable = False
    return LinearCode(config, field, G, pm=pm)


def rl_build(
    config: CodeConfig,
    seed: int = 0,
    field: FieldContext | None = None,
    check_subsets: int = 100,
    max_retries: int = 8,
) -> LinearCode:
    """Draw a random generator and verify decodability on sampled k-subsets."""
    if config.scheme is not Scheme.RL:
        raise CodeConfigError(f"expected an RL config, got {config.scheme.name}")
    field = field or build_field(config.q)
    n, k, a = config.n, config.k, config.alpha
    B = k * a
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        G = rng.integers(1, field.size, size=(B, n * a)).astype(field.dtype)
        code = LinearCode(config, field, G, seed=seed)
        if all(
            linalg.mat_rank(field, np.concatenate([code.node_columns(i) for i in idx])) == B
            for idx in _sample_subsets(n, k, check_subsets, rng)
        ):
            return code
    raise CodeConfigError(
        f"no decodable random generator after {max_retries} draws; "
        f"GF(2^{field.q}) is too small for n={n}, k={k}"
    )


def rl_shell(config: CodeConfig, field: FieldContext | None = None) -> LinearCode:
    """An RL code without a generator, enough to decode or repair RL shares.

    RL shares carry their own coefficient rows, so reading them back does
    not require redrawing the generator.
    """
    field = field or build_field(config.q)
    empty = np.zeros((config.message_symbols, 0), dtype=field.dtype)
    return LinearCode(config, field, empty)


def _sample_subsets(n: int, k: int, count: int, rng) -> list[tuple]:
    if math.comb(n, k) <= count:
        return list(itertools.combinations(range(n), k))
    seen = set()
    while len(seen) < count:
        seen.add(tuple(sorted(rng.choice(n, size=k, replace=False).tolist())))
    return sorted(seen)


def lin_encode(code: LinearCode, data: bytes) -> list[NodeShare]:
    cfg, f = code.config, code.field
    D = stripe_layout(f, data, code.message_symbols)
    Y = linalg.apply(f, code.gen_t, D)
    a = code.alpha
    rl = cfg.scheme is Scheme.RL
    return [
        NodeShare(
            cfg,
            i,
            Y[i * a : (i + 1) * a],
            len(data),
            coeff_rows=code.node_columns(i).copy() if rl else None,
        )
        for i in range(cfg.n)
    ]


def _coefficients(code: LinearCode, share: NodeShare) -> np.ndarray:
    if share.coeff_rows is not None:
        return share.coeff_rows
    return code.node_columns(share.node_index)


def lin_decode_rows(code: LinearCode, shares, max_attempts: int = 32) -> np.ndarray:
    cfg, f = code.config, code.field
    k = cfg.k
    check_distinct(shares, k)
    shares = sorted(shares, key=lambda s: s.node_index)
    if cfg.systematic and [s.node_index for s in shares[:k]] == list(range(k)):
        return np.concatenate([s.sub_blocks for s in shares[:k]])
    for attempt, subset in enumerate(itertools.combinations(shares, k)):
        if attempt >= max_attempts:
            break
        Y = np.concatenate([s.sub_blocks for s in subset])
        try:
            if cfg.scheme is Scheme.RL:
                inv = linalg.mat_invert(f, np.concatenate([_coefficients(code, s) for s in subset]))
            else:
                inv = code._inverse(tuple(s.node_index for s in subset))
        except SingularMatrixError:
            continue
        return linalg.apply(f, inv, Y)
    raise UndecodableError("undecodable set, need different k-subset")


def lin_decode(code: LinearCode, shares, max_attempts: int = 32) -> bytes:
    rows = lin_decode_rows(code, shares, max_attempts)
    return unstripe(code.field, rows, shares[0].file_size)


def el_repair_extract(code: LinearCode, helper: NodeShare, failed_index: int) -> RepairPacket:
    return code.pm.repair_extract(helper, failed_index)


def el_repair(code: LinearCode, packets, failed_index: int, traffic: TrafficCounter | None = None) -> NodeShare:
    """Exact rebuild through the product-matrix repair equations."""
    if code.pm is None:
        raise CodeConfigError("exact repair is only defined for EL codes")
    return code.pm.repair_rebuild(packets, failed_index, traffic)


def rl_repair(
    code: LinearCode,
    helpers,
    failed_index: int,
    seed: int = 0,
    traffic: TrafficCounter | None = None,
) -> NodeShare:
    """Functional repair: each of d helpers sends one random combination."""
    cfg, f = code.config, code.field
    d, a = cfg.d, code.alpha
    if any(h.node_index == failed_index for h in helpers):
        raise InsufficientSharesError(f"node {failed_index} cannot help repair itself")
    check_distinct(helpers, d)
    helpers = sorted(helpers, key=lambda s: s.node_index)[:d]
    rng = np.random.default_rng(seed)
    packets, coeff_packets = [], []
    for h in helpers:
        mix = rng.integers(1, f.size, size=(1, a)).astype(f.dtype)
        packets.append(linalg.apply(f, mix, h.sub_blocks))
        coeff_packets.append(linalg.apply(f, mix, _coefficients(code, h)))
        if traffic is not None:
            traffic.add(packets[-1].nbytes)
    R = rng.integers(1, f.size, size=(a, d)).astype(f.dtype)
    sub = linalg.apply(f, R, np.concatenate(packets))
    coeffs = linalg.apply(f, R, np.concatenate(coeff_packets))
    return NodeShare(cfg, failed_index, sub, helpers[0].file_size, coeff_rows=coeffs)
