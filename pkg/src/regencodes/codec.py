"""One interface over the four codecs, used by the CLI and the benchmarks."""

from __future__ import annotations

import functools

from . import linear
from .errors import CodeConfigError, InsufficientSharesError
from .gf import FieldContext, build_field
from .pm import ProductMatrixMSR
from .rs import ReedSolomon
from .shares import CodeConfig, NodeShare, Scheme, TrafficCounter


class Codec:
    """Encode, decode and repair for one ``CodeConfig``.

    ``seed`` drives the RL generator and RL repair coefficients. RL decode
    and repair only need the coefficient rows carried by the shares, so the
    random generator is drawn lazily on the first encode.
    """

    def __init__(self, config: CodeConfig, seed: int = 0, field: FieldContext | None = None):
        self.config = config
        self.seed = seed
        self.field = field or build_field(config.q)
        if self.field.q != config.q:
            raise CodeConfigError("field width does not match the code config")
        s = config.scheme
        if s is Scheme.RS:
            self._rs = ReedSolomon(config, self.field)
        elif s is Scheme.PM:
            self._pm = ProductMatrixMSR(config, self.field)
        elif s is Scheme.EL:
            self._lin = linear.el_build(config, self.field)

    @functools.cached_property
    def linear_code(self) -> linear.LinearCode:
        if self.config.scheme is Scheme.EL:
            return self._lin
        if self.config.scheme is Scheme.RL:
            return linear.rl_build(self.config, seed=self.seed, field=self.field)
        raise CodeConfigError(f"{self.config.scheme.name} is not a generator-matrix code")

    @property
    def repair_degree(self) -> int:
        """Shares a repair reads: k for RS (decode and re-encode), d otherwise."""
        return self.config.k if self.config.scheme is Scheme.RS else self.config.d

    def encode(self, data: bytes) -> list[NodeShare]:
        s = self.config.scheme
        if s is Scheme.RS:
            return self._rs.encode(data)
        if s is Scheme.PM:
            return self._pm.encode(data)
        return linear.lin_encode(self.linear_code, data)

    def decode(self, shares) -> bytes:
        s = self.config.scheme
        if s is Scheme.RS:
            return self._rs.decode(shares)
        if s is Scheme.PM:
            return self._pm.decode(shares)
        return linear.lin_decode(self._decode_code(), shares)

    def _decode_code(self) -> linear.LinearCode:
        if self.config.scheme is Scheme.EL:
            return self._lin
        return linear.rl_shell(self.config, self.field)

    def repair(
        self,
        helpers,
        failed_index: int,
        traffic: TrafficCounter | None = None,
        repair_seed: int | None = None,
    ) -> NodeShare:
        """Regenerate ``failed_index``; RL mixes with ``repair_seed`` (default: the codec seed)."""
        if not 0 <= failed_index < self.config.n:
            raise CodeConfigError(f"failed index {failed_index} out of range for n={self.config.n}")
        helpers = list(helpers)
        if any(h.node_index == failed_index for h in helpers):
            raise InsufficientSharesError(f"node {failed_index} cannot help repair itself")
        need = self.repair_degree
        if len(helpers) < need:
            raise InsufficientSharesError(
                f"insufficient shares: repair needs {need} helpers, got {len(helpers)}"
            )
        helpers = sorted(helpers, key=lambda h: h.node_index)[:need]
        s = self.config.scheme
        if s is Scheme.RS:
            return self._rs.repair(helpers, failed_index, traffic)
        if s is Scheme.PM:
            return self._pm.repair(helpers, failed_index, traffic)
        if s is Scheme.EL:
            packets = [linear.el_repair_extract(self._lin, h, failed_index) for h in helpers]
            return linear.el_repair(self._lin, packets, failed_index, traffic)
        seed = self.seed if repair_seed is None else repair_seed
        return linear.rl_repair(self._decode_code(), helpers, failed_index, seed=seed, traffic=traffic)
