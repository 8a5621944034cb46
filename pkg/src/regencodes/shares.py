"""Code parameters, per-device shares and the RGC1 share file format.

RGC1 layout (all integers little-endian)::

    magic        4  b"RGC1"
    scheme       1  1=RS 2=PM 3=EL 4=RL
    q            1
    n, k, d      2 each
    systematic   1
    node_index   2
    file_size    8  original byte length
    stripe_count 4
    payload      alpha * stripe_count symbols, sub-block rows in order
    coeff rows   alpha * k*alpha symbols (RL only)
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import CodeConfigError, InsufficientSharesError, ShareFormatError
from .gf import FieldContext

MAGIC = b"RGC1"
_HEADER = struct.Struct("<4sBBHHHBHQI")
HEADER_SIZE = _HEADER.size


class Scheme(enum.IntEnum):
    RS = 1
    PM = 2
    EL = 3
    RL = 4

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise CodeConfigError(f"unknown scheme {value!r}") from None


@dataclass(frozen=True)
class CodeConfig:
    scheme: Scheme
    n: int
    k: int
    d: int | None = None
    q: int = 16
    file_size: int | None = None
    systematic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        n, k = self.n, self.k
        if k < 1 or n <= k:
            raise CodeConfigError(f"need 1 <= k < n, got n={n}, k={k}")
        if n >= (1 << self.q):
            raise CodeConfigError(
                f"n={n} needs {n} distinct evaluation points; GF(2^{self.q}) is too small"
            )
        if self.file_size is not None and self.file_size <= 0:
            raise CodeConfigError("file size must be positive")
        if self.scheme is Scheme.RS:
            if self.d is None:
                object.__setattr__(self, "d", k)
        else:
            if self.d is None:
                object.__setattr__(self, "d", max(k, min(2 * k - 2, n - 1)))
            if not k <= self.d <= n - 1:
                raise CodeConfigError(f"need k <= d <= n-1, got k={k}, d={self.d}, n={n}")
        if self.scheme is Scheme.RL and self.systematic:
            raise CodeConfigError("random linear codes cannot be kept in systematic form")

    @property
    def alpha(self) -> int:
        """Sub-blocks stored per device."""
        if self.scheme is Scheme.RS:
            return 1
        return self.d - self.k + 1

    @property
    def message_symbols(self) -> int:
        """Source symbols per stripe (``k * alpha``)."""
        return self.k * self.alpha


@dataclass
class NodeShare:
    """Content stored on one device.

    ``sub_blocks`` has shape ``(alpha, stripe_count)``; row ``j`` is the
    j-th sub-block. ``coeff_rows`` (RL only) has shape ``(alpha, k*alpha)``
    and expresses each stored row in terms of the message symbols.
    """

    config: CodeConfig
    node_index: int
    sub_blocks: np.ndarray
    file_size: int
    coeff_rows: np.ndarray | None = None
    meta: dict = dc_field(default_factory=dict, compare=False)

    @property
    def stripe_count(self) -> int:
        return int(self.sub_blocks.shape[1])

    def __eq__(self, other):
        if not isinstance(other, NodeShare):
            return NotImplemented
        same_coeffs = (self.coeff_rows is None and other.coeff_rows is None) or (
            self.coeff_rows is not None
            and other.coeff_rows is not None
            and np.array_equal(self.coeff_rows, other.coeff_rows)
        )
        return (
            self.config == other.config
            and self.node_index == other.node_index
            and self.file_size == other.file_size
            and np.array_equal(self.sub_blocks, other.sub_blocks)
            and same_coeffs
        )

    def payload_bytes(self) -> int:
        return self.sub_blocks.nbytes


class TrafficCounter:
    """Bytes moved over the network by repairs."""

    def __init__(self):
        self.bytes = 0
        self.transfers = 0

    def add(self, nbytes: int):
        self.bytes += int(nbytes)
        self.transfers += 1


def stripe_layout(field: FieldContext, data: bytes, message_symbols: int) -> np.ndarray:
    """Zero-pad ``data`` and view it as a ``(message_symbols, stripes)`` array.

    Row ``r`` is the r-th contiguous chunk of the padded input, so the
    rows taken in order reproduce the data byte for byte.
    """
    if len(data) == 0:
        raise CodeConfigError("cannot encode empty data")
    chunk = message_symbols * field.symbol_bytes
    stripes = -(-len(data) // chunk)
    padded = bytes(data) + bytes(stripes * chunk - len(data))
    return field.bytes_to_symbols(padded).reshape(message_symbols, stripes)


def unstripe(field: FieldContext, rows: np.ndarray, file_size: int) -> bytes:
    raw = field.symbols_to_bytes(rows)
    if file_size > len(raw):
        raise ShareFormatError(
            f"header claims {file_size} bytes but shares hold only {len(raw)}"
        )
    return raw[:file_size]


def check_distinct(shares, need: int):
    idx = [s.node_index for s in shares]
    if len(set(idx)) != len(idx):
        raise InsufficientSharesError(f"duplicate node indices {sorted(idx)}")
    if len(idx) < need:
        raise InsufficientSharesError(
            f"insufficient shares: {len(idx)} given, {need} required"
        )
    if len({s.config for s in shares}) != 1:
        raise ShareFormatError("shares come from different code configurations")
    sizes = {(s.file_size, s.stripe_count) for s in shares}
    if len(sizes) != 1:
        raise ShareFormatError("shares disagree on file size or stripe count")


# -- serialisation ------------------------------------------------------------


def serialize_share(share: NodeShare) -> bytes:
    cfg = share.config
    header = _HEADER.pack(
        MAGIC,
        int(cfg.scheme),
        cfg.q,
        cfg.n,
        cfg.k,
        cfg.d,
        int(cfg.systematic),
        share.node_index,
        share.file_size,
        share.stripe_count,
    )
    dtype = np.dtype("<u1") if cfg.q == 8 else np.dtype("<u2")
    parts = [header, np.ascontiguousarray(share.sub_blocks, dtype=dtype).tobytes()]
    if cfg.scheme is Scheme.RL:
        if share.coeff_rows is None:
            raise ShareFormatError("RL share is missing its coefficient rows")
        parts.append(np.ascontiguousarray(share.coeff_rows, dtype=dtype).tobytes())
    return b"".join(parts)


def deserialize_share(raw: bytes) -> NodeShare:
    if len(raw) < HEADER_SIZE:
        raise ShareFormatError("truncated share header")
    magic, scheme, q, n, k, d, systematic, node, size, stripes = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ShareFormatError(f"bad magic {magic!r}")
    if q not in (8, 16):
        raise ShareFormatError(f"bad field width {q}")
    if systematic not in (0, 1):
        raise ShareFormatError("corrupted systematic flag")
    try:
        cfg = CodeConfig(Scheme(scheme), n, k, d, q=q, systematic=bool(systematic))
    except (ValueError, CodeConfigError) as exc:
        raise ShareFormatError(f"corrupted header: {exc}") from None
    if node >= n:
        raise ShareFormatError(f"node index {node} out of range for n={n}")
    dtype = np.dtype("<u1") if q == 8 else np.dtype("<u2")
    sb = dtype.itemsize
    alpha = cfg.alpha
    body = raw[HEADER_SIZE:]
    payload_len = alpha * stripes * sb
    coeff_len = alpha * cfg.message_symbols * sb if cfg.scheme is Scheme.RL else 0
    if len(body) != payload_len + coeff_len:
        raise ShareFormatError(
            f"share body is {len(body)} bytes, expected {payload_len + coeff_len}"
        )
    if size > alpha * stripes * sb * k:
        raise ShareFormatError("corrupted header: file size exceeds share capacity")
    sub = np.frombuffer(body[:payload_len], dtype=dtype).reshape(alpha, stripes).copy()
    coeffs = None
    if coeff_len:
        coeffs = (
            np.frombuffer(body[payload_len:], dtype=dtype)
            .reshape(alpha, cfg.message_symbols)
            .copy()
        )
    return NodeShare(cfg, node, sub, size, coeffs)


def write_share(path, share: NodeShare):
    with open(path, "wb") as fh:
        fh.write(serialize_share(share))


def read_share(path) -> NodeShare:
    with open(path, "rb") as fh:
        return deserialize_share(fh.read())
