"""Log/antilog table arithmetic in GF(2^q) for q in {8, 16}.

Scalar helpers take and return Python ints. The array helpers work on
numpy arrays of symbols and are the kernels every codec is built on: a
product is ``exp[log[a] + log[b]]`` where ``log[0]`` is a sentinel large
enough that the extended antilog table returns 0 for any sum involving it.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import FieldError

#: x^16 + x^12 + x^3 + x + 1
DEFAULT_POLY_16 = 0x1100B
#: x^8 + x^4 + x^3 + x^2 + 1
DEFAULT_POLY_8 = 0x11D

DEFAULT_POLYS = {8: DEFAULT_POLY_8, 16: DEFAULT_POLY_16}


class FieldContext:
    """Immutable GF(2^q) arithmetic context.

    Attributes
    ----------
    q : int
        Bit width of a symbol.
    reduction_poly : int
        Primitive polynomial, bit i holding the coefficient of x^i.
    log_table, antilog_table : numpy.ndarray
        ``2^q - 1`` entries each; ``log_table[x - 1]`` is the discrete log
        of ``x`` and ``antilog_table[i]`` is ``g^i`` for the generator
        ``g = x``.
    """

    def __init__(self, q: int, reduction_poly: int):
        if q not in (8, 16):
            raise FieldError(f"unsupported field width q={q}; expected 8 or 16")
        if reduction_poly >> q != 1:
            raise FieldError(
                f"reduction polynomial {reduction_poly:#x} does not have degree {q}"
            )
        self.q = q
        self.reduction_poly = reduction_poly
        self.size = 1 << q
        self.order = self.size - 1
        self.dtype = np.dtype("<u1") if q == 8 else np.dtype("<u2")
        self.symbol_bytes = q // 8

        order = self.order
        antilog = np.zeros(order, dtype=np.int64)
        log = np.full(self.size, -1, dtype=np.int64)
        x = 1
        for i in range(order):
            if log[x] != -1:
                raise FieldError(
                    f"polynomial {reduction_poly:#x} is not primitive: "
                    f"generator has order {i} < {order}"
                )
            antilog[i] = x
            log[x] = i
            x <<= 1
            if x & self.size:
                x ^= reduction_poly
        if x != 1:
            raise FieldError(f"polynomial {reduction_poly:#x} is not primitive")

        # zero maps to a sentinel; any sum touching it lands in the zero tail
        self.zero_log = 2 * order
        log[0] = self.zero_log
        exp_ext = np.zeros(4 * order + 1, dtype=self.dtype)
        exp_ext[:order] = antilog
        exp_ext[order : 2 * order] = antilog
        self.log_ext = log.astype(np.int32)
        self.exp_ext = exp_ext
        self._antilog = antilog
        for arr in (self.log_ext, self.exp_ext, self._antilog):
            arr.flags.writeable = False

    def __repr__(self):
        return f"FieldContext(q={self.q}, reduction_poly={self.reduction_poly:#x})"

    @property
    def log_table(self) -> np.ndarray:
        return self.log_ext[1:].astype(np.int64)

    @property
    def antilog_table(self) -> np.ndarray:
        return self._antilog

    # -- scalar arithmetic -------------------------------------------------

    def check(self, a: int) -> int:
        if not 0 <= a < self.size:
            raise FieldError(f"{a} is not an element of GF(2^{self.q})")
        return a

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._antilog[(self.log_ext[a] + self.log_ext[b]) % self.order])

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("inverse of zero is undefined")
        return int(self._antilog[(self.order - self.log_ext[a]) % self.order])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise FieldError("division by zero")
        if a == 0:
            return 0
        return int(self._antilog[(self.log_ext[a] - self.log_ext[b]) % self.order])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise FieldError("zero has no negative powers")
            return 1 if e == 0 else 0
        return int(self._antilog[(int(self.log_ext[a]) * e) % self.order])

    def exp(self, i: int) -> int:
        """Return ``g^i`` for the field generator ``g``."""
        return int(self._antilog[i % self.order])

    def log(self, a: int) -> int:
        if a == 0:
            raise FieldError("log of zero is undefined")
        return int(self.log_ext[a])

    # -- array arithmetic --------------------------------------------------

    def logs(self, x: np.ndarray) -> np.ndarray:
        """Extended logs of a symbol array (zero maps to the sentinel)."""
        return self.log_ext[x]

    def scale(self, c: int, x: np.ndarray, logx: np.ndarray | None = None) -> np.ndarray:
        """Multiply every symbol of ``x`` by the scalar ``c``.

        ``logx`` may carry precomputed extended logs of ``x`` so callers
        that scale one row by many coefficients pay the lookup once.
        """
        if c == 0:
            return np.zeros(np.shape(x), dtype=self.dtype)
        if logx is None:
            if c == 1:
                return np.array(x, dtype=self.dtype)
            logx = self.log_ext[x]
        return self.exp_ext[logx + int(self.log_ext[c])]

    def mul_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of two broadcastable symbol arrays."""
        return self.exp_ext[self.log_ext[a] + self.log_ext[b]]

    def inv_array(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a)
        if np.any(a == 0):
            raise FieldError("inverse of zero is undefined")
        return self._antilog[(self.order - self.log_ext[a]) % self.order].astype(self.dtype)

    def symbols_to_bytes(self, x: np.ndarray) -> bytes:
        return np.ascontiguousarray(x, dtype=self.dtype).tobytes()

    def bytes_to_symbols(self, raw: bytes) -> np.ndarray:
        if len(raw) % self.symbol_bytes:
            raise FieldError("byte length is not a whole number of symbols")
        return np.frombuffer(raw, dtype=self.dtype)


def build_field(q: int = 16, reduction_poly: int | None = None) -> FieldContext:
    """Build (or fetch from cache) the field context for ``q`` and a polynomial."""
    if reduction_poly is None:
        if q not in DEFAULT_POLYS:
            raise FieldError(f"unsupported field width q={q}; expected 8 or 16")
        reduction_poly = DEFAULT_POLYS[q]
    return _cached_field(q, reduction_poly)


@functools.lru_cache(maxsize=None)
def _cached_field(q: int, reduction_poly: int) -> FieldContext:
    return FieldContext(q, reduction_poly)


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(field: FieldContext, a: int, b: int) -> int:
    return field.mul(a, b)


def gf_inv(field: FieldContext, a: int) -> int:
    return field.inv(a)


def gf_div(field: FieldContext, a: int, b: int) -> int:
    return field.div(a, b)

