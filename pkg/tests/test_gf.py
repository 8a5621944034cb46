import numpy as np
import pytest

from regencodes.errors import FieldError
from regencodes.gf import DEFAULT_POLY_8, DEFAULT_POLY_16, build_field, gf_add, gf_div, gf_inv, gf_mul


def clmul_mod(a: int, b: int, poly: int, q: int) -> int:
    """Shift-and-add carry-less product, reduced bit by bit."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
    for bit in range(2 * q - 2, q - 1, -1):
        if r >> bit & 1:
            r ^= poly << (bit - q)
    return r


def multiplicative_order(x: int, poly: int, q: int) -> int:
    y, i = x, 1
    while y != 1:
        y = clmul_mod(y, x, poly, q)
        i += 1
    return i


@pytest.mark.parametrize("q,poly,order", [(16, DEFAULT_POLY_16, 65535), (8, DEFAULT_POLY_8, 255)])
def test_tables_and_generator_order(q, poly, order):
    f = build_field(q, poly)
    assert f.order == order
    assert len(f.log_table) == len(f.antilog_table) == order
    assert multiplicative_order(2, poly, q) == order
    assert f.antilog_table[0] == 1


@pytest.mark.parametrize("q", [8, 16])
def test_log_antilog_roundtrip(q):
    f = build_field(q)
    xs = np.arange(1, f.size)
    assert np.array_equal(f.antilog_table[f.log_table[xs - 1]], xs)
    assert np.array_equal(f.log_table[f.antilog_table - 1], np.arange(f.order))


def test_reducible_polynomial_rejected():
    with pytest.raises(FieldError, match="not primitive"):
        build_field(16, 0x10001)


def test_bad_degree_and_width():
    with pytest.raises(FieldError):
        build_field(16, 0x11D)
    with pytest.raises(FieldError):
        build_field(12)


def test_add_examples():
    assert gf_add(0, 77) == 77
    assert gf_add(77, 77) == 0
    assert gf_add(0x0053, 0x00CA) == 0x0099


def test_mul_examples(f16):
    assert gf_mul(f16, 0x1234, 1) == 0x1234
    assert gf_mul(f16, 0, 0x1234) == 0
    assert gf_mul(f16, 0x8000, 0x0002) == 0x100B
    assert clmul_mod(0x8000, 2, DEFAULT_POLY_16, 16) == 0x100B


@pytest.mark.parametrize("q", [8, 16])
def test_mul_matches_clmul_oracle(q):
    f = build_field(q)
    rng = np.random.default_rng(q)
    pairs = rng.integers(0, f.size, size=(10_000, 2))
    got = f.mul_arrays(pairs[:, 0], pairs[:, 1])
    want = [clmul_mod(int(a), int(b), f.reduction_poly, q) for a, b in pairs]
    assert got.tolist() == want
    assert [gf_mul(f, int(a), int(b)) for a, b in pairs[:200]] == want[:200]


def test_field_axioms_on_random_triples(f16):
    rng = np.random.default_rng(7)
    a, b, c = rng.integers(0, f16.size, size=(3, 100_000))
    mul = f16.mul_arrays
    assert np.array_equal(mul(a, b), mul(b, a))
    assert np.array_equal(mul(mul(a, b), c), mul(a, mul(b, c)))
    assert np.array_equal(mul(a, b ^ c), mul(a, b) ^ mul(a, c))


def test_inverse_and_division(f16):
    rng = np.random.default_rng(3)
    xs = rng.integers(1, f16.size, size=2000)
    inv = f16.inv_array(xs)
    assert np.all(f16.mul_arrays(xs, inv) == 1)
    for x in xs[:100].tolist():
        y = gf_inv(f16, x)
        assert gf_mul(f16, x, y) == 1
        assert gf_div(f16, gf_mul(f16, x, 0x77), x) == 0x77
    with pytest.raises(FieldError):
        gf_inv(f16, 0)
    with pytest.raises(FieldError):
        gf_div(f16, 5, 0)


def test_pow_and_scale(f16):
    x = 0x1F3
    acc = 1
    for e in range(10):
        assert f16.pow(x, e) == acc
        acc = gf_mul(f16, acc, x)
    v = np.array([0, 1, 2, 0xFFFF], dtype=np.uint16)
    assert f16.scale(x, v).tolist() == [gf_mul(f16, x, int(t)) for t in v]
    assert f16.scale(0, v).tolist() == [0, 0, 0, 0]


def test_symbols_little_endian(f16):
    raw = f16.symbols_to_bytes(np.array([0x0102], dtype=np.uint16))
    assert raw == b"\x02\x01"
    assert f16.bytes_to_symbols(raw).tolist() == [0x0102]
    with pytest.raises(FieldError):
        f16.bytes_to_symbols(b"\x00")
