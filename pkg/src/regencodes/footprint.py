"""Memory needed by each codec's coding matrix.

Two figures are reported. The nominal size uses the rounded dimensions
commonly quoted for these constructions (alpha ~ k for the linear codes,
an n x 2k matrix for product-matrix codes). The actual size is that of the
matrix this package builds, whose exact dimensions depend on d.
"""

from __future__ import annotations

from .shares import CodeConfig, Scheme


def nominal_matrix_bytes(scheme, n: int, k: int, q: int = 16) -> int:
    """RS: n x k; EL/RL: k^2 x nk; PM: n x 2k; symbols of q bits."""
    scheme = Scheme.parse(scheme)
    symbols = {
        Scheme.RS: n * k,
        Scheme.EL: (k * k) * (n * k),
        Scheme.RL: (k * k) * (n * k),
        Scheme.PM: n * 2 * k,
    }[scheme]
    return symbols * q // 8


def actual_matrix_shape(config: CodeConfig) -> tuple[int, int]:
    """Shape of the matrix the codec keeps in memory."""
    n, k, a = config.n, config.k, config.alpha
    if config.scheme is Scheme.RS:
        return (n, k)
    if config.scheme is Scheme.PM:
        return (n, config.d)
    return (k * a, n * a)


def actual_matrix_bytes(config: CodeConfig) -> int:
    rows, cols = actual_matrix_shape(config)
    return rows * cols * config.q // 8


def footprint_table(n: int = 32, k: int = 16, q: int = 16) -> list[dict]:
    rows = []
    for scheme in Scheme:
        d = None if scheme is Scheme.RS else 2 * k - 2
        cfg = CodeConfig(scheme, n, k, d, q=q)
        rows.append(
            {
                "scheme": scheme.name,
                "n": n,
                "k": k,
                "d": cfg.d,
                "q": q,
                "nominal_bytes": nominal_matrix_bytes(scheme, n, k, q),
                "actual_shape": "x".join(map(str, actual_matrix_shape(cfg))),
                "actual_bytes": actual_matrix_bytes(cfg),
            }
        )
    return rows
