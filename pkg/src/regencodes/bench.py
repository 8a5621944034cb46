"""Wall-clock benchmarks of encode, decode and repair.

Each grid point builds its codec once (untimed), runs every phase once
as warm-up and then ``reps`` timed rounds on a seeded random payload.
Decode reads a random k-subset that avoids the systematic shortcut;
repair regenerates one random node (RS decodes the file and re-encodes
the lost row).
"""

from __future__ import annotations

import csv
import io
import platform
import statistics
import time
from dataclasses import asdict, dataclass

import numpy as np

from .codec import Codec
from .errors import RegenError
from .shares import CodeConfig, Scheme

PHASES = ("encode", "decode", "repair")
CSV_COLUMNS = [
    "scheme", "systematic", "M", "n", "k", "d", "phase",
    "median_s", "min_s", "max_s", "reps", "field_q", "host",
]
MB = 1 << 20


@dataclass
class BenchPoint:
    scheme: str
    systematic: bool
    M: int
    n: int
    k: int
    d: int
    phase: str
    median_s: float
    min_s: float
    max_s: float
    reps: int
    field_q: int
    host: str

    @property
    def label(self) -> str:
        return ("S-" if self.systematic else "") + self.scheme

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Skipped:
    config: CodeConfig
    reason: str


def host_info() -> str:
    return f"{platform.node()}|{platform.machine()}|{platform.processor() or 'cpu'}|py{platform.python_version()}"


def default_grid(ks=(4, 8, 12, 16), systematic: bool = False) -> list[CodeConfig]:
    """n = 2k and d = 2k - 2 for every regenerating scheme."""
    grid = []
    for k in ks:
        for scheme in Scheme:
            if systematic and scheme is Scheme.RL:
                continue
            d = None if scheme is Scheme.RS else 2 * k - 2
            grid.append(CodeConfig(scheme, 2 * k, k, d, systematic=systematic))
    return grid


def _timed(fn, reps: int):
    times, out = [], None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return times, out


def _decode_subset(rng, n: int, k: int, systematic: bool) -> list[int]:
    while True:
        idx = sorted(rng.choice(n, size=k, replace=False).tolist())
        if not systematic or idx != list(range(k)):
            return idx


def bench_config(
    config: CodeConfig,
    M: int,
    phases=PHASES,
    reps: int = 3,
    seed: int = 0,
    warmup: bool = True,
) -> list[BenchPoint]:
    rng = np.random.default_rng(seed)
    data = rng.bytes(M)
    codec = Codec(config, seed=seed)
    if config.scheme is Scheme.RL:
        codec.linear_code  # draw the generator outside the timed region
    host = host_info()

    def point(phase, times):
        return BenchPoint(
            config.scheme.name,
            config.systematic,
            M,
            config.n,
            config.k,
            config.d,
            phase,
            statistics.median(times),
            min(times),
            max(times),
            len(times),
            config.q,
            host,
        )

    out = []
    # the shares for decode and repair; doubles as the encode warm-up
    shares = codec.encode(data)
    if "encode" in phases:
        times, shares = _timed(lambda: codec.encode(data), reps)
        out.append(point("encode", times))
    if "decode" in phases:
        idx = _decode_subset(rng, config.n, config.k, config.systematic)
        subset = [shares[i] for i in idx]
        if warmup:
            codec.decode(subset)
        times, result = _timed(lambda: codec.decode(subset), reps)
        if result != data:
            raise RegenError(f"benchmark decode mismatch for {config}")
        out.append(point("decode", times))
    if "repair" in phases:
        failed = int(rng.integers(config.n))
        helpers = [s for s in shares if s.node_index != failed]
        if warmup:
            codec.repair(helpers, failed)
        times, _ = _timed(lambda: codec.repair(helpers, failed), reps)
        out.append(point("repair", times))
    return out


def run_bench(
    grid,
    phases=PHASES,
    reps: int = 3,
    M: int = 16 * MB,
    seed: int = 0,
    warmup: bool = True,
    skipped: list | None = None,
) -> list[BenchPoint]:
    """Time every config in ``grid``; configs a scheme cannot build are skipped.

    Skipped configs are appended to ``skipped`` (when given) with the reason.
    """
    for phase in phases:
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase!r}")
    points = []
    for config in grid:
        try:
            points.extend(bench_config(config, M, phases, reps, seed, warmup))
        except RegenError as exc:
            if skipped is None:
                raise
            skipped.append(Skipped(config, str(exc)))
    return points


def median_of(points, label: str, phase: str, M: int | None = None) -> float:
    for p in points:
        if p.label == label and p.phase == phase and (M is None or p.M == M):
            return p.median_s
    raise KeyError((label, phase, M))


def ratios(points) -> dict:
    """Slowdowns relative to the RS baseline, measured on the same run."""
    out = {}
    pairs = {
        "encode PM/RS": ("PM", "RS", "encode"),
        "decode PM/RS": ("PM", "RS", "decode"),
        "encode S-PM/S-RS": ("S-PM", "S-RS", "encode"),
    }
    for name, (a, b, phase) in pairs.items():
        try:
            out[name] = median_of(points, a, phase) / median_of(points, b, phase)
        except KeyError:
            continue
    return out


def linear_fit(xs, ys) -> tuple[float, float, float]:
    """Least-squares ``y = a x + b``; returns ``(a, b, r_squared)``."""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    a, b = np.polyfit(xs, ys, 1)
    resid = ys - (a * xs + b)
    total = np.sum((ys - ys.mean()) ** 2)
    r2 = 1.0 - float(np.sum(resid**2) / total) if total > 0 else 1.0
    return float(a), float(b), r2


def points_to_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for p in points:
        writer.writerow({c: getattr(p, c) for c in CSV_COLUMNS})
    return buf.getvalue()
