"""Analytical repair-cost model for erasure and regenerating codes.

A file is spread over n devices, each available independently with
probability p. Repairs arrive at rate lambda per device per day. A repair
that finds at least d live helpers uses the code's optimal repair
(traffic gamma); with fewer than d but at least k it falls back to
decoding the whole file (traffic M); with fewer than k it is delayed.

The repair-state law picks how the live-helper count X is drawn:

* ``"survivors"`` (default): X ~ Binomial(n-1, p), the live devices among
  the n-1 that can help the one being repaired. The states k..n-1 then
  cover every repairable situation.
* ``"literal"``: X ~ Binomial(n, p) over all n devices, conditioned on
  k <= X <= n-1.

Costs are in MB per day for one file when M is given in MB. Passing p as
a ``fractions.Fraction`` switches every computation to exact rationals.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable

LAWS = ("survivors", "literal")
POINTS = ("msr", "mbr")
CSV_COLUMNS = ["scheme", "n", "k", "d", "p", "lambda", "M", "cost", "availability"]


class CostModelError(ValueError):
    pass


# -- probabilities ------------------------------------------------------------


def _exact(*xs) -> bool:
    return any(isinstance(x, Fraction) for x in xs)


def binom_pmf(n: int, i: int, p):
    """P(X = i) for X ~ Binomial(n, p); exact when ``p`` is a Fraction."""
    if not 0 <= i <= n:
        raise CostModelError(f"need 0 <= i <= n, got i={i}, n={n}")
    if not 0 <= p <= 1:
        raise CostModelError(f"p must lie in [0, 1], got {p}")
    if isinstance(p, Fraction):
        return math.comb(n, i) * p**i * (1 - p) ** (n - i)
    p = float(p)
    if p == 0.0:
        return 1.0 if i == 0 else 0.0
    if p == 1.0:
        return 1.0 if i == n else 0.0
    log_pmf = (
        math.lgamma(n + 1)
        - math.lgamma(i + 1)
        - math.lgamma(n - i + 1)
        + i * math.log(p)
        + (n - i) * math.log1p(-p)
    )
    return math.exp(log_pmf)


def availability(n: int, k: int, p):
    """System availability P(X >= k) with X ~ Binomial(n, p)."""
    if n < 1 or k < 0:
        raise CostModelError(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    if k > n:
        return Fraction(0) if isinstance(p, Fraction) else 0.0
    return sum(binom_pmf(n, i, p) for i in range(k, n + 1))


def repair_states(n: int, k: int, p, law: str = "survivors") -> dict:
    """Probability of each repairable live-helper count ``i`` in k..n-1."""
    if law not in LAWS:
        raise CostModelError(f"unknown law {law!r}; choose one of {LAWS}")
    trials = n - 1 if law == "survivors" else n
    return {i: binom_pmf(trials, i, p) for i in range(k, n)}


# -- code operating points ----------------------------------------------------


def _ratio(a, b, exact: bool):
    return Fraction(a) / Fraction(b) if exact else a / b


def msr_point(M, k: int, d: int, exact: bool = False) -> tuple:
    """``(alpha, beta, gamma, delta)`` at the minimum-storage point."""
    if d < k:
        raise CostModelError(f"need d >= k, got d={d}, k={k}")
    delta = d - k + 1
    alpha = _ratio(M, k, exact)
    beta = _ratio(M, k * delta, exact)
    return alpha, beta, d * beta, delta


def mbr_point(M, k: int, d: int, exact: bool = False) -> tuple:
    """``(alpha, beta, gamma)`` at the minimum-bandwidth point (alpha = gamma)."""
    if d < k:
        raise CostModelError(f"need d >= k, got d={d}, k={k}")
    beta = _ratio(2 * M, k * (2 * d - k + 1), exact)
    gamma = d * beta
    return gamma, beta, gamma


def optimal_gamma(point: str, M, k: int, d: int, exact: bool = False):
    if point == "msr":
        return msr_point(M, k, d, exact)[2]
    if point == "mbr":
        return mbr_point(M, k, d, exact)[2]
    raise CostModelError(f"unknown operating point {point!r}; choose msr or mbr")


# -- system cost ----------------------------------------------------------------


@dataclass(frozen=True)
class SystemModel:
    n: int
    k: int
    d: int
    p: float | Fraction
    lam: float | Fraction = 1.0
    M: float | Fraction = 64.0
    point: str = "msr"

    def __post_init__(self):
        if self.point not in POINTS:
            raise CostModelError(f"unknown operating point {self.point!r}")
        if not 1 <= self.k < self.n:
            raise CostModelError(f"need 1 <= k < n, got n={self.n}, k={self.k}")
        if not self.k <= self.d <= self.n - 1:
            raise CostModelError(
                f"need k <= d <= n-1, got k={self.k}, d={self.d}, n={self.n}"
            )
        if not 0 < self.p <= 1:
            raise CostModelError(f"p must lie in (0, 1], got {self.p}")
        if self.lam <= 0 or self.M <= 0:
            raise CostModelError("lambda and M must be positive")

    @property
    def exact(self) -> bool:
        return _exact(self.p, self.lam, self.M)


@dataclass
class CostReport:
    expected_cost: float | Fraction
    decode_term: float | Fraction
    optimal_term: float | Fraction
    availability: float | Fraction
    conditioning_mass: float | Fraction
    model: SystemModel | None = None
    scheme: str = ""
    law: str = "survivors"
    extra: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "scheme": self.scheme,
            "law": self.law,
            "expected_cost": float(self.expected_cost),
            "decode_term": float(self.decode_term),
            "optimal_term": float(self.optimal_term),
            "availability": float(self.availability),
            "conditioning_mass": float(self.conditioning_mass),
        }
        if self.model is not None:
            m = asdict(self.model)
            m["p"], m["lam"], m["M"] = float(m["p"]), float(m["lam"]), float(m["M"])
            out["model"] = m
        out.update(self.extra)
        return out

    def csv_row(self) -> dict:
        m = self.model
        return {
            "scheme": self.scheme,
            "n": m.n,
            "k": m.k,
            "d": m.d,
            "p": float(m.p),
            "lambda": float(m.lam),
            "M": float(m.M),
            "cost": float(self.expected_cost),
            "availability": float(self.availability),
        }


def _compose(n, lam, states: dict, cost_of: Callable[[int], object], threshold: int, exact: bool):
    """Split the conditioned expectation into fallback and optimal parts."""
    mass = sum(states.values())
    if mass == 0:
        raise CostModelError("no repairable state has positive probability (p too small)")
    decode = sum(pr * cost_of(i) for i, pr in states.items() if i < threshold)
    optimal = sum(pr * cost_of(i) for i, pr in states.items() if i >= threshold)
    scale = n * lam
    if not exact:
        mass, decode, optimal = float(mass), float(decode), float(optimal)
    return scale * decode / mass, scale * optimal / mass, mass


def system_repair_cost(model: SystemModel, law: str = "survivors") -> CostReport:
    """Expected system repair traffic per day, conditioned on repairability."""
    n, k, d, p = model.n, model.k, model.d, model.p
    exact = model.exact
    M = Fraction(model.M) if exact else model.M
    lam = Fraction(model.lam) if exact else model.lam
    gamma = optimal_gamma(model.point, M, k, d, exact)
    avail = availability(n, k, p)
    if p == 1:
        # every other device is up: the optimal repair always applies
        zero = Fraction(0) if exact else 0.0
        return CostReport(n * lam * gamma, zero, n * lam * gamma, avail, 1 + zero, model, model.point, law)
    states = repair_states(n, k, p, law)
    decode, optimal, mass = _compose(
        n, lam, states, lambda i: M if i < d else gamma, d, exact
    )
    return CostReport(decode + optimal, decode, optimal, avail, mass, model, model.point, law)


def cost_curve(n: int, k: int, p, lam=1.0, M=64.0, point: str = "msr", law: str = "survivors") -> dict:
    """``{d: CostReport}`` for every admissible d."""
    return {
        d: system_repair_cost(SystemModel(n, k, d, p, lam, M, point), law)
        for d in range(k, n)
    }


def optimize_d(n: int, k: int, p, lam=1.0, M=64.0, point: str = "msr", law: str = "survivors"):
    """Exhaustive argmin over d in [k, n-1]; ties go to the smaller d."""
    if n <= k:
        raise CostModelError(f"need n > k, got n={n}, k={k}")
    curve = cost_curve(n, k, p, lam, M, point, law)
    best = min(curve, key=lambda d: (curve[d].expected_cost, d))
    return best, curve[best]


def optimize_n(
    k: int,
    p,
    lam=1.0,
    M=64.0,
    point: str = "msr",
    n_max: int | None = None,
    law: str = "survivors",
):
    """Argmin over n in [k+1, n_max] of the cost at that n's best d.

    Returns ``(n_opt, d_opt, report)``; ties go to the smaller n.
    """
    n_max = 8 * k if n_max is None else n_max
    if n_max < k + 1:
        raise CostModelError(f"need n_max >= k+1, got n_max={n_max}, k={k}")
    best = None
    for n in range(k + 1, n_max + 1):
        d, rep = optimize_d(n, k, p, lam, M, point, law)
        if best is None or rep.expected_cost < best[2].expected_cost:
            best = (n, d, rep)
    return best


def n_opt_closed_form(k: int) -> float:
    """Continuous minimiser of n (n-1)/(n-k), the MSR cost at p = 1."""
    return k + math.sqrt(k * k - k)


def improvement_over_ecc(n: int, k: int, p, point: str, lam=1.0, M=64.0, law: str = "survivors"):
    """Cost of ECC (MSR with d = k) divided by the best cost of ``point``."""
    ecc = system_repair_cost(SystemModel(n, k, k, p, lam, M, "msr"), law).expected_cost
    _, rep = optimize_d(n, k, p, lam, M, point, law)
    return ecc / rep.expected_cost


# -- adaptive regenerating codes --------------------------------------------


def ideal_arc_delta(n: int, k: int) -> int:
    """lcm(1, ..., n-k): divisible by every helper-count deficit i-k+1."""
    return math.lcm(*range(1, n - k + 1))


def arc_delta(n: int, k: int, multiple: int) -> int:
    """A fixed sub-block count ``multiple * (d-k+1)`` with d = n-1."""
    if multiple < 1:
        raise CostModelError("multiple must be >= 1")
    return multiple * (n - k)


def arc_gamma(i: int, k: int, M, delta: int | None = None, exact: bool = False):
    """Traffic when all ``i`` live devices help.

    With ``delta=None`` each helper sends exactly M / (k (i-k+1)); otherwise
    it sends the smallest whole number of the M/(k delta) sub-blocks that
    covers that amount.
    """
    if i < k:
        raise CostModelError(f"adaptive repair needs at least k={k} helpers, got {i}")
    deficit = i - k + 1
    if delta is None:
        return _ratio(i * M, k * deficit, exact)
    if delta < 1:
        raise CostModelError("delta must be >= 1")
    return _ratio(i * (-(-delta // deficit)) * M, k * delta, exact)


def arc_system_cost(
    n: int,
    k: int,
    p,
    lam=1.0,
    M=64.0,
    delta: int | None = None,
    law: str = "survivors",
) -> CostReport:
    """Expected cost of adaptive regenerating codes (``delta=None`` is ideal)."""
    if n <= k:
        raise CostModelError(f"need n > k, got n={n}, k={k}")
    if not 0 < p <= 1:
        raise CostModelError(f"p must lie in (0, 1], got {p}")
    exact = _exact(p, lam, M)
    if exact:
        M, lam = Fraction(M), Fraction(lam)
    states = {n - 1: 1} if p == 1 else repair_states(n, k, p, law)
    decode, optimal, mass = _compose(
        n, lam, states, lambda i: arc_gamma(i, k, M, delta, exact), k, exact
    )
    rep = CostReport(decode + optimal, decode, optimal, availability(n, k, p), mass, None, "arc", law)
    rep.extra = {"n": n, "k": k, "p": float(p), "delta": "ideal" if delta is None else delta}
    return rep


def arc_savings(n: int, k: int, p, delta: int | None = None, law: str = "survivors") -> float:
    """Relative saving of ARC over MSR at its best d: ``1 - ARC / MSR(d_opt)``."""
    _, msr = optimize_d(n, k, p, point="msr", law=law)
    arc = arc_system_cost(n, k, p, delta=delta, law=law)
    return 1 - arc.expected_cost / msr.expected_cost


# -- scheme comparison --------------------------------------------------------


@dataclass
class TradeoffPoint:
    scheme: str
    n: int
    k: int
    d: int | None
    storage_total: float
    repair_bandwidth: float
    unavailability: float
    target: float

    def to_dict(self) -> dict:
        return asdict(self)


def _min_n(k: int, p, target: float, n_max: int, avail: Callable) -> int:
    for n in range(k + 1, n_max + 1):
        if 1 - avail(n, k, p) <= target:
            return n
    raise CostModelError(
        f"unavailability target {target} unreachable with k={k}, n <= {n_max}"
    )


def compare_schemes(
    k: int,
    p,
    lam=1.0,
    M=64.0,
    targets: Iterable[float] = (1e-2, 1e-4, 1e-6),
    n_max: int | None = None,
    twin_availability: Callable | None = None,
    law: str = "survivors",
    sweep: int = 0,
) -> list[TradeoffPoint]:
    """Storage and repair bandwidth of each scheme at each unavailability target.

    Every scheme starts from the smallest n meeting the target and, with
    ``sweep > 0``, also reports the next ``sweep`` values of n (more
    storage, usually less bandwidth). REP replicates (k = 1); ECC is MSR
    with d = k; MSR and MBR use their best d; ARC is ideal adaptive. TWIN
    is only reported when an availability law for it is injected.
    """
    n_max = 8 * k if n_max is None else n_max
    out = []
    for target in targets:
        if not 0 < target < 1:
            raise CostModelError(f"targets must lie in (0, 1), got {target}")
        n0 = _min_n(1, p, target, n_max, availability)
        for n in range(n0, min(n0 + sweep, n_max) + 1):
            rep = system_repair_cost(SystemModel(n, 1, 1, p, lam, M, "msr"), law)
            unavail = 1 - availability(n, 1, p)
            out.append(TradeoffPoint("REP", n, 1, 1, n * M, rep.expected_cost, unavail, target))
        n0 = _min_n(k, p, target, n_max, availability)
        for n in range(n0, min(n0 + sweep, n_max) + 1):
            unavail = 1 - availability(n, k, p)
            ecc = system_repair_cost(SystemModel(n, k, k, p, lam, M, "msr"), law)
            out.append(TradeoffPoint("ECC", n, k, k, n * M / k, ecc.expected_cost, unavail, target))
            for point in POINTS:
                d, r = optimize_d(n, k, p, lam, M, point, law)
                alpha = msr_point(M, k, d)[0] if point == "msr" else mbr_point(M, k, d)[0]
                out.append(
                    TradeoffPoint(point.upper(), n, k, d, n * alpha, r.expected_cost, unavail, target)
                )
            arc = arc_system_cost(n, k, p, lam, M, None, law)
            out.append(TradeoffPoint("ARC", n, k, None, n * M / k, arc.expected_cost, unavail, target))
        if twin_availability is not None:
            n0 = _min_n(k, p, target, n_max, twin_availability)
            for n in range(n0, min(n0 + sweep, n_max) + 1):
                out.append(
                    TradeoffPoint(
                        "TWIN",
                        n,
                        k,
                        k,
                        n * M / k,
                        n * lam * M / k,
                        1 - twin_availability(n, k, p),
                        target,
                    )
                )
    return [_as_float(t) for t in out]


def dominated(point: TradeoffPoint, others: Iterable[TradeoffPoint]) -> bool:
    """True when some other point is no worse on storage and bandwidth and better on one."""
    for o in others:
        if (
            o.storage_total <= point.storage_total
            and o.repair_bandwidth <= point.repair_bandwidth
            and (o.storage_total < point.storage_total or o.repair_bandwidth < point.repair_bandwidth)
        ):
            return True
    return False


def _as_float(t: TradeoffPoint) -> TradeoffPoint:
    t.storage_total = float(t.storage_total)
    t.repair_bandwidth = float(t.repair_bandwidth)
    t.unavailability = float(t.unavailability)
    return t


# -- scaling and output ---------------------------------------------------------


def scale_cost(cost, files: int = 1, M=64.0, lam=1.0, base_M=64.0, base_lam=1.0):
    """Costs are linear in the number of files, the file size and the repair rate."""
    return cost * files * (M / base_M) * (lam / base_lam)


def reports_to_csv(reports: Iterable[CostReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()
