"""Monte Carlo check of the analytical repair-cost model.

Repair events hit the system as a Poisson process of rate n * lambda. At
each event the number of live helpers X is drawn from the same law the
analytical model uses. Draws with X < k are delayed and drawn again; the
first repairable draw is charged its repair traffic.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import costmodel
from .costmodel import CostModelError, SystemModel

CSV_COLUMNS = ["trial", "seed", "mean_cost", "stderr", "delayed_fraction"]


@dataclass(frozen=True)
class SimConfig:
    """``events`` fixes the repairs per trial; otherwise a horizon in days is simulated.

    ``point`` may be "msr", "mbr" or "arc" (ideal unless ``arc_delta`` is set).
    ``full_state`` handles X = n under the literal law: "resample" keeps
    the conditioning on X <= n-1, "optimal" charges the optimal repair.
    """

    model: SystemModel
    horizon_days: float = 1000.0
    trials: int = 10
    seed: int = 0
    events: int | None = None
    point: str | None = None
    arc_delta: int | None = None
    law: str = "survivors"
    full_state: str = "resample"

    def __post_init__(self):
        if self.trials < 1:
            raise CostModelError("trials must be >= 1")
        if self.events is None and not self.horizon_days > 0:
            raise CostModelError("horizon_days must be positive")
        if self.events is not None and self.events < 1:
            raise CostModelError("events must be >= 1")
        if self.law not in costmodel.LAWS:
            raise CostModelError(f"unknown law {self.law!r}")
        if self.full_state not in ("resample", "optimal"):
            raise CostModelError(f"unknown full_state {self.full_state!r}")
        if self.resolved_point not in ("msr", "mbr", "arc"):
            raise CostModelError(f"unknown point {self.point!r}")

    @property
    def resolved_point(self) -> str:
        return self.point or self.model.point


@dataclass
class TrialResult:
    trial: int
    seed: int
    mean_cost: float
    stderr: float
    delayed_fraction: float
    repairs: int
    delayed: int = 0


@dataclass
class SimResult:
    mean_cost: float
    stderr: float
    delayed_fraction: float
    repairs_executed: int
    analytic_cost: float
    trials: list[TrialResult] = dc_field(default_factory=list)

    @property
    def z_score(self) -> float:
        return (self.mean_cost - self.analytic_cost) / self.stderr if self.stderr else 0.0

    def to_dict(self) -> dict:
        return {
            "mean_cost": self.mean_cost,
            "stderr": self.stderr,
            "delayed_fraction": self.delayed_fraction,
            "repairs_executed": self.repairs_executed,
            "analytic_cost": self.analytic_cost,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for t in self.trials:
            writer.writerow({c: getattr(t, c) for c in CSV_COLUMNS})
        return buf.getvalue()


def cost_table(config: SimConfig) -> np.ndarray:
    """Repair traffic indexed by the live-helper count X (NaN where not repairable)."""
    m = config.model
    n, k, d = m.n, m.k, m.d
    top = n - 1 if config.law == "survivors" else n
    table = np.full(top + 1, np.nan)
    point = config.resolved_point
    for x in range(k, top + 1):
        i = min(x, n - 1)
        if point == "arc":
            table[x] = float(costmodel.arc_gamma(i, k, m.M, config.arc_delta))
        elif i < d:
            table[x] = float(m.M)
        else:
            table[x] = float(costmodel.optimal_gamma(point, m.M, k, d))
    if top == n and config.full_state == "resample":
        table[n] = np.nan
    return table


def analytic_cost(config: SimConfig) -> float:
    """The model's expected cost for the simulated configuration."""
    m = config.model
    if config.law == "literal" and config.full_state == "optimal":
        # X = n joins the repairable states, outside the cost model's conditioning
        table = cost_table(config)
        probs = np.array([costmodel.binom_pmf(m.n, x, float(m.p)) for x in range(m.n + 1)])
        ok = ~np.isnan(table)
        return float(m.n * m.lam * (probs[ok] * table[ok]).sum() / probs[ok].sum())
    if config.resolved_point == "arc":
        rep = costmodel.arc_system_cost(m.n, m.k, m.p, m.lam, m.M, config.arc_delta, config.law)
    else:
        model = SystemModel(m.n, m.k, m.d, m.p, m.lam, m.M, config.resolved_point)
        rep = costmodel.system_repair_cost(model, config.law)
    return float(rep.expected_cost)


def _draw_states(rng, trials: int, p: float, count: int, table: np.ndarray, k: int):
    """Draw ``count`` repairable states; returns them with the number of X < k draws.

    Unrepairable draws are redrawn. Only X < k counts as a delay: an X = n
    draw excluded by the conditioned literal law is redrawn silently.
    """
    states = rng.binomial(trials, p, size=count)
    delayed = 0
    todo = np.flatnonzero(np.isnan(table[states]))
    while todo.size:
        delayed += int(np.count_nonzero(states[todo] < k))
        states[todo] = rng.binomial(trials, p, size=todo.size)
        todo = todo[np.isnan(table[states[todo]])]
    return states, delayed


def run_trial(config: SimConfig, trial: int, seed: int) -> TrialResult:
    m = config.model
    rng = np.random.default_rng(seed)
    p, nl = float(m.p), m.n * float(m.lam)
    table = cost_table(config)
    if np.all(np.isnan(table)) or (p >= 1.0 and np.isnan(table[-1])):
        raise CostModelError("no repairable state under this law")
    if config.events is not None:
        count = config.events
    else:
        count = int(rng.poisson(nl * config.horizon_days))
    if count == 0:
        return TrialResult(trial, seed, 0.0, 0.0, 0.0, 0)
    states, delayed = _draw_states(rng, len(table) - 1, p, count, table, m.k)
    charges = table[states]
    if config.events is not None:
        per_day = nl * charges
        mean = float(per_day.mean())
        err = float(per_day.std(ddof=1) / np.sqrt(count)) if count > 1 else 0.0
    else:
        mean = float(charges.sum() / config.horizon_days)
        # compound Poisson total: Var = rate * T * E[g^2]
        err = float(np.sqrt(nl * config.horizon_days * np.mean(charges**2)) / config.horizon_days)
    return TrialResult(trial, seed, mean, err, delayed / (delayed + count), count, delayed)


def trial_seeds(seed: int, trials: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(trials)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]


def run_simulation(config: SimConfig) -> SimResult:
    results = [
        run_trial(config, t, s) for t, s in enumerate(trial_seeds(config.seed, config.trials))
    ]
    means = np.array([r.mean_cost for r in results])
    if len(results) > 1:
        stderr = float(means.std(ddof=1) / np.sqrt(len(results)))
    else:
        stderr = results[0].stderr
    repairs = sum(r.repairs for r in results)
    delayed = sum(r.delayed for r in results)
    frac = delayed / (delayed + repairs) if repairs else 0.0
    return SimResult(float(means.mean()), stderr, float(frac), repairs, analytic_cost(config), results)
