"""Scenario orchestration: initialization, the monthly integrate/review loop,
and summary metrics of the urban-population trajectory.

Random stream order for a run seeded with ``seed``:

1. ``n * n`` uniforms for the social graph (row-major);
2. one uniform per migration candidate at each monthly review, ascending
   worker index.

Initial-intention jitter, when enabled, draws from a separate stream
``default_rng([seed, 1])`` so it never shifts the main stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    DEFAULT_BLOWUP_BOUND,
    ConsensusVerdict,
    DynamicsParams,
    IntentionState,
    intention_spread,
    predict_consensus,
    rk4_step,
    system_matrix,
)
from .econ import EconDomainError, EconParams, derive_constants, expected_wage_differential
from ._validation import ParameterError
from .graph import DEFAULT_ZERO_TOL, SocialGraph, random_graph
from .migration import MigrationParams, WorkerRoster, monthly_review

COMPLETED = "completed"
SECTOR_COLLAPSE = "sector_collapse"
DIVERGED = "diverged"


class ConfigError(ParameterError):
    """A scenario violates one of its invariants. ``field`` names the culprit."""

    def __init__(self, field_name, message):
        super().__init__(field_name, f"{field_name}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    econ: EconParams
    dynamics: DynamicsParams
    migration: MigrationParams
    n_workers: int = 100
    sparse_factor: float = 0.09
    weight_upper: float = 0.1
    initial_urban_fraction: float = 0.2
    hukou_initial_urban: bool = False
    x0_magnitude: float = 1.0
    x0_jitter: float = 0.0
    horizon_months: int = 120
    dt_days: float = 0.25
    seed: int = 0
    zero_tol: float = DEFAULT_ZERO_TOL
    blowup_bound: float = DEFAULT_BLOWUP_BOUND
    clamp_on_blowup: bool = True
    sweep: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        validate_config(self)

    @property
    def steps_per_review(self) -> int:
        return int(round(self.migration.review_period_days / self.dt_days))


def _is_int(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def validate_config(cfg: ScenarioConfig) -> None:
    if not _is_int(cfg.n_workers) or cfg.n_workers < 2:
        raise ConfigError("n_workers", f"must be an integer >= 2, got {cfg.n_workers!r}")
    if cfg.econ.N_total != cfg.n_workers:
        raise ConfigError(
            "econ.N_total", f"must equal n_workers={cfg.n_workers}, got {cfg.econ.N_total!r}"
        )
    if not cfg.weight_upper > 0:
        raise ConfigError("weight_upper", f"must be > 0, got {cfg.weight_upper!r}")
    if not 0 <= cfg.sparse_factor < cfg.weight_upper:
        raise ConfigError(
            "sparse_factor", f"must lie in [0, weight_upper), got {cfg.sparse_factor!r}"
        )
    if not 0 < cfg.initial_urban_fraction < 1:
        raise ConfigError(
            "initial_urban_fraction", f"must lie in (0, 1), got {cfg.initial_urban_fraction!r}"
        )
    n_u0 = math.floor(cfg.initial_urban_fraction * cfg.n_workers)
    if not 0 < n_u0 < cfg.n_workers:
        raise ConfigError(
            "initial_urban_fraction",
            f"gives {n_u0} urban workers out of {cfg.n_workers}; both sectors must be populated",
        )
    if not cfg.x0_magnitude >= 0:
        raise ConfigError("x0_magnitude", f"must be >= 0, got {cfg.x0_magnitude!r}")
    if not cfg.x0_jitter >= 0:
        raise ConfigError("x0_jitter", f"must be >= 0, got {cfg.x0_jitter!r}")
    if not _is_int(cfg.horizon_months) or cfg.horizon_months < 0:
        raise ConfigError("horizon_months", f"must be an integer >= 0, got {cfg.horizon_months!r}")
    if not cfg.dt_days > 0:
        raise ConfigError("dt_days", f"must be > 0, got {cfg.dt_days!r}")
    ratio = cfg.migration.review_period_days / cfg.dt_days
    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
        raise ConfigError(
            "dt_days",
            f"must divide review_period_days={cfg.migration.review_period_days!r} evenly",
        )
    if not _is_int(cfg.seed) or not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {cfg.seed!r}")
    if not cfg.zero_tol > 0:
        raise ConfigError("zero_tol", f"must be > 0, got {cfg.zero_tol!r}")
    if not cfg.blowup_bound > 0:
        raise ConfigError("blowup_bound", f"must be > 0, got {cfg.blowup_bound!r}")


@dataclass(frozen=True)
class MonthRecord:
    t_days: float
    n_urban: int
    v: float | None  # wage differential at this head-count; None after a collapse
    bv: float | None
    spread: float
    inflow: int
    outflow: int


@dataclass
class SimResult:
    config: ScenarioConfig
    series: list[MonthRecord]
    verdict: ConsensusVerdict
    diverged: bool
    status: str
    summary: dict
    graph: SocialGraph
    initial_roster: WorkerRoster
    roster: WorkerRoster
    state: IntentionState

    def n_urban(self) -> np.ndarray:
        return np.array([r.n_urban for r in self.series])


def initialize(config: ScenarioConfig, rng=None):
    """Build the graph, roster and initial intentions.

    The lowest-index ``floor(initial_urban_fraction * n)`` workers start urban
    with ``x = +x0_magnitude``; the rest start rural with ``-x0_magnitude``.
    Pass ``rng`` to continue drawing from the same stream afterwards.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n = config.n_workers
    graph = random_graph(n, config.weight_upper, config.sparse_factor, rng=rng, seed=config.seed)

    n_u0 = math.floor(config.initial_urban_fraction * n)
    urban = np.arange(n) < n_u0
    hukou = urban.copy() if config.hukou_initial_urban else np.zeros(n, dtype=bool)
    roster = WorkerRoster(urban, hukou)

    x0 = np.where(urban, config.x0_magnitude, -config.x0_magnitude).astype(float)
    if config.x0_jitter > 0:
        side = np.random.default_rng([config.seed, 1])
        x0 = x0 + side.uniform(-config.x0_jitter, config.x0_jitter, size=n)
    return graph, roster, IntentionState(x0, 0.0)


def lattice_coordinates(n: int) -> np.ndarray:
    """(row, col) of each worker on the smallest square lattice holding ``n``.

    Purely cosmetic placement for plotting.
    """
    side = math.isqrt(n - 1) + 1 if n > 0 else 0
    idx = np.arange(n)
    return np.column_stack([idx // side, idx % side]) if n else np.zeros((0, 2), dtype=int)


def run(config: ScenarioConfig) -> SimResult:
    rng = np.random.default_rng(config.seed)
    graph, roster, state = initialize(config, rng)
    initial_roster = roster
    dyn = config.dynamics
    econ = config.econ
    derived = derive_constants(econ)
    verdict = predict_consensus(graph, dyn, config.zero_tol)

    M = system_matrix(graph, dyn)
    dt = config.dt_days
    bound = config.blowup_bound
    n = config.n_workers

    def wage_gap(n_u):
        return expected_wage_differential(derived, econ, float(n_u))

    x = state.x.copy()
    n_u = roster.n_urban
    v = wage_gap(n_u)
    series = [MonthRecord(0.0, n_u, v, dyn.input_gain * v, intention_spread(x), 0, 0)]
    diverged = False
    status = COMPLETED
    t = 0.0

    for month in range(1, config.horizon_months + 1):
        forcing = dyn.input_gain * v

        def deriv(y, forcing=forcing):
            return M @ y + forcing

        halted = False
        for _ in range(config.steps_per_review):
            with np.errstate(over="ignore", invalid="ignore"):
                x = rk4_step(deriv, x, dt)
            if not np.all(np.abs(x) <= bound):
                diverged = True
                if not config.clamp_on_blowup:
                    halted = True
                    break
                # NaN only arises from inf - inf; its sign is meaningless, send it to 0.
                x = np.clip(np.nan_to_num(x, nan=0.0, posinf=bound, neginf=-bound), -bound, bound)
        if halted:
            status = DIVERGED
            break
        t = month * config.migration.review_period_days

        roster, counts = monthly_review(roster, x, config.migration, rng)
        n_u = roster.n_urban
        spread = intention_spread(x)
        if n_u == 0 or n_u == n:
            series.append(MonthRecord(t, n_u, None, None, spread, counts.inflow, counts.outflow))
            status = SECTOR_COLLAPSE
            break
        try:
            v = wage_gap(n_u)
        except EconDomainError:
            series.append(MonthRecord(t, n_u, None, None, spread, counts.inflow, counts.outflow))
            status = SECTOR_COLLAPSE
            break
        series.append(
            MonthRecord(t, n_u, v, dyn.input_gain * v, spread, counts.inflow, counts.outflow)
        )

    final_state = IntentionState(np.clip(x, -bound, bound) if status == DIVERGED else x, t)
    summary = summarize(series, diverged)
    return SimResult(
        config, series, verdict, diverged, status, summary, graph, initial_roster, roster, final_state
    )


def _n_urban_array(series) -> np.ndarray:
    if len(series) and isinstance(series[0], MonthRecord):
        return np.array([r.n_urban for r in series], dtype=float)
    return np.asarray(series, dtype=float)


def overshoot_ratio(series) -> float:
    """Excursion beyond the final level, relative to the net shift.

    Only the part of the trajectory after it first reaches the final level
    counts. Direction follows the net shift (downward runs measure
    undershoot below the final level). Accepts ``MonthRecord`` lists or raw
    head-count sequences.
    """
    n_u = _n_urban_array(series)
    if n_u.size == 0:
        raise ValueError("empty series")
    start, final = n_u[0], n_u[-1]
    sign = 1.0 if final >= start else -1.0
    rel = sign * (n_u - final)  # > 0 means beyond the final level
    reached = np.flatnonzero(rel >= 0)
    excess = float(rel[reached[0]:].max()) if reached.size else 0.0
    return max(0.0, excess) / max(1.0, abs(final - start))


def oscillation_amplitude(series, window_fraction: float = 0.25) -> float:
    """Peak-to-peak head-count over the trailing ``window_fraction`` of samples."""
    if not 0 < window_fraction <= 1:
        raise ValueError(f"window_fraction must lie in (0, 1], got {window_fraction!r}")
    n_u = _n_urban_array(series)
    if n_u.size == 0:
        raise ValueError("empty series")
    k = max(1, math.ceil(window_fraction * n_u.size))
    tail = n_u[-k:]
    return float(tail.max() - tail.min())


def summarize(series, diverged: bool) -> dict:
    n_u = _n_urban_array(series)
    return {
        "n_urban_initial": int(n_u[0]),
        "n_urban_final": int(n_u[-1]),
        "net_shift": int(n_u[-1] - n_u[0]),
        "overshoot_ratio": None if diverged else overshoot_ratio(series),
        "oscillation_amplitude": oscillation_amplitude(series),
        "total_inflow": int(sum(r.inflow for r in series)),
        "total_outflow": int(sum(r.outflow for r in series)),
        "months_simulated": len(series) - 1,
    }
