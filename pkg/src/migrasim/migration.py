"""Monthly stochastic migration decisions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ._validation import check_positive


class Sector(IntEnum):
    RURAL = 0
    URBAN = 1


@dataclass(frozen=True, eq=False)
class WorkerRoster:
    """Sector tag and hukou flag per worker.

    ``urban`` is a boolean array (True = urban sector).
    """

    urban: np.ndarray
    hukou: np.ndarray

    def __post_init__(self):
        urban = np.asarray(self.urban, dtype=bool).copy()
        hukou = np.asarray(self.hukou, dtype=bool).copy()
        if urban.ndim != 1 or urban.shape != hukou.shape:
            raise ValueError("urban and hukou must be 1-d arrays of equal length")
        if np.any(hukou & ~urban):
            raise ValueError("hukou holders must be urban")
        urban.setflags(write=False)
        hukou.setflags(write=False)
        object.__setattr__(self, "urban", urban)
        object.__setattr__(self, "hukou", hukou)

    @property
    def n(self) -> int:
        return self.urban.shape[0]

    @property
    def n_urban(self) -> int:
        return int(np.count_nonzero(self.urban))

    def sectors(self) -> list[Sector]:
        return [Sector.URBAN if u else Sector.RURAL for u in self.urban]

    def __eq__(self, other):
        if not isinstance(other, WorkerRoster):
            return NotImplemented
        return np.array_equal(self.urban, other.urban) and np.array_equal(self.hukou, other.hukou)


@dataclass(frozen=True)
class MigrationParams:
    beta: float
    review_period_days: float = 30.0

    def __post_init__(self):
        check_positive("beta", self.beta)
        check_positive("review_period_days", self.review_period_days)


@dataclass(frozen=True)
class MigrationCounts:
    inflow: int  # rural -> urban
    outflow: int  # urban -> rural


# Largest double below 1. For |x| >= beta / eps the quotient rounds to exactly
# 1.0; capping keeps the probability strictly below 1 and still monotone.
_BELOW_ONE = np.nextafter(1.0, 0.0)


def migration_probability(x, beta):
    """``|x| / (|x| + beta)``; works elementwise on arrays."""
    check_positive("beta", beta)
    ax = np.abs(x)
    return np.minimum(ax / (ax + beta), _BELOW_ONE)


def monthly_review(roster: WorkerRoster, state, params: MigrationParams, rng):
    """One review pass over all workers.

    Candidates are workers whose intention sign points at the other sector
    (urban with ``x < 0``, rural with ``x > 0``). Each candidate consumes one
    uniform draw, in ascending worker index, and moves if the draw falls below
    its migration probability. Urban hukou holders draw like everyone else but
    never leave. Intentions are not modified.

    Returns ``(new_roster, MigrationCounts)``.
    """
    x = state.x if hasattr(state, "x") else np.asarray(state, dtype=float)
    if x.shape != roster.urban.shape:
        raise ValueError(f"intention length {x.shape} does not match roster {roster.urban.shape}")

    urban = roster.urban
    candidates = np.flatnonzero((urban & (x < 0)) | (~urban & (x > 0)))
    if candidates.size == 0:
        return roster, MigrationCounts(0, 0)

    draws = rng.random(candidates.size)
    move = draws < migration_probability(x[candidates], params.beta)
    move &= ~roster.hukou[candidates]
    movers = candidates[move]

    new_urban = urban.copy()
    new_urban[movers] = ~new_urban[movers]
    inflow = int(np.count_nonzero(~urban[movers]))
    outflow = int(movers.size) - inflow
    return WorkerRoster(new_urban, roster.hukou), MigrationCounts(inflow, outflow)
