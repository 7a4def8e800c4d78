"""Linear intention dynamics on the social digraph.

Each worker's intention evolves as::

    dx_i/dt = a*x_i + f * sum_j W[i, j] * (x_j - x_i) + input_gain * v

i.e. ``dx/dt = (a*I - f*L) x + input_gain * v * 1``. Integration uses fixed-step
classical RK4 with ``v`` held constant over each step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import ParameterError, check_positive, check_state
from .graph import DEFAULT_ZERO_TOL, SocialGraph, has_spanning_tree, in_degrees, laplacian, spectrum

DEFAULT_BLOWUP_BOUND = 1e12


class DivergenceError(ArithmeticError):
    """An intention left the configured blow-up bound during a step."""

    def __init__(self, message, state):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class DynamicsParams:
    a: float
    f: float
    input_gain: float

    def __post_init__(self):
        numeric = isinstance(self.a, (int, float, np.number)) and not isinstance(self.a, bool)
        if not numeric or not np.isfinite(self.a):
            raise ParameterError("a", f"a must be a finite number, got {self.a!r}")
        check_positive("f", self.f, allow_zero=True)
        check_positive("input_gain", self.input_gain, allow_zero=True)


@dataclass(frozen=True, eq=False)
class IntentionState:
    x: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        x = check_state(self.x).copy()
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    def __eq__(self, other):
        if not isinstance(other, IntentionState):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.x, other.x)


@dataclass(frozen=True)
class ConsensusVerdict:
    has_spanning_tree: bool
    lambda2_re: float | None
    consensus_predicted: bool


def _coupling(g: SocialGraph | None, n: int):
    """(W, in-degree) pair; ``None`` graph means no social links."""
    if g is None:
        return np.zeros((n, n)), np.zeros(n)
    if g.n != n:
        raise ValueError(f"intention state has length {n}, graph has {g.n} vertices")
    return g.W, in_degrees(g.W)


def rhs(state: IntentionState, g: SocialGraph | None, params: DynamicsParams, v: float) -> np.ndarray:
    x = state.x
    W, deg = _coupling(g, x.shape[0])
    social = W @ x - deg * x
    return params.a * x + params.f * social + params.input_gain * v


def system_matrix(g: SocialGraph, params: DynamicsParams) -> np.ndarray:
    """``a*I - f*L``, the state matrix of the LTI system."""
    return params.a * np.eye(g.n) - params.f * laplacian(g)


def rk4_step(deriv, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = deriv(x)
    k2 = deriv(x + 0.5 * dt * k1)
    k3 = deriv(x + 0.5 * dt * k2)
    k4 = deriv(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(
    state: IntentionState,
    g: SocialGraph | None,
    params: DynamicsParams,
    v: float,
    dt: float,
    blowup_bound: float = DEFAULT_BLOWUP_BOUND,
) -> IntentionState:
    """Advance one RK4 step of length ``dt`` days.

    Raises
    ------
    DivergenceError
        If any intention exceeds ``blowup_bound`` in magnitude (or overflows).
        The offending raw state is attached as ``exc.state``.
    """
    check_positive("dt", dt)
    n = state.x.shape[0]
    W, deg = _coupling(g, n)
    forcing = params.input_gain * v

    def deriv(x):
        return params.a * x + params.f * (W @ x - deg * x) + forcing

    with np.errstate(over="ignore", invalid="ignore"):
        x_new = rk4_step(deriv, state.x, dt)
    if not np.all(np.isfinite(x_new)) or np.max(np.abs(x_new)) > blowup_bound:
        raise DivergenceError(
            f"intention magnitude exceeded {blowup_bound:g} at t={state.t + dt:g}", x_new
        )
    return IntentionState(x_new, state.t + dt)


def integrate(state, g, params, v, dt, n_steps, blowup_bound=DEFAULT_BLOWUP_BOUND):
    """Apply :func:`step` ``n_steps`` times; returns the final state."""
    for _ in range(int(n_steps)):
        state = step(state, g, params, v, dt, blowup_bound)
    return state


def predict_consensus(
    g: SocialGraph, params: DynamicsParams, zero_tol: float = DEFAULT_ZERO_TOL
) -> ConsensusVerdict:
    """Spectral consensus test.

    Consensus iff the graph has a spanning tree and ``a < f * Re(lambda_2)``,
    with ``lambda_2`` the nonzero Laplacian eigenvalue of least real part.
    The common input term cancels from all pairwise differences, so it plays
    no role here. Equality counts as no consensus.
    """
    tree = has_spanning_tree(g)
    spec = spectrum(laplacian(g), zero_tol)
    predicted = bool(
        tree and spec.lambda2_re is not None and params.a < params.f * spec.lambda2_re
    )
    return ConsensusVerdict(tree, spec.lambda2_re, predicted)


def intention_spread(state) -> float:
    x = state.x if isinstance(state, IntentionState) else np.asarray(state, dtype=float)
    if x.size == 0:
        return 0.0
    return float(np.max(x) - np.min(x))
