"""scikit-learn style wrappers around the graph analysis and the intention
dynamics, so they plug into pipelines, ``clone`` and parameter grids.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dynamics import DynamicsParams, rk4_step, system_matrix
from .graph import DEFAULT_ZERO_TOL, SocialGraph, has_spanning_tree, laplacian, spectrum


class ConsensusAnalyzer(BaseEstimator):
    """Spectral consensus analysis of one social graph.

    ``fit`` takes the weight matrix ``W`` (``W[i, j]`` = arc from ``j`` to
    ``i``). ``predict`` takes rows of ``(a, f)`` coefficient pairs and returns
    whether each pair leads to consensus on the fitted graph, which makes
    phase diagrams over coefficient grids a single call.

    Parameters
    ----------
    a, f : float
        Coefficients used for the ``verdict_`` attribute computed at fit time.
    zero_tol : float
        Relative tolerance below which a Laplacian eigenvalue counts as zero.
    """

    def __init__(self, a=0.0008, f=0.001, zero_tol=DEFAULT_ZERO_TOL):
        self.a = a
        self.f = f
        self.zero_tol = zero_tol

    def fit(self, W, y=None):
        graph = SocialGraph(W)
        spec = spectrum(laplacian(graph), self.zero_tol)
        self.graph_ = graph
        self.n_vertices_ = graph.n
        self.eigenvalues_ = spec.eigenvalues
        self.zero_count_ = spec.zero_count
        self.lambda2_re_ = spec.lambda2_re
        self.has_spanning_tree_ = has_spanning_tree(graph)
        self.consensus_predicted_ = bool(self.predict([[self.a, self.f]])[0])
        return self

    def predict(self, X):
        check_is_fitted(self, "lambda2_re_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected rows of (a, f), got {X.shape[1]} columns")
        if (X[:, 1] < 0).any():
            raise ValueError("f must be nonnegative")
        if not self.has_spanning_tree_ or self.lambda2_re_ is None:
            return np.zeros(X.shape[0], dtype=bool)
        return X[:, 0] < X[:, 1] * self.lambda2_re_

    def threshold(self):
        """Largest ``a / f`` ratio that still yields consensus (exclusive)."""
        check_is_fitted(self, "lambda2_re_")
        return self.lambda2_re_ if self.has_spanning_tree_ else None


class IntentionDynamics(TransformerMixin, BaseEstimator):
    """Propagate intention vectors through the linear dynamics.

    ``fit(W)`` builds the state matrix of the graph; ``transform(X)`` maps each
    row of ``X`` (one intention per worker) to its value after
    ``horizon_days`` of fixed-step RK4 under a constant wage differential
    ``v``.
    """

    def __init__(self, a=0.0008, f=0.001, input_gain=0.02, v=0.0, horizon_days=30.0, dt=0.25):
        self.a = a
        self.f = f
        self.input_gain = input_gain
        self.v = v
        self.horizon_days = horizon_days
        self.dt = dt

    def fit(self, W, y=None):
        params = DynamicsParams(self.a, self.f, self.input_gain)
        steps = self.horizon_days / self.dt
        if self.dt <= 0 or self.horizon_days < 0 or abs(steps - round(steps)) > 1e-9 * max(1, steps):
            raise ValueError("horizon_days must be a nonnegative multiple of dt > 0")
        graph = SocialGraph(W)
        self.system_matrix_ = system_matrix(graph, params)
        self.n_features_in_ = graph.n
        self.n_steps_ = int(round(steps))
        return self

    def transform(self, X):
        check_is_fitted(self, "system_matrix_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} columns, the fitted graph has {self.n_features_in_} vertices"
            )
        M_T = self.system_matrix_.T
        forcing = self.input_gain * self.v

        def deriv(Y):
            return Y @ M_T + forcing

        Y = X.copy()
        for _ in range(self.n_steps_):
            Y = rk4_step(deriv, Y, self.dt)
        return Y
