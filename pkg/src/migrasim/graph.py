"""Weighted social digraph: random generation, Laplacian, spanning-tree test,
spectrum, and an edge-list text format.

Orientation convention: ``W[i, j]`` is the weight of the arc *from* ``j``
*to* ``i``, so the in-degree of ``i`` is the ``i``-th row sum.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_weight_matrix

DEFAULT_ZERO_TOL = 1e-9


class EigenSolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SocialGraph:
    W: np.ndarray
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        W = check_weight_matrix(self.W)
        W.setflags(write=False)
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return self.W.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SocialGraph):
            return NotImplemented
        return np.array_equal(self.W, other.W)

    def arc_count(self) -> int:
        return int(np.count_nonzero(self.W))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    zero_count: int
    lambda2_re: float | None


def random_graph(n, weight_upper=0.1, sparse_factor=0.0, rng=None, seed=None) -> SocialGraph:
    """Draw every off-diagonal weight uniformly on ``(0, weight_upper)`` and zero
    those below ``sparse_factor``.

    The full ``n * n`` block is drawn in row-major order (diagonal included,
    then discarded) so that the stream consumption is fixed by ``n`` alone.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    if not weight_upper > 0:
        raise ValueError(f"weight_upper must be positive, got {weight_upper!r}")
    if not 0 <= sparse_factor < weight_upper:
        raise ValueError(
            f"sparse_factor must lie in [0, weight_upper={weight_upper!r}), got {sparse_factor!r}"
        )
    if rng is None:
        rng = np.random.default_rng(seed)

    u = rng.random((n, n))
    # random() is on [0, 1); redraw exact zeros to keep the interval open.
    zeros = u == 0.0
    while zeros.any():
        u[zeros] = rng.random(int(zeros.sum()))
        zeros = u == 0.0
    W = weight_upper * u
    W[W < sparse_factor] = 0.0
    np.fill_diagonal(W, 0.0)
    return SocialGraph(W, seed=seed)


def in_degrees(W: np.ndarray) -> np.ndarray:
    # Ascending-index accumulation, independent of BLAS / pairwise summation.
    deg = np.zeros(W.shape[0])
    for j in range(W.shape[1]):
        deg += W[:, j]
    return deg


def laplacian(g: SocialGraph) -> np.ndarray:
    """``L = D - W`` with ``D`` the diagonal in-degree matrix."""
    L = -g.W.copy()
    L[np.diag_indices_from(L)] = in_degrees(g.W)
    return L


def _reachable(adj_out, root: int) -> int:
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adj_out[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen)


def _out_neighbours(W: np.ndarray) -> list[list[int]]:
    # arc j -> i exists iff W[i, j] > 0
    return [np.flatnonzero(W[:, j] > 0).tolist() for j in range(W.shape[0])]


def spanning_tree_roots(g: SocialGraph) -> list[int]:
    """Vertices from which every vertex can be reached along arc direction."""
    adj_out = _out_neighbours(g.W)
    return [r for r in range(g.n) if _reachable(adj_out, r) == g.n]


def has_spanning_tree(g: SocialGraph) -> bool:
    adj_out = _out_neighbours(g.W)
    return any(_reachable(adj_out, r) == g.n for r in range(g.n))


def spectrum(L: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> Spectrum:
    """All eigenvalues of a (nonsymmetric) Laplacian.

    An eigenvalue counts as zero when ``|lambda| < zero_tol * max(1, ||L||_2)``.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"Laplacian must be square, got shape {L.shape}")
    if not zero_tol > 0:
        raise ValueError(f"zero_tol must be positive, got {zero_tol!r}")
    try:
        eig = np.linalg.eigvals(L)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue computation did not converge: {exc}") from exc
    if eig.shape != (L.shape[0],) or not np.all(np.isfinite(eig)):
        raise EigenSolverError("eigenvalue computation returned non-finite values")

    scale = max(1.0, float(np.linalg.norm(L, 2))) if L.size else 1.0
    is_zero = np.abs(eig) < zero_tol * scale
    nonzero = eig[~is_zero]
    lambda2_re = float(nonzero.real.min()) if nonzero.size else None
    return Spectrum(eig.astype(complex), int(is_zero.sum()), lambda2_re)


# -- edge-list text format ---------------------------------------------------
#
#   # migrasim-graph v1
#   n <n>
#   seed <seed|none>
#   <from> <to> <weight>      (one line per arc, 0-based, weight in repr form)


def dumps_edge_list(g: SocialGraph) -> str:
    lines = ["# migrasim-graph v1", f"n {g.n}", f"seed {'none' if g.seed is None else g.seed}"]
    rows, cols = np.nonzero(g.W)
    for i, j in zip(rows.tolist(), cols.tolist()):
        lines.append(f"{j} {i} {float(g.W[i, j])!r}")
    return "\n".join(lines) + "\n"


def loads_edge_list(text: str) -> SocialGraph:
    n = None
    seed = None
    arcs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "n" and len(parts) == 2:
                n = int(parts[1])
            elif parts[0] == "seed" and len(parts) == 2:
                seed = None if parts[1] == "none" else int(parts[1])
            elif len(parts) == 3:
                arcs.append((int(parts[0]), int(parts[1]), float(parts[2])))
            else:
                raise ValueError("expected 'from to weight'")
        except ValueError as exc:
            raise ValueError(f"edge list line {lineno}: {exc}: {raw!r}") from None
    if n is None:
        raise ValueError("edge list is missing the 'n <count>' header")
    W = np.zeros((n, n))
    for src, dst, w in arcs:
        if not (0 <= src < n and 0 <= dst < n):
            raise ValueError(f"arc {src}->{dst} out of range for n={n}")
        W[dst, src] = w
    return SocialGraph(W, seed=seed)
