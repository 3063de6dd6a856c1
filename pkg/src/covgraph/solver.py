"""Coordinate-minimization engine over a maintained dense inverse.

The solver state tracks the inverse ``phi`` of the model matrix, which is
diag(q) + L(w) in joint mode and L(w) + J/n (J all-ones) in baseline mode,
and applies single-coordinate updates. Each applied update changes the
model matrix by a rank-one term ``delta * v v^T``, so ``phi`` is maintained
with the Sherman-Morrison identity

    phi' = phi - delta * (phi v)(phi v)^T / (1 + delta * v^T phi v)

at O(n^2) per update, and the objective change has the closed form
``delta * cost - log(1 + delta * quad)`` where ``quad`` is the current
quadratic form of the coordinate in phi. Quadratic forms of incidence
vectors are read directly off phi entries, so skipped (zero-delta)
coordinates cost O(1).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import log1p

import numpy as np

from .graphs import GraphValidationError, as_covariance, laplacian_from_pairs

MODE_JOINT = "joint"
MODE_BASELINE = "baseline"

# Smallest allowed determinant factor for a baseline edge update; stepping
# past it would make L + J/n numerically singular (disconnected graph).
BASELINE_SINGULARITY_TOL = 1e-10


class SingularModelError(RuntimeError):
    """The baseline model matrix L + J/n is (numerically) singular."""


@dataclass
class CoordinateUpdate:
    """Record of one applied coordinate update.

    ``cost`` is the data-side coefficient of the coordinate (edge cost or
    vertex variance); ``effective`` is its quadratic form in the maintained
    inverse (effective resistance or effective importance), taken before
    the update was applied.
    """

    target: tuple
    delta: float
    cost: float
    effective: float


class SolverState:
    """Mutable single-owner state of one coordinate-minimization run."""

    def __init__(self, mode, S, pairs, w, q, q_min):
        self.mode = mode
        self.S = S
        self.n = S.shape[0]
        self.pairs = [(int(i), int(j)) for i, j in pairs]
        self.w = np.asarray(w, dtype=float).copy()
        self.q = None if q is None else np.asarray(q, dtype=float).copy()
        self.q_min = q_min
        self.edge_costs = np.array([edge_cost(S, i, j) for i, j in self.pairs])
        self._sdiag = np.diag(S).copy()
        self.phi = None
        self.objective = None
        self.epoch_counter = 0
        self.updates_since_refresh = 0
        self.singularity_clips = 0

    @property
    def m(self) -> int:
        return len(self.pairs)

    def pair_arrays(self):
        if not self.pairs:
            empty = np.zeros(0, dtype=int)
            return empty, empty.copy()
        idx = np.array(self.pairs, dtype=int)
        return idx[:, 0], idx[:, 1]

    def laplacian(self) -> np.ndarray:
        idx_i, idx_j = self.pair_arrays()
        return laplacian_from_pairs(self.n, idx_i, idx_j, self.w)

    def model_matrix(self) -> np.ndarray:
        """diag(q) + L in joint mode, L + J/n in baseline mode."""
        L = self.laplacian()
        if self.mode == MODE_JOINT:
            L[np.diag_indices(self.n)] += self.q
            return L
        return L + 1.0 / self.n


def edge_cost(S, i, j) -> float:
    """Quadratic form of the edge's incidence vector in S.

    Equals S_ii + S_jj - 2 S_ij and must be strictly positive; a zero or
    negative value means the two variables are perfectly correlated, which
    no valid covariance for this model admits.
    """
    S = np.asarray(S)
    h = float(S[i, i] + S[j, j] - 2.0 * S[i, j])
    if h <= 0:
        raise GraphValidationError(
            f"edge cost for pair ({i}, {j}) is {h}; covariance is degenerate"
        )
    return h


def _is_connected(n, pairs, w) -> bool:
    adjacency = [[] for _ in range(n)]
    for (i, j), we in zip(pairs, w):
        if we > 0:
            adjacency[i].append(j)
            adjacency[j].append(i)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        v = stack.pop()
        for nb in adjacency[v]:
            if not seen[nb]:
                seen[nb] = True
                count += 1
                stack.append(nb)
    return count == n


def init_state(S, pairs, w0, q0=None, q_min=None) -> SolverState:
    """Build a solver state with phi from direct dense inversion.

    ``pairs`` is the active candidate edge set (i < j, no duplicates) and
    ``w0`` its initial weights. Passing ``q0`` selects joint mode (then
    ``q_min`` is required and q0 must respect it); ``q0=None`` selects
    baseline mode, which requires the initial graph to be connected.
    """
    cov = as_covariance(S)
    S = cov.entries
    n = cov.n

    pairs = [(int(i), int(j)) for i, j in pairs]
    seen = set()
    for i, j in pairs:
        if not 0 <= i < j < n:
            raise GraphValidationError(f"active pair ({i}, {j}) must satisfy 0 <= i < j < n")
        if (i, j) in seen:
            raise GraphValidationError(f"duplicate active pair ({i}, {j})")
        seen.add((i, j))

    w0 = np.broadcast_to(np.asarray(w0, dtype=float), (len(pairs),)).copy()
    if np.any(~np.isfinite(w0)) or np.any(w0 < 0):
        raise GraphValidationError("initial edge weights must be finite and nonnegative")

    if q0 is None:
        if not _is_connected(n, pairs, w0):
            raise SingularModelError(
                "baseline mode needs a connected initial graph; L + J/n is singular"
            )
        state = SolverState(MODE_BASELINE, S, pairs, w0, None, None)
    else:
        if q_min is None or not np.isfinite(q_min) or q_min <= 0:
            raise GraphValidationError(f"q_min must be a positive real, got {q_min!r}")
        q0 = np.broadcast_to(np.asarray(q0, dtype=float), (n,)).copy()
        if np.any(~np.isfinite(q0)) or np.any(q0 < q_min):
            raise GraphValidationError("initial importances must be finite and >= q_min")
        state = SolverState(MODE_JOINT, S, pairs, w0, q0, float(q_min))

    refresh_phi(state)
    return state


def evaluate_objective(state) -> float:
    """Objective from scratch: -logdet(model matrix) + data trace term.

    The trace term is trace((diag(q)+L) S) in joint mode and trace(L S) in
    baseline mode (the J/n shim enters only the log-determinant).
    """
    theta = state.model_matrix()
    sign, logdet = np.linalg.slogdet(theta)
    if sign <= 0:
        raise SingularModelError("model matrix is not positive definite")
    if state.mode == MODE_JOINT:
        trace_term = float(np.sum(theta * state.S))
    else:
        trace_term = float(np.sum(state.laplacian() * state.S))
    return -logdet + trace_term


def refresh_phi(state) -> float:
    """Recompute phi by direct dense inversion; returns the max-abs drift.

    Also re-evaluates the cached objective, so accumulated rounding from
    long runs of rank-one updates is flushed.
    """
    theta = state.model_matrix()
    if state.mode == MODE_BASELINE:
        try:
            np.linalg.cholesky(theta)
        except np.linalg.LinAlgError as exc:
            raise SingularModelError(
                "baseline model matrix is singular (graph disconnected)"
            ) from exc
    phi = np.linalg.inv(theta)
    phi = (phi + phi.T) / 2.0
    drift = 0.0 if state.phi is None else float(np.max(np.abs(phi - state.phi), initial=0.0))
    state.phi = phi
    state.objective = evaluate_objective(state)
    state.updates_since_refresh = 0
    return drift


def _apply_edge(state, e):
    """Optimal single-edge step; returns (delta, cost, effective resistance)."""
    i, j = state.pairs[e]
    phi = state.phi
    r = phi[i, i] + phi[j, j] - 2.0 * phi[i, j]
    h = state.edge_costs[e]
    we = state.w[e]

    delta = 1.0 / h - 1.0 / r
    clamped = delta <= -we
    if clamped:
        delta = -we

    if delta == 0.0:
        return 0.0, h, r

    denom = 1.0 + delta * r
    if state.mode == MODE_BASELINE and denom < BASELINE_SINGULARITY_TOL:
        # Removing this much weight would disconnect the graph; stop just
        # short of the singularity instead of crashing.
        delta = (BASELINE_SINGULARITY_TOL - 1.0) / r
        denom = 1.0 + delta * r
        clamped = False
        state.singularity_clips += 1
        if delta == 0.0:
            return 0.0, h, r

    v = phi[i] - phi[j]
    phi -= (delta / denom) * np.outer(v, v)
    state.w[e] = 0.0 if clamped else we + delta
    state.objective += delta * h - log1p(delta * r)
    state.updates_since_refresh += 1
    return delta, h, r


def _apply_vertex(state, i):
    """Optimal single-importance step; returns (delta, cost, effective importance)."""
    phi = state.phi
    u = phi[i, i]
    p = state._sdiag[i]

    delta = 1.0 / p - 1.0 / u
    floor_gap = state.q_min - state.q[i]
    clamped = delta <= floor_gap
    if clamped:
        delta = floor_gap

    if delta == 0.0:
        return 0.0, p, u

    v = phi[i]
    phi -= (delta / (1.0 + delta * u)) * np.outer(v, v)
    state.q[i] = state.q_min if clamped else state.q[i] + delta
    state.objective += delta * p - log1p(delta * u)
    state.updates_since_refresh += 1
    return delta, p, u


def edge_update(state, e) -> CoordinateUpdate:
    """Apply the optimal update to edge ``e`` (index into the active set)."""
    i, j = state.pairs[e]
    delta, cost, effective = _apply_edge(state, e)
    return CoordinateUpdate(target=("edge", i, j), delta=delta, cost=cost, effective=effective)


def vertex_update(state, i) -> CoordinateUpdate:
    """Apply the optimal update to importance ``i`` (joint mode only)."""
    if state.mode != MODE_JOINT:
        raise ValueError("vertex updates are only defined in joint mode")
    delta, cost, effective = _apply_vertex(state, i)
    return CoordinateUpdate(target=("vertex", int(i)), delta=delta, cost=cost, effective=effective)


def sweep_edges(state) -> float:
    """One pass over all active edges in sorted order; returns the objective change."""
    before = state.objective
    for e in range(len(state.pairs)):
        _apply_edge(state, e)
    return state.objective - before


def sweep_vertices(state) -> float:
    """One pass over all vertices in index order; returns the objective change."""
    before = state.objective
    for i in range(state.n):
        _apply_vertex(state, i)
    return state.objective - before
