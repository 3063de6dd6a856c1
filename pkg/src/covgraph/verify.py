"""Optimality verification: edge-weight bounds, candidate screening,
stationarity (KKT) checks, and bound-violation trimming.

At a minimizer of the joint problem every coordinate is stationary: each
positive weight has matching edge cost and effective resistance (1/h = 1/r),
each zero weight has 1/h <= 1/r, and the analogous conditions hold for the
importances against their floor. These checks are computed here from a
freshly inverted model matrix, independently of the solver's maintained
state, so the two paths cross-validate each other.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .graphs import as_covariance, build_graph, laplacian

# Importances are clamped to the floor exactly, so "at the floor" is an
# equality test with a tiny absolute guard.
FLOOR_TOL = 1e-12


@dataclass
class EdgeBoundRecord:
    i: int
    j: int
    w: float
    rho: float
    bound: float
    applicable: bool
    violated: bool
    excess: float


@dataclass
class BoundReport:
    """Per-edge correlation bounds for a learned joint graph.

    The bound applies only to edges whose endpoints both sit strictly above
    the importance floor; others are recorded with ``applicable=False`` and
    never flagged.
    """

    tol: float
    records: list
    n_edges: int
    n_applicable: int
    n_violated: int


@dataclass
class KKTReport:
    """Stationarity residuals of a learned joint graph at tolerance ``tol``.

    ``complementarity_violations`` counts coordinates sitting at their bound
    (zero weight or floored importance) whose one-sided optimality condition
    fails; ``m_matrix_ok`` confirms the learned model matrix has no positive
    off-diagonal entries.
    """

    tol: float
    max_edge_residual: float
    max_vertex_residual: float
    complementarity_violations: int
    m_matrix_ok: bool
    passed: bool


def edge_weight_bound(S, i, j) -> float:
    """Largest weight the pair (i, j) can carry at a joint optimum, provided
    both endpoint importances are above the floor.

    Equals rho^2 / ((1 - rho^2) |S_ij|) with rho the correlation of the
    pair; zero when S_ij = 0, and NaN (inapplicable) when |rho| >= 1.
    """
    S = as_covariance(S).entries
    sij = S[i, j]
    if sij == 0.0:
        return 0.0
    rho = sij / math.sqrt(S[i, i] * S[j, j])
    if abs(rho) >= 1.0:
        return math.nan
    return rho * rho / ((1.0 - rho * rho) * abs(sij))


def variogram_edge_bound(d, r, sill=10.0):
    """Joint-model weight bound for an exponential-variogram covariance, as a
    function of vertex distance: 1 / (sill * (e^(d/r) - e^(-d/r)))."""
    d = np.asarray(d, dtype=float)
    x = d / r
    with np.errstate(divide="ignore"):
        out = 1.0 / (sill * (np.exp(x) - np.exp(-x)))
    return out if out.ndim else float(out)


def baseline_variogram_edge_bound(d, r, sill=10.0):
    """Baseline (combinatorial-Laplacian) weight bound 1/h for the same
    covariance: 1 / (2 sill (1 - e^(-d/r))); unbounded (inf) at d = 0."""
    d = np.asarray(d, dtype=float)
    with np.errstate(divide="ignore"):
        out = 1.0 / (2.0 * sill * (1.0 - np.exp(-d / r)))
    return out if out.ndim else float(out)


def screen_edges(S) -> list:
    """Candidate pairs that can carry weight at an optimum: S_ij > 0."""
    S = as_covariance(S).entries
    n = S.shape[0]
    return [(i, j) for i in range(n) for j in range(i + 1, n) if S[i, j] > 0]


def _graph_of(result_or_graph):
    return getattr(result_or_graph, "graph", result_or_graph)


def bound_report(result_or_graph, S, tol=1e-8) -> BoundReport:
    """Check every stored edge of a joint result against its weight bound."""
    graph = _graph_of(result_or_graph)
    if graph.q is None:
        raise ValueError("bound report requires a graph with vertex importances")
    S = as_covariance(S).entries
    records = []
    n_applicable = 0
    n_violated = 0
    for i, j, w in graph.edges:
        sij = S[i, j]
        rho = float(sij / math.sqrt(S[i, i] * S[j, j]))
        bound = edge_weight_bound(S, i, j)
        above_floor = bool(
            graph.q[i] > graph.q_min + FLOOR_TOL and graph.q[j] > graph.q_min + FLOOR_TOL
        )
        applicable = above_floor and not math.isnan(bound)
        violated = bool(applicable and w > bound + tol)
        records.append(
            EdgeBoundRecord(
                i=int(i),
                j=int(j),
                w=float(w),
                rho=rho,
                bound=float(bound),
                applicable=applicable,
                violated=violated,
                excess=float(w - bound) if violated else 0.0,
            )
        )
        n_applicable += applicable
        n_violated += violated
    return BoundReport(
        tol=tol,
        records=records,
        n_edges=len(records),
        n_applicable=n_applicable,
        n_violated=n_violated,
    )


def kkt_report(result_or_graph, S, tol=1e-6) -> KKTReport:
    """Verify first-order optimality of a joint result from scratch.

    Rebuilds the model matrix, inverts it directly, and checks stationarity
    of every vertex pair (not just stored edges) and every importance.
    """
    graph = _graph_of(result_or_graph)
    if graph.q is None:
        raise ValueError("optimality verification requires a graph with vertex importances")
    S = as_covariance(S).entries
    n = graph.n
    theta = laplacian(graph)
    theta[np.diag_indices(n)] += graph.q
    phi = np.linalg.inv(theta)
    phi = (phi + phi.T) / 2.0

    weight = {(i, j): w for i, j, w in graph.edges}
    max_edge = 0.0
    violations = 0
    for i in range(n):
        for j in range(i + 1, n):
            h = S[i, i] + S[j, j] - 2.0 * S[i, j]
            r = phi[i, i] + phi[j, j] - 2.0 * phi[i, j]
            gap = 1.0 / h - 1.0 / r
            if weight.get((i, j), 0.0) > 0.0:
                max_edge = max(max_edge, abs(gap))
            else:
                if gap > tol:
                    violations += 1
                max_edge = max(max_edge, max(gap, 0.0))

    max_vertex = 0.0
    for i in range(n):
        gap = 1.0 / S[i, i] - 1.0 / phi[i, i]
        if graph.q[i] > graph.q_min + FLOOR_TOL:
            max_vertex = max(max_vertex, abs(gap))
        else:
            if gap > tol:
                violations += 1
            max_vertex = max(max_vertex, max(gap, 0.0))

    off_diag = theta - np.diag(np.diag(theta))
    m_matrix_ok = bool(np.all(off_diag <= 0.0))

    return KKTReport(
        tol=float(tol),
        max_edge_residual=float(max_edge),
        max_vertex_residual=float(max_vertex),
        complementarity_violations=int(violations),
        m_matrix_ok=m_matrix_ok,
        passed=bool(max_edge <= tol and max_vertex <= tol and m_matrix_ok),
    )


def _joint_objective(graph, S) -> float:
    theta = laplacian(graph)
    theta[np.diag_indices(graph.n)] += graph.q
    sign, logdet = np.linalg.slogdet(theta)
    return -logdet + float(np.sum(theta * S))


def trim_violations(result, S, tol=1e-8):
    """Zero out bound-violating edges of a joint result.

    Returns ``(trimmed_result, n_trimmed)``; the trimmed result carries a
    recomputed objective. With no violations the result graph is returned
    unchanged, so the operation is idempotent.
    """
    S = as_covariance(S).entries
    report = bound_report(result, S, tol=tol)
    graph = _graph_of(result)
    if report.n_violated == 0:
        return result, 0

    keep = [
        (rec.i, rec.j, rec.w) for rec in report.records if not rec.violated
    ]
    trimmed = build_graph(graph.n, keep, q=graph.q, q_min=graph.q_min)
    if not hasattr(result, "graph"):
        # Bare Graph in, bare Graph out.
        return trimmed, report.n_violated
    objective = _joint_objective(trimmed, S)
    new_result = dataclasses.replace(result, graph=trimmed, objective=objective)
    return new_result, report.n_violated
