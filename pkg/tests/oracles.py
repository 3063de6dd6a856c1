"""Independent reference implementations used only by the tests.

Nothing here touches the package's solver machinery: matrices are
assembled from scratch, eigenproblems go through SciPy, and the minimizers
are projected-gradient descent with a Barzilai-Borwein step and an Armijo
backtracking safeguard. Agreement between these and the package is the
point of the tests, so keep them independent.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg


def assemble_model_matrix(n, pairs, w, diag_vector=None, rank_one_shift=False):
    """Sum of w_e * b_e b_e^T plus either a diagonal or the all-ones/n term."""
    T = np.zeros((n, n))
    for (i, j), we in zip(pairs, w):
        T[i, i] += we
        T[j, j] += we
        T[i, j] -= we
        T[j, i] -= we
    if diag_vector is not None:
        T[np.diag_indices(n)] += diag_vector
    if rank_one_shift:
        T += 1.0 / n
    return T


def generalized_eigh_oracle(L, q):
    """Generalized symmetric-definite eigensolve via SciPy (independent path)."""
    return scipy.linalg.eigh(np.asarray(L, dtype=float), np.diag(np.asarray(q, dtype=float)))


def direct_inverse_oracle(T):
    return scipy.linalg.inv(np.asarray(T, dtype=float))


def _pg_minimize(f_and_grad, project, x0, max_iter=50000, residual_tol=1e-9):
    """Projected gradient with BB steps and a non-monotone Armijo safeguard.

    ``f_and_grad(x)`` returns (f, grad) with f = inf outside the domain;
    ``project`` maps any point onto the feasible box. The line search
    compares against the worst of the last few objective values so the
    Barzilai-Borwein steps are rarely truncated.
    """
    x = project(np.asarray(x0, dtype=float).copy())
    f, g = f_and_grad(x)
    step = 1e-3
    prev_x = None
    prev_g = None
    recent = [f]
    for _ in range(max_iter):
        if prev_x is not None:
            dx = x - prev_x
            dg = g - prev_g
            denom = float(dx @ dg)
            if denom > 1e-300:
                step = float(dx @ dx) / denom
            step = min(max(step, 1e-12), 1e6)
        reference = max(recent)
        accepted = False
        for _ in range(200):
            candidate = project(x - step * g)
            fc, gc = f_and_grad(candidate)
            direction = candidate - x
            if fc <= reference + 1e-4 * float(g @ direction) + 1e-300:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        prev_x, prev_g = x, g
        x, f, g = candidate, fc, gc
        recent.append(f)
        if len(recent) > 10:
            recent.pop(0)
        residual = np.max(np.abs(x - project(x - g)), initial=0.0)
        if residual <= residual_tol:
            break
    return x, f


def minimize_joint_objective(S, q_min, max_iter=100000):
    """Minimize -logdet(diag(q)+L(w)) + tr((diag(q)+L(w)) S) over w>=0, q>=q_min."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    m = len(pairs)
    h = np.array([S[i, i] + S[j, j] - 2.0 * S[i, j] for i, j in pairs])
    sdiag = np.diag(S).copy()

    def f_and_grad(x):
        w, q = x[:m], x[m:]
        T = assemble_model_matrix(n, pairs, w, diag_vector=q)
        sign, logdet = np.linalg.slogdet(T)
        if sign <= 0:
            return np.inf, np.zeros_like(x)
        P = np.linalg.inv(T)
        gw = h - np.array([P[i, i] + P[j, j] - 2.0 * P[i, j] for i, j in pairs])
        gq = sdiag - np.diag(P)
        return -logdet + float(np.sum(T * S)), np.concatenate([gw, gq])

    def project(x):
        out = x.copy()
        out[:m] = np.maximum(out[:m], 0.0)
        out[m:] = np.maximum(out[m:], q_min)
        return out

    x0 = np.concatenate([np.full(m, 1.0 / n), np.ones(n)])
    x, f = _pg_minimize(f_and_grad, project, x0, max_iter=max_iter)
    return x[:m], x[m:], f


def minimize_baseline_objective(S, max_iter=100000):
    """Minimize -logdet(L(w) + J/n) + tr(L(w) S) over w >= 0."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    h = np.array([S[i, i] + S[j, j] - 2.0 * S[i, j] for i, j in pairs])

    def f_and_grad(w):
        T = assemble_model_matrix(n, pairs, w, rank_one_shift=True)
        sign, logdet = np.linalg.slogdet(T)
        if sign <= 0:
            return np.inf, np.zeros_like(w)
        P = np.linalg.inv(T)
        gw = h - np.array([P[i, i] + P[j, j] - 2.0 * P[i, j] for i, j in pairs])
        L = assemble_model_matrix(n, pairs, w)
        return -logdet + float(np.sum(L * S)), gw

    def project(w):
        return np.maximum(w, 0.0)

    w0 = np.full(len(pairs), 1.0 / n)
    w, f = _pg_minimize(f_and_grad, project, w0, max_iter=max_iter)
    return w, f
