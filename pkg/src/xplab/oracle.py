"""Dense-grid brute force for small dimensions.

Deliberately a different algorithm from the seeded estimators in
:mod:`xplab.operators`: directions come from an exhaustive grid on the cube
surface (every direction in R^d meets it projectively) with a few rounds of
local refinement. Usable up to dimension 6; meant as the ground truth the
estimators are compared against, never as the production path.
"""

from __future__ import annotations

import numpy as np

from ._dense import col_norm, union_window, vectors_to_cols, window_weights

__all__ = ["brute_opnorm", "brute_ratio_extremum", "brute_min_distance"]

MAX_ORACLE_DIM = 6


def _face_grid(d: int, m: int) -> np.ndarray:
    """All points of an m-per-axis grid on the surface of [-1, 1]^d, as columns."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d == 1:
        return np.array([[1.0, -1.0]])
    lin = np.linspace(-1.0, 1.0, m)
    mesh = np.meshgrid(*([lin] * (d - 1)), indexing="ij")
    rest = np.stack([g.ravel() for g in mesh], axis=0)
    blocks = []
    for k in range(d):
        for s in (1.0, -1.0):
            face = np.empty((d, rest.shape[1]))
            face[k, :] = s
            others = [j for j in range(d) if j != k]
            face[others, :] = rest
            blocks.append(face)
    return np.concatenate(blocks, axis=1)


def _cube_grid(d: int, m: int) -> np.ndarray:
    lin = np.linspace(-1.0, 1.0, m)
    mesh = np.meshgrid(*([lin] * d), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=0)


def _extremize(objective, d: int, m: int, refine_rounds: int, refine_m: int = 5):
    X = _face_grid(d, m)
    vals = objective(X)
    best = int(np.argmax(vals))
    x, fbest = X[:, best].copy(), float(vals[best])
    r = 2.0 / max(m - 1, 1)
    local = _cube_grid(d, refine_m)
    for _ in range(refine_rounds):
        C = x[:, None] + r * local
        keep = np.any(C != 0.0, axis=0)
        C = C[:, keep]
        vals = objective(C)
        b = int(np.argmax(vals))
        if vals[b] > fbest:
            fbest = float(vals[b])
            x = C[:, b].copy()
        r *= 0.35
    return x, fbest


def brute_opnorm(A: np.ndarray, w: np.ndarray, p: float, mode: str = "xp",
                 m: int = 7, refine_rounds: int = 4) -> float:
    """Grid-search the operator norm of a window matrix."""
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    if d > MAX_ORACLE_DIM:
        raise ValueError(f"oracle limited to dimension {MAX_ORACLE_DIM}")

    def objective(X):
        den = col_norm(X, w, p, mode)
        num = col_norm(A @ X, w, p, mode)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den > 0, num / np.maximum(den, 1e-300), -np.inf)

    _, val = _extremize(objective, d, m, refine_rounds)
    return val


def brute_ratio_extremum(V, sense: int, m: int = 13, refine_rounds: int = 4) -> float:
    """Grid-search the 2-vs-p ratio extremum over span(V); sense +1 sup, -1 inf."""
    V = tuple(V)
    space = V[0].space
    idx = union_window(V)
    B = vectors_to_cols(V, idx)
    w = window_weights(space, idx)
    p = space.p
    k = B.shape[1]
    if k > MAX_ORACLE_DIM:
        raise ValueError(f"oracle limited to span dimension {MAX_ORACLE_DIM}")

    def objective(Ac):
        Y = B @ Ac
        num = col_norm(Y, w, p, "2w")
        den = col_norm(Y, w, p, "p")
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(den > 0, num / np.maximum(den, 1e-300), -np.inf)
        return sense * vals

    _, val = _extremize(objective, k, m, refine_rounds)
    return sense * val


def brute_min_distance(x, Y, m: int = 9, refine_rounds: int = 5) -> float:
    """Grid-search min over coefficients a of xp_norm(x - sum a_j y_j).

    The search box comes from a data-independent bound: any minimizer
    satisfies |a|_2 <= 2 xp_norm(x) / sigma_min(W B).
    """
    Y = tuple(Y)
    space = x.space
    idx = union_window(list(Y) + [x])
    B = vectors_to_cols(Y, idx)
    w = window_weights(space, idx)
    p = space.p
    xcol = vectors_to_cols([x], idx)[:, 0]
    k = B.shape[1]
    if k > MAX_ORACLE_DIM:
        raise ValueError(f"oracle limited to span dimension {MAX_ORACLE_DIM}")
    xnorm = float(col_norm(xcol[:, None], w, p, "xp")[0])
    smin = float(np.linalg.svd(B * w[:, None], compute_uv=False)[-1])
    if smin <= 0:
        raise ValueError("distance oracle needs independent span vectors")
    R = 2.0 * xnorm / smin

    def cost(Ac):
        D = xcol[:, None] - B @ Ac
        return col_norm(D, w, p, "xp")

    grid = _cube_grid(k, m) * R
    vals = cost(grid)
    b = int(np.argmin(vals))
    a, fbest = grid[:, b].copy(), float(vals[b])
    r = 2.0 * R / max(m - 1, 1)
    local = _cube_grid(k, 5)
    for _ in range(refine_rounds):
        C = a[:, None] + r * local
        vals = cost(C)
        b = int(np.argmin(vals))
        if vals[b] < fbest:
            fbest = float(vals[b])
            a = C[:, b].copy()
        r *= 0.35
    return fbest
