"""Block projections, Gram projections and seeded norm estimators.

A block system is a disjointly supported family of blocks sharing global
constants (delta, c); its projection sends x to the sum of functional values
times block vectors and is bounded by max(1/delta, c) in the space norm for
systems of unit blocks. A Gram projector is the orthogonal projection onto a
finite span in the weighted inner product. Operator norms and ratio extrema
over spans are estimated by seeded sphere sampling plus coordinate ascent;
a dense-grid oracle for small dimensions lives in :mod:`xplab.oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._dense import col_norm, union_window, vectors_to_cols, window_weights
from .blocks import Block, RosenthalBlock, functional_apply
from .space import (
    SpVector,
    SupportSet,
    WeightedSpace,
    inner,
    max_ratio,
    norm_2w,
    norm_p,
    ratio,
    restrict,
    xp_norm,
)

__all__ = [
    "BlockSystem",
    "BlockProjection",
    "GramProjector",
    "DenseOperator",
    "OpNormEstimate",
    "project",
    "prop12_bound",
    "ratio_bounds_check",
    "gram_project",
    "estimate_opnorm",
    "estimate_r_sup",
    "estimate_h_inf",
    "prop26_chain",
]

_SLACK = 1e-12

# Windows larger than this refuse dense materialization; estimators are
# desk-scale tools, not production solvers.
DENSE_WINDOW_CAP = 4096

GRAM_COND_GUARD = 1e12

# Safety factor turning a sampled lower bound into the working upper bound.
OPNORM_SAFETY = 1.05


@dataclass(frozen=True)
class BlockSystem:
    """Disjointly supported blocks with global constants (delta, c).

    Every block must satisfy condition a with the global delta and condition
    b with the global c. When delta or c is omitted the tightest valid value
    is derived from the blocks themselves. ``induced`` records, per block,
    the weight the block would carry in the coefficient space: the largest
    ratio achievable on its E-set. ``normalized`` records whether every block
    vector has unit space norm; the projection norm guarantee is stated for
    normalized systems.
    """

    blocks: tuple[Block, ...]
    delta: float | None = None
    c: float | None = None
    induced: tuple[float, ...] = field(init=False)
    normalized: bool = field(init=False)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValueError("block system needs at least one block")
        space = blocks[0].space
        if any(b.space != space for b in blocks):
            raise ValueError("blocks live in different spaces")
        seen: set[int] = set()
        for j, b in enumerate(blocks):
            s = set(b.support.indices)
            if seen & s:
                raise ValueError(f"block {j} overlaps an earlier block's support")
            seen |= s
        core2 = [norm_2w(b.core()) for b in blocks]
        full2 = [norm_2w(b.vector) for b in blocks]
        caps = [max_ratio(space, b.Eset) for b in blocks]
        if any(v == 0.0 for v in core2):
            raise ValueError("a block has zero mass on its E-set")
        delta = self.delta
        c = self.c
        if delta is None:
            delta = min(co / fu for co, fu in zip(core2, full2))
        if c is None:
            c = max(cap / co for cap, co in zip(caps, core2))
        delta = float(delta)
        c = float(c)
        if delta <= 0 or c <= 0:
            raise ValueError("delta and c must be positive")
        for j, (co, fu, cap) in enumerate(zip(core2, full2, caps)):
            if co < delta * fu * (1.0 - _SLACK):
                raise ValueError(f"block {j} violates condition a at delta={delta}")
            if c * co < cap * (1.0 - _SLACK):
                raise ValueError(f"block {j} violates condition b at c={c}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "induced", tuple(caps))
        object.__setattr__(
            self,
            "normalized",
            all(abs(xp_norm(b.vector) - 1.0) <= 1e-9 for b in blocks),
        )

    @property
    def space(self) -> WeightedSpace:
        return self.blocks[0].space


@dataclass(frozen=True)
class BlockProjection:
    """x maps to the sum over blocks of functional(x) times the block vector."""

    system: BlockSystem

    @property
    def space(self) -> WeightedSpace:
        return self.system.space

    def apply(self, x: SpVector) -> SpVector:
        return project(self, x)

    def as_operator(self) -> "DenseOperator":
        sys = self.system
        idx = union_window([b.vector for b in sys.blocks])
        pos = {int(i): k for k, i in enumerate(idx)}
        w = window_weights(sys.space, idx)
        d = len(idx)
        M = np.zeros((d, d))
        for b in sys.blocks:
            core = b.core()
            denom = norm_2w(core) ** 2
            zcol = np.zeros(d)
            frow = np.zeros(d)
            for i, v in b.vector.entries.items():
                zcol[pos[i]] = v
            for i, v in core.entries.items():
                frow[pos[i]] = v * w[pos[i]] ** 2 / denom
            M += np.outer(zcol, frow)
        return DenseOperator(sys.space, M, idx, apply_fn=self.apply)


def project(P: BlockProjection, x: SpVector) -> SpVector:
    """Apply the block projection to x.

    Fixes every block vector and is idempotent: the functionals are
    biorthogonal to the blocks because supports are pairwise disjoint and
    each functional reads only its own E-set.
    """
    if x.space != P.space:
        raise ValueError("x lives in a different space than the projection")
    acc: dict[int, float] = {}
    for b in P.system.blocks:
        t = functional_apply(b, x, form="restricted")
        if t == 0.0:
            continue
        for i, v in b.vector.entries.items():
            acc[i] = acc.get(i, 0.0) + t * v
    return SpVector(P.space, acc)


def prop12_bound(sys: BlockSystem) -> float:
    """Operator norm bound max(1/delta, c) for the system's projection."""
    return max(1.0 / sys.delta, sys.c)


@dataclass(frozen=True)
class RatioWindowRow:
    index: int
    lo: float
    r: float
    hi: float
    ok: bool


def ratio_bounds_check(sys: BlockSystem) -> list[RatioWindowRow]:
    """Per-block window (1/c) * w' <= ratio(z) <= (1/delta) * w'.

    w' is the induced weight of the block. The window is a theorem for unit
    blocks satisfying both conditions; rows report violations rather than
    raising so that counterexample systems can be inspected.
    """
    rows = []
    for j, b in enumerate(sys.blocks):
        r = ratio(b.vector)
        wprime = sys.induced[j]
        lo = wprime / sys.c
        hi = wprime / sys.delta
        ok = lo * (1.0 - _SLACK) <= r <= hi * (1.0 + _SLACK)
        rows.append(RatioWindowRow(j, lo, r, hi, bool(ok)))
    return rows


class GramProjector:
    """Orthogonal projection onto span(basis) in the weighted inner product.

    The Gram matrix is factored once (Cholesky) behind a condition-number
    guard of 1e12; a basis too close to dependent is rejected outright.
    """

    def __init__(self, basis: Sequence[SpVector], cond_guard: float = GRAM_COND_GUARD):
        basis = tuple(basis)
        if not basis:
            raise ValueError("gram projector needs a nonempty basis")
        space = basis[0].space
        if any(v.space != space for v in basis):
            raise ValueError("basis vectors live in different spaces")
        if any(v.is_zero() for v in basis):
            raise ValueError("basis vectors must be nonzero")
        self.basis = basis
        self.space = space
        self.window = union_window(basis)
        self._B = vectors_to_cols(basis, self.window)
        self._w = window_weights(space, self.window)
        G = (self._B * (self._w**2)[:, None]).T @ self._B
        cond = float(np.linalg.cond(G))
        if not math.isfinite(cond) or cond > cond_guard:
            raise ValueError(
                f"gram matrix condition number {cond:.3g} exceeds guard {cond_guard:.3g}"
            )
        try:
            self._L = np.linalg.cholesky(G)
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"gram matrix is not positive definite: {exc}") from exc
        self._G = G
        self._opnorm_memo: dict = {}

    def coefficients(self, x: SpVector) -> np.ndarray:
        rhs = np.array([inner(b, x) for b in self.basis])
        y = np.linalg.solve(self._L, rhs)
        return np.linalg.solve(self._L.T, y)

    def apply(self, x: SpVector) -> SpVector:
        a = self.coefficients(x)
        col = self._B @ a
        return SpVector(
            self.space,
            {int(i): float(v) for i, v in zip(self.window, col) if v != 0.0},
        )

    def as_operator(self) -> "DenseOperator":
        rhs_map = self._B.T * (self._w**2)[None, :]
        coeff = np.linalg.solve(self._L.T, np.linalg.solve(self._L, rhs_map))
        M = self._B @ coeff
        return DenseOperator(self.space, M, self.window, apply_fn=self.apply)

    def opnorm(self, mode: str = "xp", budget: int = 256, seed: int = 0) -> "OpNormEstimate":
        key = (mode, int(budget), int(seed))
        if key not in self._opnorm_memo:
            self._opnorm_memo[key] = estimate_opnorm(self, mode=mode, budget=budget, seed=seed)
        return self._opnorm_memo[key]


def gram_project(Q: GramProjector, x: SpVector) -> SpVector:
    """Project x onto the span in the weighted inner product."""
    if x.space != Q.space:
        raise ValueError("x lives in a different space than the projector")
    return Q.apply(x)


class DenseOperator:
    """A linear map that reads and writes only a window of coordinates.

    The matrix acts on the window's coefficient vector; coordinates outside
    the window are ignored on input and zero on output. That is exactly the
    shape of block and Gram projections, and it means the operator norm over
    the whole space is attained on window-supported vectors.
    """

    def __init__(self, space, matrix, window=None, apply_fn=None):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("operator matrix must be square")
        if window is None:
            window = np.arange(1, matrix.shape[0] + 1)
        window = np.asarray(window, dtype=int)
        if len(window) != matrix.shape[0]:
            raise ValueError("window length must match the matrix size")
        if len(window) > DENSE_WINDOW_CAP:
            raise ValueError(f"window of {len(window)} exceeds dense cap {DENSE_WINDOW_CAP}")
        for i in window:
            space.check_index(int(i))
        self.space = space
        self.matrix = matrix
        self.window = window
        self._apply_fn = apply_fn

    def as_operator(self) -> "DenseOperator":
        return self

    def apply(self, x: SpVector) -> SpVector:
        if self._apply_fn is not None:
            return self._apply_fn(x)
        pos = {int(i): k for k, i in enumerate(self.window)}
        col = np.zeros(len(self.window))
        for i, v in x.entries.items():
            k = pos.get(i)
            if k is not None:
                col[k] = v
        out = self.matrix @ col
        return SpVector(
            self.space,
            {int(i): float(v) for i, v in zip(self.window, out) if v != 0.0},
        )


@dataclass(frozen=True)
class OpNormEstimate:
    """Sampled lower bound on an operator norm, with the witness that attains it.

    ``lower`` equals the norm ratio of ``witness`` recomputed through the
    operator's own apply path, so the bound is certified by an actual vector.
    ``upper`` is an optional analytic bound supplied by the caller.
    """

    lower: float
    upper: float | None
    witness: SpVector
    samples: int
    seed: int
    mode: str
    degenerate: bool = False


def _sample_columns(d: int, budget: int, seed: int) -> np.ndarray:
    cols = np.empty((d, budget))
    for k in range(budget):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), k]))
        cols[:, k] = rng.standard_normal(d)
    return cols


def _ascend_ratio(objective, X: np.ndarray, rounds: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-column coordinate ascent of a scale-invariant objective.

    objective(X) -> per-column values; columns are optimized independently,
    so results match a sequential per-column run (parallel-safe reduction).
    """
    d, n = X.shape
    f = objective(X)
    scale = np.maximum(np.max(np.abs(X), axis=0), 1e-12)
    h = 0.5 * scale
    for _ in range(rounds):
        improved = np.zeros(n, dtype=bool)
        for i in range(d):
            for s in (1.0, -1.0):
                Xc = X.copy()
                Xc[i, :] += s * h
                fc = objective(Xc)
                better = fc > f
                if np.any(better):
                    X[i, better] = Xc[i, better]
                    f[better] = fc[better]
                    improved |= better
        h[~improved] *= 0.5
        if np.all(h < 1e-9 * scale):
            break
    return X, f


def _resolve_operator(op) -> DenseOperator:
    if isinstance(op, DenseOperator):
        return op
    as_op = getattr(op, "as_operator", None)
    if as_op is None:
        raise TypeError("object does not expose a window operator")
    return as_op()


def estimate_opnorm(
    op,
    mode: str = "xp",
    budget: int = 256,
    seed: int = 0,
    rounds: int = 16,
    upper: float | None = None,
) -> OpNormEstimate:
    """Seeded lower estimate of an operator norm in mode "xp" or "2w".

    budget random sphere directions (one child seed per sample, so results
    are reproducible and monotone in budget) are polished by coordinate
    ascent; the best polished column becomes the witness and the reported
    lower bound is its norm ratio recomputed through op.apply.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if mode not in ("xp", "2w"):
        raise ValueError(f"unknown operator norm mode {mode!r}")
    dense = _resolve_operator(op)
    A = dense.matrix
    w = window_weights(dense.space, dense.window)
    p = dense.space.p
    d = len(dense.window)
    X = _sample_columns(d, int(budget), int(seed))

    def objective(Xc):
        den = col_norm(Xc, w, p, mode)
        num = col_norm(A @ Xc, w, p, mode)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(den > 0, num / np.maximum(den, 1e-300), -np.inf)
        return vals

    X, f = _ascend_ratio(objective, X, rounds)
    best = int(np.argmax(f))
    if not np.isfinite(f[best]) or f[best] <= 0.0:
        zero = SpVector(dense.space, {})
        return OpNormEstimate(0.0, upper, zero, int(budget), int(seed), mode, degenerate=True)
    col = X[:, best]
    col = col / col_norm(col[:, None], w, p, mode)[0]
    witness = SpVector(
        dense.space,
        {int(i): float(v) for i, v in zip(dense.window, col) if v != 0.0},
    )
    image = dense.apply(witness)
    if mode == "xp":
        lower = xp_norm(image) / xp_norm(witness)
    else:
        lower = norm_2w(image) / norm_2w(witness)
    return OpNormEstimate(float(lower), upper, witness, int(budget), int(seed), mode)


def _span_matrix(V: Sequence[SpVector]):
    V = tuple(V)
    if not V:
        raise ValueError("span estimate needs at least one vector")
    space = V[0].space
    if any(v.space != space for v in V):
        raise ValueError("span vectors live in different spaces")
    if any(v.is_zero() for v in V):
        raise ValueError("span vectors must be nonzero")
    idx = union_window(V)
    B = vectors_to_cols(V, idx)
    Bn = B / np.linalg.norm(B, axis=0)
    s = np.linalg.svd(Bn, compute_uv=False)
    if s[-1] < 1e-10 * s[0]:
        raise ValueError("span vectors are linearly dependent")
    w = window_weights(space, idx)
    return space, idx, B, w


def _extremize_ratio(V, sense: int, budget: int, seed: int, rounds: int) -> float:
    space, idx, B, w = _span_matrix(V)
    p = space.p
    k = B.shape[1]
    starts = [np.eye(k)]
    if budget > 0:
        starts.append(_sample_columns(k, int(budget), int(seed)))
    A0 = np.concatenate(starts, axis=1)

    def objective(Ac):
        Y = B @ Ac
        num = col_norm(Y, w, p, "2w")
        den = col_norm(Y, w, p, "p")
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = sense * (num / np.maximum(den, 1e-300))
        # dead columns must lose regardless of search direction
        return np.where(den > 0, vals, -np.inf)

    A1, fvals = _ascend_ratio(objective, A0, rounds)
    best = float(np.max(fvals))
    if not np.isfinite(best):
        raise ValueError("ratio extremum search degenerated")
    return sense * best


def estimate_r_sup(V: Sequence[SpVector], budget: int = 192, seed: int = 0, rounds: int = 20) -> float:
    """Estimated supremum of the 2-vs-p ratio over the unit sphere of span(V)."""
    return _extremize_ratio(V, +1, budget, seed, rounds)


def estimate_h_inf(V: Sequence[SpVector], budget: int = 192, seed: int = 0, rounds: int = 20) -> float:
    """Estimated infimum of the 2-vs-p ratio over the unit sphere of span(V)."""
    return _extremize_ratio(V, -1, budget, seed, rounds)


@dataclass(frozen=True)
class ChainResult:
    lhs: float
    rhs: float
    ratio_x: float
    opnorm_lower: float
    opnorm_upper_used: float
    ok: bool


def prop26_chain(
    Q: GramProjector,
    bprime: float,
    x: SpVector,
    *,
    budget: int = 192,
    seed: int = 0,
) -> ChainResult:
    """Norm chain for a span whose unit vectors all have ratio >= bprime.

    lhs is xp_norm(Qx); rhs is opnorm(Q)^(1/2) * ratio(x)^(1/2) * xp_norm(x)
    / bprime, with opnorm(Q) the sampled xp estimate times a 1.05 safety
    factor (recorded). The caller certifies bprime, e.g. via estimate_h_inf.
    """
    if x.is_zero():
        raise ValueError("chain undefined at the zero vector")
    bprime = float(bprime)
    if not 0 < bprime <= 1:
        raise ValueError("bprime must lie in (0, 1]")
    est = Q.opnorm(mode="xp", budget=budget, seed=seed)
    upper = est.lower * OPNORM_SAFETY
    r = ratio(x)
    lhs = xp_norm(gram_project(Q, x))
    rhs = math.sqrt(upper) * math.sqrt(r) * xp_norm(x) / bprime
    ok = lhs <= rhs * (1.0 + _SLACK)
    return ChainResult(lhs, rhs, r, est.lower, upper, bool(ok))
