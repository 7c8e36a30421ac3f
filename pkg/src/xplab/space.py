"""Finite truncations of weighted sequence spaces with a two-norm geometry.

A space is a pair (p, w): an exponent p > 2 and positive weights w_1..w_D.
Vectors are sparse coefficient maps on 1-based indices. The space norm is the
maximum of the plain p-norm and the weighted 2-norm; everything downstream
(extremal blocks, projections, criteria) is built from the handful of
primitives defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "MAX_DIM",
    "SpaceMismatchError",
    "SupportSet",
    "WeightedSpace",
    "SpVector",
    "basis_vector",
    "from_pairs",
    "norm_p",
    "norm_2w",
    "xp_norm",
    "ratio",
    "omega",
    "max_ratio",
    "inner",
    "restrict",
    "head_proj",
    "tail_proj",
]

MAX_DIM = 65536

# Below this, weight powers are accumulated in log space; see omega().
TINY_WEIGHT = 1e-100


class SpaceMismatchError(ValueError):
    """Raised when two operands belong to different weighted spaces."""


@dataclass(frozen=True)
class SupportSet:
    """A finite set of positive 1-based indices, kept sorted and duplicate-free."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted({int(i) for i in self.indices}))
        if any(i < 1 for i in idx):
            raise ValueError("support indices must be positive (1-based)")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, it: Iterable[int]) -> "SupportSet":
        return cls(tuple(it))

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in set(self.indices)

    def union(self, other: "SupportSet") -> "SupportSet":
        return SupportSet.of(set(self.indices) | set(other.indices))

    def intersection(self, other: "SupportSet") -> "SupportSet":
        return SupportSet.of(set(self.indices) & set(other.indices))

    def difference(self, other: "SupportSet") -> "SupportSet":
        return SupportSet.of(set(self.indices) - set(other.indices))

    def issubset(self, other: "SupportSet") -> bool:
        return set(self.indices) <= set(other.indices)

    def isdisjoint(self, other: "SupportSet") -> bool:
        return set(self.indices).isdisjoint(other.indices)


def _as_indices(E) -> tuple[int, ...]:
    if isinstance(E, SupportSet):
        return E.indices
    return SupportSet.of(E).indices


@dataclass(frozen=True)
class WeightedSpace:
    """Exponent p > 2 and positive weights; dimension is len(weights).

    The three derived exponents are cached on first use:

    * ``mass_exp``  = 2p/(p-2), the power in the weight mass of a set,
    * ``coeff_exp`` = 2/(p-2), the power giving extremal block coefficients,
    * ``ratio_exp`` = (p-2)/(2p), the power giving the largest 2-vs-p ratio.

    ``mass_exp * ratio_exp == 1`` is asserted to machine precision.
    """

    p: float
    weights: tuple[float, ...]

    def __post_init__(self):
        p = float(self.p)
        if not (p > 2.0):
            raise ValueError(f"exponent must satisfy p > 2, got {p}")
        if not math.isfinite(p):
            raise ValueError("exponent must be finite")
        w = tuple(float(v) for v in self.weights)
        if len(w) == 0:
            raise ValueError("weights must be nonempty")
        if len(w) > MAX_DIM:
            raise ValueError(f"dimension {len(w)} exceeds cap {MAX_DIM}")
        if any(not (v > 0.0 and math.isfinite(v)) for v in w):
            raise ValueError("weights must be positive and finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "weights", w)
        if abs(self.mass_exp * self.ratio_exp - 1.0) > 1e-12:
            raise ValueError("derived exponents are inconsistent at this p")

    @property
    def dim(self) -> int:
        return len(self.weights)

    @cached_property
    def mass_exp(self) -> float:
        return 2.0 * self.p / (self.p - 2.0)

    @cached_property
    def coeff_exp(self) -> float:
        return 2.0 / (self.p - 2.0)

    @cached_property
    def ratio_exp(self) -> float:
        return (self.p - 2.0) / (2.0 * self.p)

    @cached_property
    def warray(self) -> np.ndarray:
        a = np.asarray(self.weights, dtype=float)
        a.setflags(write=False)
        return a

    def weight(self, n: int) -> float:
        if not 1 <= n <= self.dim:
            raise ValueError(f"index {n} outside 1..{self.dim}")
        return self.weights[n - 1]

    def check_index(self, n: int) -> int:
        n = int(n)
        if not 1 <= n <= self.dim:
            raise ValueError(f"index {n} outside 1..{self.dim}")
        return n


@dataclass(frozen=True)
class SpVector:
    """Sparse vector: finitely many (index, coefficient) pairs in a space.

    Exact zeros are dropped on construction so the stored support is the
    true support. Instances are treated as immutable values.
    """

    space: WeightedSpace
    entries: Mapping[int, float]

    def __post_init__(self):
        cleaned: dict[int, float] = {}
        for i, v in self.entries.items():
            i = self.space.check_index(i)
            v = float(v)
            if not math.isfinite(v):
                raise ValueError(f"coefficient at index {i} is not finite")
            if v != 0.0:
                cleaned[i] = v
        object.__setattr__(self, "entries", cleaned)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpVector):
            return NotImplemented
        return self.space == other.space and self.entries == other.entries

    def __hash__(self):
        return hash((self.space, tuple(sorted(self.entries.items()))))

    @property
    def support(self) -> SupportSet:
        return SupportSet.of(self.entries)

    def __getitem__(self, i: int) -> float:
        return self.entries.get(int(i), 0.0)

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "SpVector") -> "SpVector":
        _same_space(self, other)
        out = dict(self.entries)
        for i, v in other.entries.items():
            out[i] = out.get(i, 0.0) + v
        return SpVector(self.space, out)

    def __sub__(self, other: "SpVector") -> "SpVector":
        _same_space(self, other)
        out = dict(self.entries)
        for i, v in other.entries.items():
            out[i] = out.get(i, 0.0) - v
        return SpVector(self.space, out)

    def __mul__(self, t: float) -> "SpVector":
        t = float(t)
        return SpVector(self.space, {i: t * v for i, v in self.entries.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "SpVector":
        return self * -1.0

    def to_dense(self, upto: int | None = None) -> np.ndarray:
        """Dense coefficient array over 1..upto (defaults to the space dim)."""
        n = self.space.dim if upto is None else int(upto)
        out = np.zeros(n)
        for i, v in self.entries.items():
            if i <= n:
                out[i - 1] = v
        return out


def _same_space(x: SpVector, y: SpVector) -> None:
    if x.space != y.space:
        raise SpaceMismatchError("operands live in different weighted spaces")


def basis_vector(space: WeightedSpace, n: int) -> SpVector:
    return SpVector(space, {space.check_index(n): 1.0})


def from_pairs(space: WeightedSpace, pairs: Iterable[tuple[int, float]]) -> SpVector:
    out: dict[int, float] = {}
    for i, v in pairs:
        i = space.check_index(i)
        out[i] = out.get(i, 0.0) + float(v)
    return SpVector(space, out)


def norm_p(x: SpVector) -> float:
    """Plain p-norm of the coefficients."""
    p = x.space.p
    if not x.entries:
        return 0.0
    return math.fsum(abs(v) ** p for v in x.entries.values()) ** (1.0 / p)


def norm_2w(x: SpVector) -> float:
    """Weighted 2-norm: coefficients scaled by their weights."""
    if not x.entries:
        return 0.0
    w = x.space.weights
    return math.sqrt(math.fsum((v * w[i - 1]) ** 2 for i, v in x.entries.items()))


def xp_norm(x: SpVector) -> float:
    """The space norm: max of the p-norm and the weighted 2-norm."""
    return max(norm_p(x), norm_2w(x))


def ratio(x: SpVector) -> float:
    """2-vs-p ratio norm_2w(x)/norm_p(x); undefined at zero."""
    np_ = norm_p(x)
    if np_ == 0.0:
        raise ValueError("ratio undefined for the zero vector")
    return norm_2w(x) / np_


def omega(space: WeightedSpace, E) -> float:
    """Weight mass of an index set: sum of w_n ** (2p/(p-2)) over E.

    Indices must lie in 1..dim. Weights below 1e-100 are accumulated in log
    space so that subnormal per-term powers do not lose the whole sum.
    """
    idx = _as_indices(E)
    if not idx:
        return 0.0
    q = space.mass_exp
    ws = [space.weight(n) for n in idx]
    if min(ws) < TINY_WEIGHT:
        logs = np.array([q * math.log(w) for w in ws])
        m = float(np.max(logs))
        return float(math.exp(m) * np.sum(np.exp(logs - m)))
    return math.fsum(w**q for w in ws)


def max_ratio(space: WeightedSpace, E) -> float:
    """Largest 2-vs-p ratio achievable by vectors supported on E."""
    return omega(space, E) ** space.ratio_exp


def inner(x: SpVector, y: SpVector) -> float:
    """Weighted inner product: sum of x_n * y_n * w_n**2."""
    _same_space(x, y)
    a, b = x.entries, y.entries
    if len(b) < len(a):
        a, b = b, a
    w = x.space.weights
    return math.fsum(v * b[i] * w[i - 1] ** 2 for i, v in a.items() if i in b)


def restrict(x: SpVector, E) -> SpVector:
    """Coordinate restriction of x to the index set E."""
    keep = set(_as_indices(E))
    for n in keep:
        x.space.check_index(n)
    return SpVector(x.space, {i: v for i, v in x.entries.items() if i in keep})


def head_proj(x: SpVector, n: int) -> SpVector:
    """Restriction to indices <= n."""
    n = int(n)
    return SpVector(x.space, {i: v for i, v in x.entries.items() if i <= n})


def tail_proj(x: SpVector, N: int) -> SpVector:
    """Restriction to indices > N."""
    N = int(N)
    return SpVector(x.space, {i: v for i, v in x.entries.items() if i > N})
