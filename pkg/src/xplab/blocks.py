"""Extremal blocks, admissible blocks and their evaluation functionals.

On an index set I the coefficient profile w_n ** (2/(p-2)) maximizes the
2-vs-p ratio among vectors supported on I; we call that vector the extremal
(Rosenthal) block of I. A general block carries a support F, a distinguished
subset E, and constants (delta, c) tying the mass of its E-part to the weight
mass of E. Each block induces a scalar functional through the weighted inner
product; the Holder chain bounds what that functional can see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .space import (
    SpVector,
    SupportSet,
    WeightedSpace,
    inner,
    max_ratio,
    norm_2w,
    norm_p,
    omega,
    ratio,
    restrict,
)

__all__ = [
    "RosenthalBlock",
    "Block",
    "make_rosenthal",
    "make_block",
    "functional_apply",
    "HolderBounds",
    "holder_bounds",
    "extremality_check",
]

# Relative slack for inequality verdicts; float roundoff only.
_SLACK = 1e-12


@dataclass(frozen=True)
class RosenthalBlock:
    """Extremal block of an index set: coefficients w_n ** (2/(p-2)) on I."""

    support: SupportSet
    vector: SpVector

    @property
    def space(self) -> WeightedSpace:
        return self.vector.space


@dataclass(frozen=True)
class Block:
    """General block: vector z on support F, subset E, constants (delta, c).

    Condition a: norm_2w(z restricted to E) >= delta * norm_2w(z).
    Condition b: c * norm_2w(z restricted to E) >= omega(E) ** ((p-2)/2p).

    ``cond_a_ok``/``cond_b_ok`` record the verdicts at construction time.
    Use make_block(..., require=False) to build failing blocks on purpose.
    """

    support: SupportSet
    Eset: SupportSet
    vector: SpVector
    delta: float
    c: float
    cond_a_ok: bool
    cond_b_ok: bool

    @property
    def space(self) -> WeightedSpace:
        return self.vector.space

    def core(self) -> SpVector:
        """The E-part of the block vector."""
        return restrict(self.vector, self.Eset)


def make_rosenthal(space: WeightedSpace, I) -> RosenthalBlock:
    """Extremal block of I; its norm identities are verified at build time.

    norm_2w equals omega(I) ** (1/2), norm_p equals omega(I) ** (1/p) and the
    ratio equals omega(I) ** ((p-2)/2p), all to 1e-10 relative.
    """
    sup = I if isinstance(I, SupportSet) else SupportSet.of(I)
    if len(sup) == 0:
        raise ValueError("extremal block needs a nonempty index set")
    e = space.coeff_exp
    vec = SpVector(space, {n: space.weight(n) ** e for n in sup})
    mass = omega(space, sup)
    checks = (
        (norm_2w(vec), mass**0.5),
        (norm_p(vec), mass ** (1.0 / space.p)),
        (ratio(vec), mass**space.ratio_exp),
    )
    for got, want in checks:
        if abs(got - want) > 1e-10 * max(abs(want), 1e-300):
            raise ValueError(
                f"extremal block identities broke down numerically: {got} vs {want}"
            )
    return RosenthalBlock(sup, vec)


def make_block(
    vector: SpVector,
    E,
    delta: float,
    c: float,
    *,
    require: bool = True,
) -> Block:
    """Build a block from a vector, a subset of its support and (delta, c).

    With require=True (default) a violated condition raises, naming it.
    With require=False the block is built anyway and the condition verdicts
    are recorded; this is how counterexample inputs are constructed.
    """
    if vector.is_zero():
        raise ValueError("block vector must be nonzero")
    sup = vector.support
    Eset = E if isinstance(E, SupportSet) else SupportSet.of(E)
    if not Eset.issubset(sup):
        raise ValueError("E must be a subset of the block support")
    delta = float(delta)
    c = float(c)
    if delta <= 0 or c <= 0:
        raise ValueError("delta and c must be positive")
    space = vector.space
    core2 = norm_2w(restrict(vector, Eset))
    full2 = norm_2w(vector)
    a_ok = core2 >= delta * full2 * (1.0 - _SLACK)
    b_ok = c * core2 >= max_ratio(space, Eset) * (1.0 - _SLACK)
    if require:
        if not a_ok:
            raise ValueError(
                f"condition a fails: E-part mass {core2:.6g} < delta * {full2:.6g}"
            )
        if not b_ok:
            raise ValueError(
                f"condition b fails: c * {core2:.6g} < omega(E)^ratio_exp "
                f"= {max_ratio(space, Eset):.6g}"
            )
    return Block(sup, Eset, vector, delta, c, bool(a_ok), bool(b_ok))


def functional_apply(b: Block | RosenthalBlock, x: SpVector, *, form: str = "restricted") -> float:
    """Value of the block's functional at x.

    For a general block the default form reads only the E coordinates:
    inner(z restricted to E, x) / norm_2w(z restricted to E) ** 2. The
    "full" form uses the whole block vector instead. An extremal block has
    one form: inner(y, x) / norm_2w(y) ** 2.

    Biorthogonality: the functional sends its own block vector to 1.
    """
    if form not in ("restricted", "full"):
        raise ValueError(f"unknown functional form {form!r}")
    if isinstance(b, RosenthalBlock):
        core = b.vector
    else:
        core = b.core() if form == "restricted" else b.vector
    denom = norm_2w(core)
    if denom == 0.0:
        raise ValueError("functional undefined: the normalizing part has zero mass")
    return inner(core, x) / denom**2


@dataclass(frozen=True)
class HolderBounds:
    """The four quantities of the Holder chain plus verdicts.

    lhs2 = |f(x)| * norm_2w(z), rhs2 = norm_2w(x restricted to supp z),
    lhsp = |f(x)| * norm_p(z), rhsp = norm_p(x restricted to supp z),
    where f is the full-support functional of the block. The chain gives
    lhs2 <= rhs2 unconditionally and lhsp <= c * rhsp whenever c covers the
    block's p-vs-2 shape on its support (c_admissible records that; it is
    always true for extremal blocks, whose c is 1).
    """

    lhs2: float
    rhs2: float
    lhsp: float
    rhsp: float
    c: float
    c_admissible: bool
    ok2: bool
    okp: bool


def holder_bounds(b: Block | RosenthalBlock, x: SpVector) -> HolderBounds:
    """Evaluate the Holder chain of the block's full-support functional at x."""
    f = functional_apply(b, x, form="full")
    z = b.vector
    xs = restrict(x, b.support)
    lhs2 = abs(f) * norm_2w(z)
    rhs2 = norm_2w(xs)
    lhsp = abs(f) * norm_p(z)
    rhsp = norm_p(xs)
    if isinstance(b, RosenthalBlock):
        c = 1.0
    else:
        c = b.c
    z2 = norm_2w(z)
    need = max_ratio(b.space, b.support) * norm_p(z)
    admissible = c * z2 >= need * (1.0 - _SLACK)
    ok2 = lhs2 <= rhs2 * (1.0 + _SLACK) + 1e-300
    okp = lhsp <= c * rhsp * (1.0 + _SLACK) + 1e-300
    return HolderBounds(lhs2, rhs2, lhsp, rhsp, c, bool(admissible), bool(ok2), bool(okp))


def extremality_check(space: WeightedSpace, I, x: SpVector, tol: float = 1e-9) -> bool:
    """True iff ratio(x) <= the extremal ratio of I, within tol.

    x must be nonzero and supported inside I. The extremal ratio is
    omega(I) ** ((p-2)/2p), attained exactly by the extremal block profile.
    """
    sup = I if isinstance(I, SupportSet) else SupportSet.of(I)
    if x.is_zero():
        raise ValueError("extremality undefined for the zero vector")
    if not x.support.issubset(sup):
        raise ValueError("x has support outside I")
    return ratio(x) <= max_ratio(space, sup) + tol
