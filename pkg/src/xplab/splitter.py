"""Constant solving and the ratio split of a unit vector.

Given a projection with measured norms, pick constants (eps_prime, rho,
alpha, beta) satisfying a coupled inequality system, then split a unit
vector fixed by the projection into a small-ratio part (through the
large-coefficient set) and a large-ratio remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .criteria import Check, _check, extract_Ei
from .space import (
    SpVector,
    SupportSet,
    head_proj,
    norm_2w,
    norm_p,
    ratio,
    restrict,
    xp_norm,
)

__all__ = [
    "InfeasibleConstantsError",
    "SplitConstants",
    "solve_constants",
    "SplitResult",
    "split",
]

_MAX_HALVINGS = 60

# The split claims assume the witness criterion fails past N for these
# constants at every unit vector; finite truncations cannot check a
# universally quantified failure, so results carry it as text.
UNVERIFIED_HYPOTHESIS = (
    "assumes the witness criterion fails for (delta, c, eps) on every "
    "normalized vector supported past N; not verifiable at a finite truncation"
)


class InfeasibleConstantsError(ValueError):
    """The constant system has no solution for these inputs."""


@dataclass(frozen=True)
class SplitConstants:
    """Solved constants plus the inputs they answer to.

    Construction re-checks the whole inequality system with exact float
    comparisons and raises naming the violated constraint.
    """

    delta: float
    c: float
    eps: float
    normP: float
    normP2: float
    p: float
    alpha: float
    beta: float
    rho: float
    eps_prime: float

    def __post_init__(self):
        for nm in (
            "delta",
            "c",
            "eps",
            "normP",
            "normP2",
            "p",
            "alpha",
            "beta",
            "rho",
            "eps_prime",
        ):
            v = float(getattr(self, nm))
            if not (math.isfinite(v) and v > 0):
                raise InfeasibleConstantsError(f"{nm} must be positive and finite")
            object.__setattr__(self, nm, v)
        if not self.p > 2:
            raise InfeasibleConstantsError("p must exceed 2")
        if not self.delta * self.normP2 < 1.0:
            raise InfeasibleConstantsError(
                f"premise violated: delta = {self.delta} is not below "
                f"1/normP2 = {1.0 / self.normP2}"
            )
        if not self.eps_prime < min(self.eps, self.delta * self.alpha):
            raise InfeasibleConstantsError(
                "eps_prime must be strictly below min(eps, delta*alpha)"
            )
        beta_cap = min((1.0 - self.delta * self.normP2) / self.normP, self.eps / self.c)
        if not self.beta < beta_cap:
            raise InfeasibleConstantsError(
                f"beta = {self.beta} must be strictly below {beta_cap}"
            )
        if not self.rho <= self.rho_cap():
            raise InfeasibleConstantsError(
                f"rho = {self.rho} exceeds its cap {self.rho_cap()}"
            )
        if not self.alpha >= self.alpha_floor():
            raise InfeasibleConstantsError(
                f"alpha = {self.alpha} is below its floor {self.alpha_floor()}"
            )
        if not self.beta > self.alpha:
            raise InfeasibleConstantsError("beta must exceed alpha")

    def alpha_floor(self) -> float:
        # both denominators are positive once beta clears its cap check
        return max(
            self.beta * self.delta * self.normP2 / (1.0 - self.beta * self.normP),
            self.beta**2 * self.normP / (1.0 - self.delta * self.normP2),
        )

    def rho_cap(self) -> float:
        e = self.p / (self.p - 2.0)
        return min(self.c**-e * self.delta ** (2.0 / (self.p - 2.0)), self.beta**e)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "c": self.c,
            "eps": self.eps,
            "normP": self.normP,
            "normP2": self.normP2,
            "p": self.p,
            "alpha": self.alpha,
            "beta": self.beta,
            "rho": self.rho,
            "eps_prime": self.eps_prime,
        }


def solve_constants(
    delta: float, c: float, eps: float, normP: float, normP2: float, p: float
) -> SplitConstants:
    """Deterministic schedule for the constant system.

    beta is half its cap; alpha the midpoint of [floor, beta), with beta
    halved (at most 60 times) should that interval ever come up empty;
    rho sits exactly at its cap and eps_prime at half its own. The result
    is re-validated by construction.
    """
    delta, c, eps = float(delta), float(c), float(eps)
    normP, normP2, p = float(normP), float(normP2), float(p)
    for nm, v in (("delta", delta), ("c", c), ("eps", eps), ("normP", normP), ("normP2", normP2)):
        if not (math.isfinite(v) and v > 0):
            raise InfeasibleConstantsError(f"{nm} must be positive and finite")
    if not p > 2:
        raise InfeasibleConstantsError("p must exceed 2")
    if not delta * normP2 < 1.0:
        raise InfeasibleConstantsError(
            f"premise violated: delta = {delta} is not below 1/normP2 = {1.0 / normP2}"
        )
    beta = 0.5 * min((1.0 - delta * normP2) / normP, eps / c)
    for _ in range(_MAX_HALVINGS):
        floor = max(
            beta * delta * normP2 / (1.0 - beta * normP),
            beta**2 * normP / (1.0 - delta * normP2),
        )
        if floor < beta:
            alpha = 0.5 * (floor + beta)
            e = p / (p - 2.0)
            rho = min(c**-e * delta ** (2.0 / (p - 2.0)), beta**e)
            eps_prime = 0.5 * min(eps, delta * alpha)
            return SplitConstants(
                delta, c, eps, normP, normP2, p, alpha, beta, rho, eps_prime
            )
        beta *= 0.5
    raise InfeasibleConstantsError(
        "no alpha interval after 60 beta halvings; inputs leave no room"
    )


@dataclass(frozen=True)
class SplitResult:
    """The split of x: large-coefficient set, its image y, remainder z.

    ratios holds (r(x), r(y), r(z)); a degenerate part reports None.
    checks carries the two claims and the two intermediate bounds with
    numbers; claims are evaluated regardless of the premise, whose status
    is recorded separately. assumed restates the unverifiable hypothesis.
    """

    E_x: SupportSet
    y: SpVector
    z: SpVector
    ratios: tuple[float, float | None, float | None]
    checks: tuple[Check, ...]
    premise_met: bool
    degenerate_y: bool
    degenerate_z: bool
    N: int
    constants: SplitConstants
    assumed: str = UNVERIFIED_HYPOTHESIS

    @property
    def claims_ok(self) -> bool:
        return all(c.ok for c in self.checks if c.applicable)

    def to_dict(self) -> dict:
        return {
            "E_x": list(self.E_x.indices),
            "y": [[i, v] for i, v in sorted(self.y.entries.items())],
            "z": [[i, v] for i, v in sorted(self.z.entries.items())],
            "ratios": {
                "x": self.ratios[0],
                "y": self.ratios[1],
                "z": self.ratios[2],
            },
            "checks": [c.to_dict() for c in self.checks],
            "premise_met": self.premise_met,
            "degenerate_y": self.degenerate_y,
            "degenerate_z": self.degenerate_z,
            "N": self.N,
            "constants": self.constants.to_dict(),
            "assumed": self.assumed,
            "claims_ok": self.claims_ok,
        }


def split(x: SpVector, N: int, consts: SplitConstants, P) -> SplitResult:
    """Split a unit vector fixed by P along its large-coefficient set.

    Preconditions, each raising by name: xp_norm(x) = 1 to 1e-9; no support
    at or below N; alpha < ratio(x) < beta; x within 1e-9 of its own image
    under P. The result reports r(y) <= alpha and r(z) >= beta plus the
    dropped-part p-norm and total 2w-norm bounds, with the premise
    |x on E_x|_2w < delta |x|_2w recorded but never enforced.
    """
    N = int(N)
    if N < 0:
        raise ValueError("N must be nonnegative")
    nx = xp_norm(x)
    if abs(nx - 1.0) > 1e-9:
        raise ValueError(f"precondition 'norm' violated: xp_norm(x) = {nx}")
    if not head_proj(x, N).is_zero():
        raise ValueError(f"precondition 'support' violated: x has entries at or below {N}")
    rx = ratio(x)
    if not (consts.alpha < rx < consts.beta):
        raise ValueError(
            f"precondition 'ratio window' violated: ratio(x) = {rx} is outside "
            f"({consts.alpha}, {consts.beta})"
        )
    img = P.apply(x)
    drift = xp_norm(x - img)
    if drift > 1e-9:
        raise ValueError(
            f"precondition 'range membership' violated: xp_norm(x - Px) = {drift}"
        )

    E_x = extract_Ei(x, x.support, consts.rho)
    y = P.apply(restrict(x, E_x))
    z = x - y
    p = x.space.p

    r_y = None if y.is_zero() else ratio(y)
    r_z = None if z.is_zero() else ratio(z)
    dropped_p = norm_p(restrict(x, x.support.difference(E_x)))
    x2 = norm_2w(x)
    xE2 = norm_2w(restrict(x, E_x))

    checks = (
        _check(
            "small_part_ratio",
            r_y if r_y is not None else 0.0,
            "<=",
            consts.alpha,
            applicable=r_y is not None,
            note="" if r_y is not None else "y = 0; nothing to bound",
        ),
        _check(
            "large_part_ratio",
            r_z if r_z is not None else 0.0,
            ">=",
            consts.beta,
            applicable=r_z is not None,
            note="" if r_z is not None else "z = 0; remainder is degenerate",
        ),
        _check("dropped_p_norm", dropped_p, "<=", consts.rho ** ((p - 2.0) / p)),
        _check("total_2w_norm", x2, "<=", consts.beta),
    )
    return SplitResult(
        E_x=E_x,
        y=y,
        z=z,
        ratios=(rx, r_y, r_z),
        checks=checks,
        premise_met=bool(xE2 < consts.delta * x2),
        degenerate_y=y.is_zero(),
        degenerate_z=z.is_zero(),
        N=N,
        constants=consts,
    )
