"""Local metric derivatives in multiplier form.

Four operator families share a single algebraic shape: on classically
differentiable functions each acts as ``m(x) * d/dx`` with a kind-specific
multiplier ``m``. Because of that shape they inherit the product and chain
rules exactly, which is what separates them from the nonlocal operators in
``nonlocalops``. The limit-quotient forms are provided alongside the closed
forms so convergence can be demonstrated rather than assumed.

The entropic index ``q`` and the Hausdorff pair ``(zeta, l0)`` are linked by
an affine bridge; ``bridge_params``/``bridge_params_inv`` convert between
them, and the multiplier gap between the bridged operators vanishes linearly
in ``(1 - zeta)`` at fixed x (and quadratically in x at fixed order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, unique

from .errors import DomainError
from .exprparse import Expr, diff, evaluate

__all__ = [
    "OperatorKind",
    "FractalityParams",
    "multiplier",
    "apply_closed",
    "apply_limit",
    "bridge_params",
    "bridge_params_inv",
]


@unique
class OperatorKind(Enum):
    """The local derivative families. Values double as the CLI spellings."""

    HAUSDORFF_FC = "hausdorff-fc"  # fractal-continuum form with lower cutoff
    HAUSDORFF_SCALE = "hausdorff-scale"  # d/d(x^alpha) scale form
    CONFORMABLE = "conformable"
    KATUGAMPOLA = "katugampola"
    QDERIV = "qderiv"


@dataclass(frozen=True)
class FractalityParams:
    """Deformation parameters shared by the operator families.

    alpha : order of the conformable/Katugampola/scale forms, in (0, 1]
    zeta  : Hausdorff scaling exponent, in (0, 1]
    q     : entropic index of the q-derivative (q = 1 is classical)
    l0    : lower cutoff along x, > 0
    c1    : constant rescale of the fractal-continuum multiplier, > 0
    """

    alpha: float = 1.0
    zeta: float = 1.0
    q: float = 1.0
    l0: float = 1.0
    c1: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not (0.0 < self.zeta <= 1.0):
            raise DomainError(f"zeta must lie in (0, 1], got {self.zeta!r}")
        if not math.isfinite(self.q):
            raise DomainError(f"q must be finite, got {self.q!r}")
        if not self.l0 > 0.0:
            raise DomainError(f"l0 must be positive, got {self.l0!r}")
        if not self.c1 > 0.0:
            raise DomainError(f"c1 must be positive, got {self.c1!r}")


def multiplier(kind: OperatorKind, p: FractalityParams, x: float) -> float:
    """The factor m(x) such that the operator acts as m(x)*d/dx.

    All kinds require x > 0 except QDERIV, which is defined for any x with
    1 + (1-q)x nonzero.
    """
    if kind is OperatorKind.QDERIV:
        den = 1.0 + (1.0 - p.q) * x
        if den == 0.0:
            raise DomainError(
                f"qderiv multiplier vanishes at the excluded point x = {x:g} (q = {p.q:g})"
            )
        return den
    if not x > 0.0:
        raise DomainError(f"{kind.value} multiplier requires x > 0, got {x!r}")
    if kind is OperatorKind.HAUSDORFF_FC:
        return (x / p.l0 + 1.0) ** (1.0 - p.zeta) / p.c1
    if kind is OperatorKind.HAUSDORFF_SCALE:
        return x ** (1.0 - p.alpha) / p.alpha
    # conformable and Katugampola share the closed-form multiplier; they
    # differ only in their limit quotients
    return x ** (1.0 - p.alpha)


def apply_closed(kind: OperatorKind, p: FractalityParams, f: Expr, x: float) -> float:
    """Closed form m(x)*f'(x) via symbolic differentiation."""
    return multiplier(kind, p, x) * evaluate(diff(f), x)


def apply_limit(
    kind: OperatorKind, p: FractalityParams, f: Expr, x: float, eps: float
) -> float:
    """Finite-eps difference quotient of the operator's limit definition.

    Only the conformable, Katugampola, and q-derivative families come with
    a limit definition; the Hausdorff forms are defined through their
    multipliers and are rejected here.
    """
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    if kind is OperatorKind.CONFORMABLE:
        if not x > 0.0:
            raise DomainError(f"conformable limit requires x > 0, got {x!r}")
        shifted = x + eps * x ** (1.0 - p.alpha)
        return (evaluate(f, shifted) - evaluate(f, x)) / eps
    if kind is OperatorKind.KATUGAMPOLA:
        if not x > 0.0:
            raise DomainError(f"katugampola limit requires x > 0, got {x!r}")
        shifted = x * math.exp(eps * x ** (-p.alpha))
        return (evaluate(f, shifted) - evaluate(f, x)) / eps
    if kind is OperatorKind.QDERIV:
        y = x - eps
        den = 1.0 + (1.0 - p.q) * y
        if den == 0.0:
            raise DomainError(
                f"qderiv difference hits the excluded point y = {y:g} (q = {p.q:g})"
            )
        # deformed difference: (x - y)/(1 + (1-q)y)
        return (evaluate(f, x) - evaluate(f, y)) * den / eps
    raise DomainError(f"no limit definition for kind {kind.value!r}")


def bridge_params(zeta: float, l0: float) -> float:
    """Entropic index q matched to a Hausdorff pair: q = 1 - (1-zeta)/l0."""
    if not l0 > 0.0:
        raise DomainError(f"l0 must be positive, got {l0!r}")
    return 1.0 - (1.0 - zeta) / l0


def bridge_params_inv(q: float, l0: float) -> float:
    """Hausdorff exponent matched to an entropic index: zeta = 1 - (1-q)*l0."""
    if not l0 > 0.0:
        raise DomainError(f"l0 must be positive, got {l0!r}")
    return 1.0 - (1.0 - q) * l0
