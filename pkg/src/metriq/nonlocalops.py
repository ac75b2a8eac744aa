"""Nonlocal fractional-derivative oracles.

Two independent references for cross-validating the local and series
operators: a Caputo derivative computed by singularity-removed adaptive
quadrature, and a Grünwald-Letnikov discretization with its known O(h) bias.
Both use lower terminal 0.

The Caputo integrand is rewritten with u = (x - tau)^(1-alpha), which removes
the kernel singularity; what remains is smooth whenever f' is bounded. When
f' itself blows up at 0 (fractional-power series do), the substituted
integrand keeps a weak endpoint singularity, so the adaptive driver uses a
global error budget and always splits the currently-worst panel; a fixed
per-level tolerance split provably stalls on such integrands while the greedy
budget converges in O(log(1/tol)) extra levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DomainError, ToleranceNotMet
from .exprparse import Expr, diff, evaluate
from .localops import FractalityParams, OperatorKind, apply_closed
from .specfun import gamma

__all__ = [
    "QuadratureSpec",
    "caputo",
    "grunwald_letnikov",
    "local_vs_caputo_gap",
]

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class QuadratureSpec:
    """Error control for the Caputo quadrature."""

    abs_tol: float = 1e-8
    max_subdivisions: int = 64
    nodes_per_panel: int = 15

    def __post_init__(self) -> None:
        if not self.abs_tol > 0.0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if self.max_subdivisions < 1:
            raise DomainError(
                f"max_subdivisions must be at least 1, got {self.max_subdivisions!r}"
            )
        if self.nodes_per_panel < 2:
            raise DomainError(
                f"nodes_per_panel must be at least 2, got {self.nodes_per_panel!r}"
            )


@lru_cache(maxsize=8)
def _gauss_rule(n: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return tuple(nodes.tolist()), tuple(weights.tolist())


def caputo(
    f: Expr, alpha: float, x: float, spec: QuadratureSpec = QuadratureSpec()
) -> float:
    """Caputo derivative of order alpha in (0, 1) at x > 0, terminal 0.

    Evaluates (1/Gamma(1-alpha)) * integral_0^x f'(tau) (x-tau)^(-alpha) dtau
    through the substitution u = (x-tau)^(1-alpha):

        1/((1-alpha)*Gamma(1-alpha)) * integral_0^{x^(1-alpha)} f'(x - u^(1/(1-alpha))) du

    integrated adaptively to spec.abs_tol. alpha = 1 is rejected; use the
    classical derivative there.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"caputo order must lie in (0, 1), got {alpha!r}")
    if not x > 0.0:
        raise DomainError(f"caputo requires x > 0, got {x!r}")
    df = diff(f)
    m = 1.0 / (1.0 - alpha)
    upper = x ** (1.0 - alpha)
    nodes, weights = _gauss_rule(spec.nodes_per_panel)

    def integrand(u: float) -> float:
        tau = x - u**m
        if tau < 0.0:  # float fuzz at the endpoint only
            tau = 0.0
        return evaluate(df, tau)

    def gauss(a: float, b: float) -> float:
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        return half * math.fsum(w * integrand(half * t + mid) for t, w in zip(nodes, weights))

    min_width = 64.0 * _EPS * upper

    # panel record: [error, a, b, value, depth, splittable]
    def make_panel(a: float, b: float, depth: int) -> list:
        whole = gauss(a, b)
        mid = 0.5 * (a + b)
        value = gauss(a, mid) + gauss(mid, b)
        err = abs(whole - value)
        splittable = (
            depth < spec.max_subdivisions
            and (b - a) > min_width
            and err > 4.0 * _EPS * (abs(value) + 1e-300)
        )
        return [err, a, b, value, depth, splittable]

    panels = [make_panel(0.0, upper, 0)]
    while True:
        total_err = math.fsum(p[0] for p in panels)
        if total_err <= spec.abs_tol:
            break
        worst_i = -1
        for i, p in enumerate(panels):
            if p[5] and (worst_i < 0 or p[0] > panels[worst_i][0]):
                worst_i = i
        if worst_i < 0:
            raise ToleranceNotMet(
                f"caputo quadrature exhausted {spec.max_subdivisions} subdivision levels",
                achieved=total_err,
            )
        err, a, b, _, depth, _ = panels.pop(worst_i)
        mid = 0.5 * (a + b)
        panels.append(make_panel(a, mid, depth + 1))
        panels.append(make_panel(mid, b, depth + 1))

    integral = math.fsum(p[3] for p in panels)
    # (1-alpha)*Gamma(1-alpha) = Gamma(2-alpha), better conditioned near alpha=1
    return integral / gamma(2.0 - alpha)


def grunwald_letnikov(f: Expr, alpha: float, x: float, h: float) -> float:
    """Grünwald-Letnikov derivative: sum_j (-1)^j C(alpha,j) f(x-jh) / h^alpha.

    Truncated at N = floor(x/h) (lower terminal 0), N capped at 1e6. Carries
    an O(h) bias; at alpha = 1 the weights terminate after two terms and the
    sum is the exact backward difference, so the cap is waived there (the
    work stays constant no matter how small h gets).

    On functions with f(0) != 0 this converges to the Riemann-Liouville
    derivative, which differs from Caputo by the constant's contribution;
    agreement checks should stick to f(0) = 0.
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"grunwald_letnikov order must lie in (0, 1], got {alpha!r}")
    if not x > 0.0:
        raise DomainError(f"grunwald_letnikov requires x > 0, got {x!r}")
    if not h > 0.0:
        raise DomainError(f"step must be positive, got {h!r}")
    steps = x / h
    if alpha != 1.0 and steps > 1e6:
        raise ConfigError(f"x/h = {steps:g} exceeds the 1e6 evaluation cap")
    n = int(math.floor(steps + 1e-9))
    weight = 1.0
    total = evaluate(f, x)
    for j in range(1, n + 1):
        weight *= (j - 1.0 - alpha) / j
        if weight == 0.0:
            break  # exact termination at alpha = 1
        tau = x - j * h
        if tau < 0.0:
            tau = 0.0
        total += weight * evaluate(f, tau)
    return total / h**alpha


def local_vs_caputo_gap(
    f: Expr,
    kind: OperatorKind,
    p: FractalityParams,
    alpha: float,
    x: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """|local closed form - Caputo| at one point; the harness fits its scaling."""
    return abs(apply_closed(kind, p, f, x) - caputo(f, alpha, x, spec))
