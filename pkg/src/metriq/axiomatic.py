"""Axiomatic fractional operator acting term-wise on generalized power series.

The operator is defined by three commitments: linearity, the power rule
``(t-a)^nu -> Gamma(1+nu)/Gamma(1+nu-alpha) * (t-a)^(nu-alpha)``, and the
death of constants. Those three cannot coexist exactly with the product and
chain rules for alpha < 1, so instead of pretending they do, this module
measures the residuals: ``leibniz_defect`` and ``chain_defect`` return the
actual gap, and both shrink linearly as alpha approaches 1.

Series are the honest domain of a power rule, so smooth functions enter only
through Taylor polynomials built at the point of interest (``chain_defect``
does this internally, degree 6 by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError, ParseError, SeriesBlowup
from .exprparse import Expr, diff, evaluate
from .specfun import GAMMA_X_MAX, gamma, log_gamma

__all__ = [
    "MAX_TERMS",
    "EXPONENT_MERGE_TOL",
    "GeneralizedPowerSeries",
    "DefectSample",
    "d_alpha",
    "ml_series",
    "eigen_check",
    "leibniz_defect",
    "chain_defect",
    "series_literal",
    "parse_series_literal",
]

MAX_TERMS = 512

# Exponents closer than this are treated as the same power when merging.
# Pairwise float evaluation of equal exponents (e.g. alpha*k - alpha versus
# alpha*(k-1)) differs by at most a few ulps of the exponent magnitude, which
# stays far below this for exponents up to MAX_TERMS.
EXPONENT_MERGE_TOL = 1e-12


def _canonical(
    pairs: list[tuple[float, float]], offset: float
) -> "GeneralizedPowerSeries":
    """Sort by exponent, merge near-equal exponents, drop zero coefficients."""
    pairs = sorted(pairs, key=lambda ce: ce[1])
    merged: list[tuple[float, float]] = []
    for coef, expo in pairs:
        if merged and abs(expo - merged[-1][1]) <= EXPONENT_MERGE_TOL:
            merged[-1] = (merged[-1][0] + coef, merged[-1][1])
        else:
            merged.append((coef, expo))
    merged = [(c, e) for c, e in merged if c != 0.0]
    if len(merged) > MAX_TERMS:
        raise SeriesBlowup(f"series would carry {len(merged)} terms (cap {MAX_TERMS})")
    return GeneralizedPowerSeries(offset, tuple(merged))


@dataclass(frozen=True)
class GeneralizedPowerSeries:
    """Finite sum of real-power terms sum_k c_k (t - a)^{nu_k}.

    ``terms`` holds (coefficient, exponent) pairs with strictly increasing
    exponents and no zero coefficients; build through ``from_terms`` unless
    the input is already canonical. Negative exponents are representable
    (the operator produces them from small powers) and are flagged by
    ``singular_at_offset``.
    """

    offset: float = 0.0
    terms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if not math.isfinite(self.offset):
            raise DomainError(f"series offset must be finite, got {self.offset!r}")
        if len(self.terms) > MAX_TERMS:
            raise SeriesBlowup(f"series carries {len(self.terms)} terms (cap {MAX_TERMS})")
        prev = None
        for coef, expo in self.terms:
            if not (math.isfinite(coef) and math.isfinite(expo)):
                raise DomainError(f"non-finite term ({coef!r}, {expo!r})")
            if coef == 0.0:
                raise DomainError("zero coefficients must be removed (use from_terms)")
            if prev is not None and expo <= prev:
                raise DomainError("exponents must be strictly increasing (use from_terms)")
            prev = expo

    @classmethod
    def from_terms(
        cls, pairs, offset: float = 0.0
    ) -> "GeneralizedPowerSeries":
        """Canonicalize arbitrary (coefficient, exponent) pairs."""
        return _canonical([(float(c), float(e)) for c, e in pairs], float(offset))

    @property
    def singular_at_offset(self) -> bool:
        return bool(self.terms) and self.terms[0][1] < 0.0

    def evaluate(self, t: float) -> float:
        """Value at t; defined on t > offset because exponents may be negative."""
        u = t - self.offset
        if not u > 0.0:
            raise DomainError(
                f"series evaluation requires t > offset ({t:g} <= {self.offset:g})"
            )
        return math.fsum(c * u**e for c, e in self.terms)

    def scaled(self, factor: float) -> "GeneralizedPowerSeries":
        if not math.isfinite(factor):
            raise DomainError(f"scale factor must be finite, got {factor!r}")
        if factor == 0.0:
            return GeneralizedPowerSeries(self.offset, ())
        return _canonical([(c * factor, e) for c, e in self.terms], self.offset)

    def plus(self, other: "GeneralizedPowerSeries") -> "GeneralizedPowerSeries":
        if other.offset != self.offset:
            raise DomainError(
                f"series offsets differ ({self.offset:g} vs {other.offset:g})"
            )
        return _canonical(list(self.terms) + list(other.terms), self.offset)

    def times(self, other: "GeneralizedPowerSeries") -> "GeneralizedPowerSeries":
        if other.offset != self.offset:
            raise DomainError(
                f"series offsets differ ({self.offset:g} vs {other.offset:g})"
            )
        products = [
            (c1 * c2, e1 + e2) for c1, e1 in self.terms for c2, e2 in other.terms
        ]
        return _canonical(products, self.offset)


@dataclass(frozen=True)
class DefectSample:
    """One measured rule violation at a concrete (alpha, x)."""

    alpha: float
    x: float
    defect: float
    rule: str

    def __post_init__(self) -> None:
        if self.rule not in ("leibniz", "chain"):
            raise DomainError(f"rule tag must be 'leibniz' or 'chain', got {self.rule!r}")
        if not math.isfinite(self.defect):
            raise DomainError(f"defect must be finite, got {self.defect!r}")


def _power_rule_factor(nu: float, alpha: float) -> float:
    """Gamma(1+nu)/Gamma(1+nu-alpha), with alpha = 1 reduced exactly to nu."""
    if alpha == 1.0:
        return nu
    if 1.0 + nu <= GAMMA_X_MAX:
        return gamma(1.0 + nu) / gamma(1.0 + nu - alpha)
    # large exponents: the ratio ~ nu^alpha is tame even though each Gamma
    # overflows on its own
    return math.exp(log_gamma(1.0 + nu) - log_gamma(1.0 + nu - alpha))


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"operator order must lie in (0, 1], got {alpha!r}")


def d_alpha(s: GeneralizedPowerSeries, alpha: float) -> GeneralizedPowerSeries:
    """Apply the power rule term-wise; constants vanish.

    Input exponents must be nonnegative (the operator is defined on powers
    of (t-a) with nu >= 0); output exponents nu - alpha may be negative, in
    which case the result is singular at the offset.
    """
    _check_alpha(alpha)
    out: list[tuple[float, float]] = []
    for coef, nu in s.terms:
        if nu < 0.0:
            raise DomainError(f"d_alpha input must have nonnegative exponents, got {nu:g}")
        if nu == 0.0:
            continue
        out.append((coef * _power_rule_factor(nu, alpha), nu - alpha))
    return _canonical(out, s.offset)


def ml_series(alpha: float, lam: float, n_terms: int) -> GeneralizedPowerSeries:
    """Truncated eigen-series sum_{k<n} lambda^k x^{alpha k} / Gamma(1+alpha k)."""
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"ml_series alpha must lie in (0, 2], got {alpha!r}")
    if not math.isfinite(lam):
        raise DomainError(f"lambda must be finite, got {lam!r}")
    if n_terms < 2:
        raise ConfigError(f"ml_series needs at least 2 terms, got {n_terms}")
    if n_terms > MAX_TERMS:
        raise SeriesBlowup(f"ml_series with {n_terms} terms exceeds the {MAX_TERMS} cap")
    pairs: list[tuple[float, float]] = [(1.0, 0.0)]
    if lam != 0.0:
        log_abs_lam = math.log(abs(lam))
        for k in range(1, n_terms):
            arg = 1.0 + alpha * k
            powed = abs(lam) ** k
            if arg <= GAMMA_X_MAX and math.isfinite(powed):
                coef = lam**k / gamma(arg)
            else:
                mag = math.exp(k * log_abs_lam - log_gamma(arg))
                coef = -mag if (lam < 0.0 and k & 1) else mag
            pairs.append((coef, alpha * k))
    return _canonical(pairs, 0.0)


def eigen_check(alpha: float, lam: float, n_terms: int) -> float:
    """Max coefficient gap between D^alpha E-series(n) and lambda*E-series(n-1).

    The identity is an exact index shift, so the gap measures only gamma
    roundoff. Exponents are aligned within EXPONENT_MERGE_TOL before the
    coefficients are compared.
    """
    _check_alpha(alpha)
    if n_terms < 3:
        raise ConfigError(f"eigen_check needs at least 3 terms, got {n_terms}")
    lhs = d_alpha(ml_series(alpha, lam, n_terms), alpha)
    rhs = ml_series(alpha, lam, n_terms - 1).scaled(lam)
    worst = 0.0
    i = j = 0
    while i < len(lhs.terms) or j < len(rhs.terms):
        if i < len(lhs.terms) and j < len(rhs.terms):
            cl, el = lhs.terms[i]
            cr, er = rhs.terms[j]
            if abs(el - er) <= EXPONENT_MERGE_TOL:
                worst = max(worst, abs(cl - cr))
                i += 1
                j += 1
                continue
            if el < er:
                worst = max(worst, abs(cl))
                i += 1
            else:
                worst = max(worst, abs(cr))
                j += 1
        elif i < len(lhs.terms):
            worst = max(worst, abs(lhs.terms[i][0]))
            i += 1
        else:
            worst = max(worst, abs(rhs.terms[j][0]))
            j += 1
    return worst


def leibniz_defect(mu: float, nu: float, alpha: float, x: float) -> float:
    """Product-rule residual on the pair (x^mu, x^nu).

    Returns D^alpha(x^{mu+nu}) minus the two-term product expansion, i.e.
    [G(1+mu+nu)/G(1+mu+nu-a) - G(1+mu)/G(1+mu-a) - G(1+nu)/G(1+nu-a)]
    * x^{mu+nu-alpha}. Zero at alpha = 1; order (1-alpha) nearby.
    """
    _check_alpha(alpha)
    if not (mu > 0.0 and nu > 0.0):
        raise DomainError(f"exponents must be positive, got mu={mu!r}, nu={nu!r}")
    if not x > 0.0:
        raise DomainError(f"evaluation point must be positive, got {x!r}")
    coef = (
        _power_rule_factor(mu + nu, alpha)
        - _power_rule_factor(mu, alpha)
        - _power_rule_factor(nu, alpha)
    )
    return coef * x ** (mu + nu - alpha)


def chain_defect(
    f: Expr,
    w: GeneralizedPowerSeries,
    alpha: float,
    x0: float,
    taylor_degree: int = 6,
) -> float:
    """Chain-rule residual D^alpha(f o w)(x0) - f'(w(x0)) * (D^alpha w)(x0).

    The composite enters the operator as a series: f is replaced by its
    Taylor polynomial of ``taylor_degree`` around w(x0) and composed with w
    by Horner's scheme in series arithmetic. Because the expansion is
    centered exactly at w(x0), the truncation contributes nothing at x0
    itself and the alpha = 1 residual is pure roundoff.
    """
    _check_alpha(alpha)
    if taylor_degree < 1:
        raise ConfigError(f"taylor_degree must be >= 1, got {taylor_degree}")
    if not x0 > w.offset:
        raise DomainError(f"x0 must exceed the series offset, got {x0!r}")
    w0 = w.evaluate(x0)

    coeffs = []
    g = f
    factorial = 1.0
    for j in range(taylor_degree + 1):
        if j > 0:
            g = diff(g)
            factorial *= j
        coeffs.append(evaluate(g, w0) / factorial)

    delta = w.plus(GeneralizedPowerSeries.from_terms([(-w0, 0.0)], w.offset))
    comp = GeneralizedPowerSeries.from_terms([(coeffs[-1], 0.0)], w.offset)
    for a_j in reversed(coeffs[:-1]):
        comp = comp.times(delta).plus(
            GeneralizedPowerSeries.from_terms([(a_j, 0.0)], w.offset)
        )

    lhs = d_alpha(comp, alpha).evaluate(x0)
    rhs = evaluate(diff(f), w0) * d_alpha(w, alpha).evaluate(x0)
    return lhs - rhs


def series_literal(s: GeneralizedPowerSeries) -> str:
    """Render a series as ``a=<offset>; c@e, c@e, ...`` (replayable text form)."""
    head = f"a={s.offset!r}"
    if not s.terms:
        return head + ";"
    body = ", ".join(f"{c!r}@{e!r}" for c, e in s.terms)
    return f"{head}; {body}"


def parse_series_literal(text: str) -> GeneralizedPowerSeries:
    """Inverse of series_literal; tolerant of whitespace, strict otherwise."""
    semi = text.find(";")
    if semi < 0:
        raise ParseError("series literal needs 'a=<offset>; terms'", 0)
    head = text[:semi].strip()
    if not head.startswith("a="):
        raise ParseError("series literal must start with 'a='", 0)
    try:
        offset = float(head[2:])
    except ValueError:
        raise ParseError(f"bad offset {head[2:]!r}", 2) from None
    body = text[semi + 1 :].strip()
    if not body:
        return GeneralizedPowerSeries.from_terms([], offset)
    pairs = []
    pos = semi + 1
    for chunk in text[semi + 1 :].split(","):
        piece = chunk.strip()
        coef, at, expo = piece.partition("@")
        if at != "@":
            raise ParseError(f"term {piece!r} is not of the form c@e", pos)
        try:
            pairs.append((float(coef), float(expo)))
        except ValueError:
            raise ParseError(f"term {piece!r} is not of the form c@e", pos) from None
        pos += len(chunk) + 1
    return GeneralizedPowerSeries.from_terms(pairs, offset)
