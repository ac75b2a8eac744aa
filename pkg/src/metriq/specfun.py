"""Special-function kernel: gamma, Mittag-Leffler, and deformed exponentials.

The gamma implementation is a fixed-coefficient Lanczos approximation rather
than a wrapper around ``math.gamma`` so that results are bit-stable across
platforms and the coefficients are part of the source. The Mittag-Leffler
evaluator is a plain Taylor series with compensated summation and an explicit
error bound; it deliberately refuses arguments outside the window where the
series is trustworthy in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError, PoleError, RangeOverflow

__all__ = [
    "ALPHA_MIN",
    "ALPHA_MAX",
    "Z_MAX",
    "GAMMA_X_MAX",
    "MlArgs",
    "MlResult",
    "SeriesTolerance",
    "gamma",
    "log_gamma",
    "mittag_leffler",
    "q_exponential",
    "stretched_exp",
]

# Evaluation window of the Mittag-Leffler kernel. Below ALPHA_MIN the Taylor
# series needs more than the term budget for moderate z; above Z_MAX the
# partial sums overflow or cancel catastrophically for small alpha.
ALPHA_MIN = 0.3
ALPHA_MAX = 2.0
Z_MAX = 50.0

# gamma() overflows double range just past 171.62; stay on the safe side.
GAMMA_X_MAX = 170.0

_SQRT_TWO_PI = 2.5066282746310002

# Lanczos coefficients, g = 607/128, N = 15 (Godfrey's set). Worst relative
# error measured against a 40-digit reference is 1.8e-15 on (0.1, 170),
# comfortably inside the 1e-12 contract of this module.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_EPS = 2.220446049250313e-16


def _lanczos_sum(z: float) -> float:
    s = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        s += _LANCZOS_C[i] / (z + i)
    return s


def _gamma_positive(x: float) -> float:
    # x >= 0.5; split the power so intermediates stay in range up to x = 170
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    half = t ** (0.5 * z + 0.25) * math.exp(-0.5 * t)
    return _SQRT_TWO_PI * _lanczos_sum(z) * half * half


def _sinpi(x: float) -> float:
    # sin(pi*x) with argument reduction done on x itself, so large |x| does
    # not lose accuracy to pi*x rounding.
    n = math.floor(x)
    r = x - n
    s = math.sin(math.pi * r)
    return -s if (int(n) & 1) else s


def gamma(x: float) -> float:
    """Gamma function on the real line via the Lanczos approximation.

    Parameters
    ----------
    x : float
        Point of evaluation, ``|x| <= 170``. Non-positive integers are poles.

    Returns
    -------
    float
        ``Gamma(x)`` with relative error below 1e-12 on ``(0.1, 170)``.
        Positive integer arguments return the exact factorial value.

    Raises
    ------
    PoleError
        If ``x`` is zero or a negative integer.
    RangeOverflow
        If ``|x| > 170``, where the result or the reflection intermediate
        leaves double range.
    DomainError
        If ``x`` is NaN or infinite.
    """
    if math.isnan(x) or math.isinf(x):
        raise DomainError(f"gamma: argument must be finite, got {x!r}")
    if x == math.floor(x):
        if x <= 0.0:
            raise PoleError(f"gamma: pole at non-positive integer {x:g}")
        if x <= GAMMA_X_MAX:
            return float(math.factorial(int(x) - 1))
    if abs(x) > GAMMA_X_MAX:
        raise RangeOverflow(f"gamma: |x| = {abs(x):g} exceeds the {GAMMA_X_MAX:g} range cap")
    if x < 0.5:
        # reflection; 1-x can reach 171 where the direct form overflows, so
        # fall back to the log form there (the result is then subnormal-tiny)
        if 1.0 - x > GAMMA_X_MAX:
            lg = math.log(math.pi / abs(_sinpi(x))) - log_gamma(1.0 - x)
            val = math.exp(lg)
            return -val if _sinpi(x) < 0.0 else val
        return math.pi / (_sinpi(x) * _gamma_positive(1.0 - x))
    return _gamma_positive(x)


def log_gamma(x: float) -> float:
    """Natural log of Gamma for ``x > 0``, valid for arbitrarily large x.

    Used internally wherever gamma ratios at large arguments would overflow.
    """
    if not x > 0.0:
        raise DomainError(f"log_gamma: requires x > 0, got {x!r}")
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return (
        0.5 * math.log(2.0 * math.pi)
        + (z + 0.5) * math.log(t)
        - t
        + math.log(_lanczos_sum(z))
    )


@dataclass(frozen=True)
class MlArgs:
    """Arguments of the two-parameter Mittag-Leffler function E_{alpha,beta}(z).

    ``alpha`` is restricted to [ALPHA_MIN, ALPHA_MAX]: below 0.3 the series
    needs more terms than the budget allows for moderate z, and values up to 2
    are accepted so the cosh identity E_2(x^2) = cosh(x) stays in reach.
    """

    alpha: float
    z: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not (ALPHA_MIN <= self.alpha <= ALPHA_MAX):
            raise DomainError(
                f"mittag_leffler: alpha = {self.alpha!r} outside [{ALPHA_MIN}, {ALPHA_MAX}]"
            )
        if not self.beta > 0.0:
            raise DomainError(f"mittag_leffler: beta must be positive, got {self.beta!r}")
        if not abs(self.z) <= Z_MAX:
            raise DomainError(f"mittag_leffler: |z| = {abs(self.z):g} exceeds Z_MAX = {Z_MAX:g}")


@dataclass(frozen=True)
class SeriesTolerance:
    """Stopping control for series summation."""

    rel_tol: float = 1e-14
    max_terms: int = 500

    def __post_init__(self) -> None:
        if not self.rel_tol > 0.0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if self.max_terms < 10:
            raise DomainError(f"max_terms must be at least 10, got {self.max_terms!r}")


@dataclass(frozen=True)
class MlResult:
    """Value of a truncated series together with an absolute error bound."""

    value: float
    error_bound: float
    terms: int


def mittag_leffler(args: MlArgs, tol: SeriesTolerance = SeriesTolerance()) -> MlResult:
    """Evaluate E_{alpha,beta}(z) by its Taylor series.

    The sum uses Neumaier-compensated accumulation; plain accumulation loses
    the tolerance once the terms grow past the final value, which happens
    already for moderate z at small alpha. Terms are formed in log space so
    the gamma denominators cannot overflow, and summation stops once the
    current term is below ``rel_tol`` times the partial sum twice in a row.

    Returns
    -------
    MlResult
        The truncated value, an absolute error bound covering both the
        dropped tail and accumulated roundoff, and the number of terms used.

    Raises
    ------
    ConvergenceError
        If ``max_terms`` terms do not reach the tolerance.
    RangeOverflow
        If an individual term leaves double range before the series turns
        over, which happens for large ``|z|`` at small ``alpha``.
    """
    alpha, beta, z = args.alpha, args.beta, args.z

    first = 1.0 / gamma(beta)
    if z == 0.0:
        # beta = 1 gives exactly 1.0 (integer gamma is exact); otherwise the
        # reciprocal carries a couple of ulps.
        bound = 0.0 if beta == 1.0 else 4.0 * _EPS * abs(first)
        return MlResult(first, bound, 1)

    log_abs_z = math.log(abs(z))
    negative = z < 0.0

    total = first
    comp = 0.0          # Neumaier carry
    abs_sum = abs(first)
    rounding = 0.0      # accumulated per-term evaluation error
    prev_abs = abs(first)
    ratio = 0.0
    small_streak = 0
    terms = 1

    for k in range(1, tol.max_terms):
        log_mag = k * log_abs_z - log_gamma(beta + alpha * k)
        if log_mag > 709.0:
            raise RangeOverflow(
                f"mittag_leffler: term {k} overflows double range (alpha={alpha:g}, z={z:g})"
            )
        term = math.exp(log_mag)
        if negative and (k & 1):
            term = -term

        # Neumaier: the branch keeps the low-order part of whichever operand
        # loses bits in the add.
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t

        mag = abs(term)
        abs_sum += mag
        # forward error of exp(k ln z - lgamma): proportional to the log magnitudes
        rounding += mag * _EPS * (4.0 + abs(k * log_abs_z) + abs(log_mag - k * log_abs_z))
        ratio = mag / prev_abs if prev_abs > 0.0 else 0.0
        prev_abs = mag
        terms = k + 1

        if mag < tol.rel_tol * abs(total + comp):
            small_streak += 1
            if small_streak == 2:
                break
        else:
            small_streak = 0
    else:
        raise ConvergenceError(
            f"mittag_leffler: no convergence in {tol.max_terms} terms "
            f"(alpha={alpha:g}, beta={beta:g}, z={z:g})"
        )

    value = total + comp
    # Tail estimate from the last observed ratio; the terms are eventually
    # dominated by a geometric decay, but keep a wide safety factor.
    r = min(max(ratio, 0.5), 0.995)
    tail = prev_abs * r / (1.0 - r) * 4.0
    bound = tail + rounding + 2.0 * _EPS * abs_sum
    return MlResult(value, bound, terms)


def q_exponential(q: float, x: float) -> float:
    """Tsallis q-exponential ``[1 + (1-q)x]^{1/(1-q)}``.

    Falls back to ``exp(x)`` when ``|1-q| < 1e-8``; elsewhere the power is
    taken through ``log1p`` so the small-deformation regime stays accurate.
    """
    if math.isnan(q) or math.isnan(x):
        raise DomainError("q_exponential: NaN argument")
    one_minus_q = 1.0 - q
    if abs(one_minus_q) < 1e-8:
        return math.exp(x)
    u = one_minus_q * x
    if 1.0 + u <= 0.0:
        raise DomainError(
            f"q_exponential: 1 + (1-q)x = {1.0 + u:g} is not positive (q={q:g}, x={x:g})"
        )
    try:
        return math.exp(math.log1p(u) / one_minus_q)
    except OverflowError as exc:
        raise RangeOverflow(f"q_exponential: overflow at q={q:g}, x={x:g}") from exc


def stretched_exp(alpha: float, x: float) -> float:
    """Stretched exponential ``exp(x**alpha)`` for ``x >= 0``, ``alpha in (0, 1]``."""
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"stretched_exp: alpha must lie in (0, 1], got {alpha!r}")
    if x < 0.0:
        if alpha != 1.0:
            raise DomainError(
                f"stretched_exp: x < 0 undefined for non-integer alpha (x={x:g}, alpha={alpha:g})"
            )
        return math.exp(x)
    try:
        return math.exp(x**alpha)
    except OverflowError as exc:
        raise RangeOverflow(f"stretched_exp: overflow at alpha={alpha:g}, x={x:g}") from exc
