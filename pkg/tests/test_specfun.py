"""Tests for the special-function kernel.

Reference values are frozen from mpmath at 50+ digits (see the inline
comments); the sweeps re-derive references on the fly at dps=40.
"""

import math
import random

import mpmath
import pytest

from metriq.errors import ConvergenceError, DomainError, PoleError, RangeOverflow
from metriq.specfun import (
    MlArgs,
    SeriesTolerance,
    Z_MAX,
    gamma,
    log_gamma,
    mittag_leffler,
    q_exponential,
    stretched_exp,
)


def ml_ref(alpha, z, beta=1.0, dps=60):
    """High-precision Mittag-Leffler reference by direct summation."""
    with mpmath.workdps(dps):
        s = mpmath.mpf(0)
        zz = mpmath.mpf(z)
        for k in range(20000):
            t = zz**k / mpmath.gamma(beta + alpha * k)
            s += t
            if k > 10 and abs(t) < mpmath.mpf(10) ** (-dps + 8) * max(abs(s), mpmath.mpf(1)):
                return float(s)
        raise RuntimeError("reference did not converge")


# ---------------------------------------------------------------- gamma


def test_gamma_positive_integers_exact():
    for n in range(1, 25):
        assert gamma(float(n)) == float(math.factorial(n - 1))
    assert gamma(1.0) == 1.0
    assert gamma(5.0) == 24.0


GAMMA_CASES = [
    # mpmath.gamma at dps=50
    (1.5, 0.88622692545275801365),
    (0.5, 1.7724538509055160273),
    (-0.5, -3.5449077018110320546),
    (-2.5, -0.94530872048294188123),
    (0.1, 9.5135076986687318363),
    (4.7, 15.431411600047431712),
    (120.5, 6.1002949740240058744e197),
    (169.5, 3.281470451067846378e303),
    (-169.5, 5.6482208842233254718e-306),  # exercises the log-space reflection
]


@pytest.mark.parametrize("x,expected", GAMMA_CASES)
def test_gamma_frozen_values(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-12)


def test_gamma_sweep_against_mpmath():
    rng = random.Random(20260815)
    with mpmath.workdps(40):
        for _ in range(250):
            x = math.exp(rng.uniform(math.log(0.1), math.log(170.0)))
            ref = float(mpmath.gamma(x))
            assert abs(gamma(x) / ref - 1.0) < 1e-12, f"x={x!r}"
        for _ in range(120):
            # negative axis, kept a safe distance from the poles
            x = -rng.uniform(0.15, 169.0)
            if abs(x - round(x)) < 0.1:
                continue
            ref = float(mpmath.gamma(x))
            assert abs(gamma(x) / ref - 1.0) < 1e-11, f"x={x!r}"


def test_gamma_recurrence_property():
    rng = random.Random(7)
    for _ in range(200):
        x = rng.uniform(0.5, 80.0)
        assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=5e-13)


def test_gamma_rejects_poles_and_range():
    for bad in (0.0, -1.0, -7.0, -150.0):
        with pytest.raises(PoleError):
            gamma(bad)
    for bad in (170.5, 1e6, -200.5):
        with pytest.raises(RangeOverflow):
            gamma(bad)
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(DomainError):
            gamma(bad)


def test_log_gamma_matches_mpmath():
    with mpmath.workdps(40):
        for x in (0.5, 1.0, 2.0, 2.5, 10.0, 170.0, 1e3, 1e6):
            ref = float(mpmath.loggamma(x))
            assert log_gamma(x) == pytest.approx(ref, rel=1e-13, abs=1e-13)
    with pytest.raises(DomainError):
        log_gamma(0.0)
    with pytest.raises(DomainError):
        log_gamma(-2.5)


# ------------------------------------------------------- mittag_leffler


ML_CASES = [
    # (alpha, z, beta, expected, rtol); references from mpmath summation,
    # dps 60-300 depending on how much cancellation the point carries
    (0.5, 1.0, 1.0, 5.0089800807622834663, 1e-12),
    (0.5, -1.0, 1.0, 0.42758357615580700441, 1e-12),
    (0.5, 2.0, 1.0, 108.94090438997797241, 1e-12),
    (0.5, 10.0, 1.0, 5.3762342836322708968e43, 1e-12),
    (0.3, 2.0, 1.0, 79485.907625183497177, 1e-12),
    (0.3, -2.0, 1.0, 0.29023222616787535326, 5e-10),
    (0.7, 2.5, 1.3, 38.8616563719978422, 1e-12),
    (0.9, -3.0, 1.0, 0.08388835403377326904, 1e-11),
    (1.5, -3.0, 1.3, 0.081202447860983510854, 1e-12),
]


@pytest.mark.parametrize("alpha,z,beta,expected,rtol", ML_CASES)
def test_ml_frozen_values(alpha, z, beta, expected, rtol):
    res = mittag_leffler(MlArgs(alpha, z, beta))
    assert res.value == pytest.approx(expected, rel=rtol)
    assert abs(res.value - expected) <= res.error_bound


def test_ml_reduces_to_exp():
    for z in (-5.0, -1.0, 0.5, 3.0):
        res = mittag_leffler(MlArgs(1.0, z))
        assert res.value == pytest.approx(math.exp(z), rel=1e-13)


def test_ml_reduces_to_cosh():
    for x in (0.5, 1.0, 2.0, 3.0):
        res = mittag_leffler(MlArgs(2.0, x * x))
        assert res.value == pytest.approx(math.cosh(x), rel=1e-13)


def test_ml_second_parameter_identity():
    # E_{1,2}(z) = (e^z - 1)/z
    res = mittag_leffler(MlArgs(1.0, 1.0, 2.0))
    assert res.value == pytest.approx(math.e - 1.0, rel=1e-13)


def test_ml_at_zero_is_exact():
    for alpha in (0.3, 0.5, 1.0, 2.0):
        res = mittag_leffler(MlArgs(alpha, 0.0))
        assert res.value == 1.0
        assert res.error_bound == 0.0
        assert res.terms == 1


def test_ml_error_bound_covers_true_error():
    grid = [
        (0.3, (-2.0, 0.5, 2.0), 1.0),
        (0.5, (-4.0, -1.0, 3.0, 10.0), 1.0),
        (0.9, (-4.0, -1.0, 3.0, 10.0), 1.0),
        (1.3, (-4.0, 3.0), 1.3),
        (2.0, (-4.0, 3.0, 10.0), 1.0),
    ]
    for alpha, zs, beta in grid:
        for z in zs:
            res = mittag_leffler(MlArgs(alpha, z, beta))
            truth = ml_ref(alpha, z, beta)
            err = abs(res.value - truth)
            assert err <= res.error_bound + 1e-15 * abs(truth), (alpha, z, beta)
            assert err <= 1e-7 * max(1.0, abs(truth)), (alpha, z, beta)
            assert math.isfinite(res.error_bound) and res.error_bound > 0.0


def test_ml_budget_exhaustion_then_success():
    # at alpha=0.3, z=4 the series turns over near k=335 and needs ~620 terms
    with pytest.raises(ConvergenceError):
        mittag_leffler(MlArgs(0.3, 4.0))
    res = mittag_leffler(MlArgs(0.3, 4.0), SeriesTolerance(1e-14, 1200))
    # mpmath dps=80: 4.4100941505092755158e+44
    assert res.value == pytest.approx(4.4100941505092755158e44, rel=1e-12)
    assert 500 < res.terms < 700


def test_ml_term_overflow():
    with pytest.raises(RangeOverflow):
        mittag_leffler(MlArgs(0.3, 40.0))


def test_ml_cancellation_regime_bound_is_honest():
    # alpha=0.3, z=-5: terms peak near e^212, so doubles cannot recover the
    # true value 0.13708086902027063758 (mpmath dps=300). The contract is
    # that the returned bound admits this.
    truth = 0.13708086902027063758
    res = mittag_leffler(MlArgs(0.3, -5.0), SeriesTolerance(1e-14, 2000))
    assert abs(res.value - truth) <= res.error_bound
    assert res.error_bound > 1.0


def test_ml_argument_validation():
    with pytest.raises(DomainError):
        MlArgs(0.25, 1.0)
    with pytest.raises(DomainError):
        MlArgs(2.5, 1.0)
    with pytest.raises(DomainError):
        MlArgs(0.5, 1.0, 0.0)
    with pytest.raises(DomainError):
        MlArgs(0.5, Z_MAX * 1.01)
    with pytest.raises(DomainError):
        SeriesTolerance(rel_tol=0.0)
    with pytest.raises(DomainError):
        SeriesTolerance(max_terms=5)


def test_ml_deterministic():
    a = mittag_leffler(MlArgs(0.7, -2.5))
    b = mittag_leffler(MlArgs(0.7, -2.5))
    assert a.value == b.value
    assert a.error_bound == b.error_bound
    assert a.terms == b.terms


# ------------------------------------------- deformed exponentials


def test_q_exponential_frozen():
    assert q_exponential(0.5, 1.0) == pytest.approx(2.25, rel=1e-15)
    assert q_exponential(2.0, 0.5) == pytest.approx(2.0, rel=1e-14)
    assert q_exponential(1.0, 3.0) == math.exp(3.0)


def test_q_exponential_continuous_at_switch():
    for x in (-0.5, 0.3, 1.0, 2.0):
        for q in (1.0 - 2e-8, 1.0 + 2e-8):
            assert q_exponential(q, x) == pytest.approx(math.exp(x), rel=1e-7)


def test_q_exponential_domain():
    with pytest.raises(DomainError):
        q_exponential(3.0, 1.0)
    with pytest.raises(DomainError):
        q_exponential(0.5, -2.0)  # 1 + (1-q)x hits zero
    with pytest.raises(DomainError):
        q_exponential(math.nan, 1.0)
    with pytest.raises(RangeOverflow):
        q_exponential(1.0 - 1e-7, 1e10)


def test_stretched_exp():
    assert stretched_exp(1.0, -2.0) == math.exp(-2.0)
    assert stretched_exp(0.5, 4.0) == pytest.approx(math.exp(2.0), rel=1e-15)
    assert stretched_exp(0.3, 0.0) == 1.0
    with pytest.raises(DomainError):
        stretched_exp(0.0, 1.0)
    with pytest.raises(DomainError):
        stretched_exp(1.5, 1.0)
    with pytest.raises(DomainError):
        stretched_exp(0.5, -1.0)
    with pytest.raises(RangeOverflow):
        stretched_exp(0.9, 1e4)
