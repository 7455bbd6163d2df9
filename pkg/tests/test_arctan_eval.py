"""Series kernels: certified containment, exact states, benchmarks."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from machinpi.arctan_eval import (
    SeriesKernel,
    arctan_limit,
    arctan_reciprocal,
    benchmark_csv,
    convergence_benchmark,
    gh_states,
)
from machinpi.errors import BudgetError, DomainError, PrecisionCapError

ALL_KERNELS = list(SeriesKernel)
SERIES_KERNELS = [
    SeriesKernel.MACLAURIN,
    SeriesKernel.EULER_2F1,
    SeriesKernel.ITERATIVE_GH,
]

DIVERSE_BETAS = [
    Fraction(2),
    Fraction(3),
    Fraction(5),
    Fraction(-7),
    Fraction(239),
    Fraction(-239),
    Fraction(7, 3),
    Fraction(-7, 3),
    Fraction(83443),
    Fraction(1758719, 147153121) ** -1,  # companion-shaped rational
    Fraction(10**50),
]


def mp_atan_recip(f: Fraction, dps: int = 80) -> Fraction:
    with mpmath.workdps(dps):
        v = mpmath.atan(mpmath.mpf(f.denominator) / f.numerator)
        return Fraction(mpmath.nstr(v, dps - 10))


def assert_contains_truth(ball, beta: Fraction, precision: int) -> None:
    truth = mp_atan_recip(beta)
    slack = Fraction(1, 10**65)
    assert ball.lower - slack <= truth <= ball.upper + slack
    assert ball.upper - ball.lower <= Fraction(2, 10**precision)


# --------------------------------------------------------- gh state stream


@pytest.mark.parametrize("beta", [Fraction(5), Fraction(7, 3), Fraction(-3)])
def test_gh_states_invariant_and_recurrence(beta):
    states = gh_states(beta, 20)
    assert states[0].g == 2 * beta
    assert states[0].h == 1
    d = 4 * beta**2 + 1
    for s in states:
        assert s.g**2 + s.h**2 == d ** (2 * s.n - 1)
    for prev, cur in zip(states, states[1:]):
        assert cur.g == prev.g * (1 - 4 * beta**2) + 4 * beta * prev.h
        assert cur.h == prev.h * (1 - 4 * beta**2) - 4 * beta * prev.g
        assert cur.n == prev.n + 1


def test_gh_states_sum_to_arctan():
    # term_n = (2/(2n-1)) * g_n / (g_n^2 + h_n^2) sums to arctan(1/beta)
    beta = Fraction(5)
    total = Fraction(0)
    for s in gh_states(beta, 30):
        total += Fraction(2, 2 * s.n - 1) * s.g / (s.g**2 + s.h**2)
    assert abs(total - mp_atan_recip(beta)) < Fraction(1, 10**40)


def test_gh_states_rejects_zero():
    with pytest.raises(DomainError):
        gh_states(0, 3)


# ------------------------------------------------- certified ball kernels


@pytest.mark.parametrize("kernel", SERIES_KERNELS, ids=lambda k: k.value)
@pytest.mark.parametrize("beta", DIVERSE_BETAS, ids=str)
def test_kernels_contain_truth_60_digits(kernel, beta):
    if kernel != SeriesKernel.EULER_2F1 and abs(beta) < 1:
        pytest.skip("kernel needs |beta| >= 1")
    ball = arctan_reciprocal(beta, 60, kernel)
    assert_contains_truth(ball, beta, 60)


def test_kernels_pairwise_overlap():
    for beta in DIVERSE_BETAS:
        balls = [
            arctan_reciprocal(beta, 50, k)
            for k in SERIES_KERNELS
            if not (k != SeriesKernel.EULER_2F1 and abs(beta) < 1)
        ]
        for a in balls:
            for b in balls:
                assert a.lower <= b.upper and b.lower <= a.upper


@given(
    st.fractions(
        min_value=Fraction(-(10**9)), max_value=Fraction(10**9), max_denominator=10**4
    ).filter(lambda f: abs(f) >= Fraction(3, 2)),  # maclaurin stalls as |beta| -> 1
    st.integers(min_value=20, max_value=120),
    st.sampled_from(SERIES_KERNELS),
)
@settings(max_examples=60)
def test_kernel_containment_property(beta, precision, kernel):
    ball = arctan_reciprocal(beta, precision, kernel)
    truth = mp_atan_recip(beta, dps=160)
    slack = Fraction(1, 10**140)
    assert ball.lower - slack <= truth <= ball.upper + slack
    assert ball.upper - ball.lower <= Fraction(2, 10**precision)


def test_euler_handles_fractional_beta_below_one():
    beta = Fraction(1, 2)  # argument 2, well outside the other kernels
    ball = arctan_reciprocal(beta, 50, SeriesKernel.EULER_2F1)
    assert_contains_truth(ball, beta, 50)


def test_euler_handles_negative_fractional_beta():
    beta = Fraction(-2, 5)
    ball = arctan_reciprocal(beta, 40, SeriesKernel.EULER_2F1)
    truth = mp_atan_recip(beta)
    assert ball.lower - Fraction(1, 10**60) <= truth <= ball.upper + Fraction(1, 10**60)


def test_beta_one_is_pi_over_4():
    ball = arctan_reciprocal(1, 40, SeriesKernel.ITERATIVE_GH)
    with mpmath.workdps(60):
        quarter_pi = Fraction(mpmath.nstr(mpmath.pi / 4, 50))
    assert ball.lower <= quarter_pi <= ball.upper


def test_domain_errors():
    with pytest.raises(DomainError):
        arctan_reciprocal(0, 30)
    with pytest.raises(DomainError):
        arctan_reciprocal(Fraction(1, 2), 30, SeriesKernel.MACLAURIN)
    with pytest.raises(DomainError):
        arctan_reciprocal(Fraction(-2, 3), 30, SeriesKernel.ITERATIVE_GH)
    with pytest.raises(ValueError):
        arctan_reciprocal(5, 0)


def test_precision_cap_respected(monkeypatch):
    monkeypatch.setenv("MACHIN_PRECISION_CAP", "100")
    with pytest.raises(PrecisionCapError):
        arctan_reciprocal(5, 101)


def test_max_terms_budget():
    with pytest.raises(BudgetError):
        # beta barely above 1: ~0 digits/term for maclaurin
        arctan_reciprocal(Fraction(101, 100), 60, SeriesKernel.MACLAURIN, max_terms=50)


# ------------------------------------------------------------ limit kernel


def test_arctan_limit_small_exact_values():
    assert arctan_limit(1, 1) == Fraction(1)
    assert arctan_limit(0, 5) == Fraction(0)
    s10 = arctan_limit(1, 10)
    assert abs(s10 - Fraction(787217176, 10**9)) < Fraction(1, 10**8)


def test_arctan_limit_converges_from_above():
    truth = mp_atan_recip(Fraction(1))
    for n in (10, 100, 1000):
        s = arctan_limit(1, n)
        err = s - truth
        assert 0 < err <= Fraction(1, 2 * n * n) + Fraction(1, 10**40)


def test_arctan_limit_error_quarters_when_n_doubles():
    truth = mp_atan_recip(Fraction(1))
    for n in (100, 1000):
        e1 = arctan_limit(1, n) - truth
        e2 = arctan_limit(1, 2 * n) - truth
        assert e2 / e1 < Fraction(26, 100)


def test_arctan_limit_rejects_bad_n():
    with pytest.raises(DomainError):
        arctan_limit(1, 0)


def test_limit_kernel_ball_contains_truth():
    ball = arctan_reciprocal(5, 6, SeriesKernel.LIMIT_FORMULA)
    assert_contains_truth(ball, Fraction(5), 6)
    neg = arctan_reciprocal(-5, 5, SeriesKernel.LIMIT_FORMULA)
    truth = mp_atan_recip(Fraction(-5))
    assert neg.lower <= truth <= neg.upper


def test_limit_kernel_precision_cap():
    with pytest.raises(BudgetError):
        arctan_reciprocal(5, 13, SeriesKernel.LIMIT_FORMULA)
    with pytest.raises(BudgetError):
        # within the digit cap but past the term cap for this argument
        arctan_reciprocal(5, 10, SeriesKernel.LIMIT_FORMULA)


# -------------------------------------------------------------- benchmark


def test_benchmark_shape_and_csv():
    reports = convergence_benchmark([10, Fraction(7, 3)], [30, 60], SERIES_KERNELS)
    assert len(reports) == 2 * 2 * 3
    csv = benchmark_csv(reports)
    lines = csv.strip().split("\n")
    assert lines[0] == "kernel,beta,precision,terms_used,certified_error,wall_time_ms"
    assert len(lines) == 13
    for line in lines[1:]:
        assert len(line.split(",")) == 6


def test_benchmark_gh_beats_euler_on_terms():
    reports = convergence_benchmark(
        [10], [100], [SeriesKernel.EULER_2F1, SeriesKernel.ITERATIVE_GH]
    )
    by_kernel = {r.kernel: r for r in reports}
    assert (
        by_kernel["iterative_gh"].terms_used < by_kernel["euler_2f1"].terms_used
    )


def test_benchmark_reports_kernel_refusals_inline():
    reports = convergence_benchmark([10], [100], [SeriesKernel.LIMIT_FORMULA])
    assert len(reports) == 1
    assert reports[0].terms_used == 0
    assert reports[0].certified_error.startswith("error:")
