"""Arctangent series kernels with certified truncation error.

Every kernel returns a RealBall whose radius accounts for both rounding
(scaled-integer floor divisions, 1 ulp each, tracked exactly) and the
truncated tail (a proven majorization, never an empirical safety factor).

Kernels:
  maclaurin     alternating power series in 1/beta; tail bounded by the
                first omitted term. Needs |beta| >= 1.
  limit_formula telescoping tangent-difference average; error is
                one-sided and O(1/N^2), practical only to ~12 digits.
  euler_2f1     positive-term hypergeometric rearrangement; term ratio is
                exactly (2n/(2n+1)) * x^2/(1+x^2). Works for any beta != 0.
  iterative_gh  complex-pair recurrence; about log10(4 beta^2 + 1) digits
                per term, strictly more than euler_2f1's log10(beta^2 + 1).
                Needs |beta| >= 1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import gmpy2
from gmpy2 import mpz

from .errors import BudgetError, DomainError, PrecisionCapError
from .exact_arith import (
    RationalLike,
    RealBall,
    _ceil_div,
    coprime_fraction,
    digits10,
    format_rational,
    pow10,
    precision_cap,
)

DEFAULT_MAX_TERMS = 2_000_000
LIMIT_KERNEL_MAX_PRECISION = 12


class SeriesKernel(str, Enum):
    MACLAURIN = "maclaurin"
    LIMIT_FORMULA = "limit_formula"
    EULER_2F1 = "euler_2f1"
    ITERATIVE_GH = "iterative_gh"


@dataclass(frozen=True)
class SeriesState:
    """Exact state of the iterative kernel after n steps: the series term is
    proportional to g_n/(g_n^2 + h_n^2)."""

    g: Fraction
    h: Fraction
    n: int


@dataclass(frozen=True)
class SeriesReport:
    kernel: str
    beta: str
    precision: int
    terms_used: int
    certified_error: str
    wall_time_ms: float


def gh_states(beta: RationalLike, count: int) -> tuple[SeriesState, ...]:
    """First `count` exact (g, h) states for arctan(1/beta).

    Satisfies g_n^2 + h_n^2 == (4 beta^2 + 1)^(2n-1) exactly.
    """
    f = Fraction(beta) if isinstance(beta, int) else beta
    if f == 0:
        raise DomainError("beta must be nonzero")
    p = mpz(f.numerator)
    q = mpz(f.denominator)
    big_g, big_h = 2 * p, q
    x_mul = q * q - 4 * p * p
    y_mul = 4 * p * q
    qpow = q
    out = []
    for n in range(1, count + 1):
        out.append(
            SeriesState(coprime_fraction(big_g, qpow), coprime_fraction(big_h, qpow), n)
        )
        big_g, big_h = big_g * x_mul + big_h * y_mul, big_h * x_mul - big_g * y_mul
        qpow *= q * q
    return tuple(out)


def _maclaurin_sum(
    p: "mpz", q: "mpz", scale: int, stop_ulps: "mpz", max_terms: int
) -> tuple["mpz", "mpz", int]:
    """arctan(q/p), 0 < q <= p, as (scaled_sum, radius_ulps, terms)."""
    s10 = pow10(scale)
    p2 = p * p
    q2 = q * q
    term = q * s10 // p
    term_err = mpz(1)
    total = term
    radius = term_err
    terms = 1
    sign = -1
    n = 0
    while True:
        n += 1
        num = q2 * (2 * n - 1)
        den = p2 * (2 * n + 1)
        term = term * num // den
        term_err = _ceil_div(term_err * num, den) + 1
        if term <= stop_ulps:
            # alternating series: tail <= first omitted term
            radius += term + term_err + 1
            break
        total += sign * term
        radius += term_err
        terms += 1
        sign = -sign
        if terms > max_terms:
            raise BudgetError(
                f"maclaurin kernel exceeded {max_terms} terms; beta too close to 1 "
                f"for the requested precision"
            )
    return total, radius, terms


def _euler_sum(
    p: "mpz", q: "mpz", scale: int, stop_ulps: "mpz", max_terms: int
) -> tuple["mpz", "mpz", int]:
    """arctan(q/p), p, q > 0, as (scaled_sum, radius_ulps, terms)."""
    s10 = pow10(scale)
    q2 = q * q
    d = p * p + q2
    term = p * q * s10 // d
    term_err = mpz(1)
    total = term
    radius = term_err
    terms = 1
    # after adding term T_n the tail is <= T_n * (q^2/d)/(1 - q^2/d)
    # = T_n * q^2/p^2, so stop once T_n <= stop_ulps * p^2/q^2
    p2 = p * p
    stop_term = stop_ulps * p2 // q2
    n = 0
    while True:
        n += 1
        num = 2 * n * q2
        den = (2 * n + 1) * d
        term = term * num // den
        term_err = _ceil_div(term_err * num, den) + 1
        total += term
        radius += term_err
        terms += 1
        if term <= stop_term:
            radius += _ceil_div(term * q2, p2) + 1
            break
        if terms > max_terms:
            raise BudgetError(f"euler_2f1 kernel exceeded {max_terms} terms")
    return total, radius, terms


def _gh_sum(
    p: "mpz", q: "mpz", scale: int, stop_ulps: "mpz", max_terms: int
) -> tuple["mpz", "mpz", int]:
    """arctan(q/p), 0 < q <= p, via the complex-pair recurrence.

    All state integers are exact; the per-term floor division is the only
    rounding. |G_n|^2 + |H_n|^2 = D^(2n-1) exactly with D = 4p^2 + q^2,
    giving |term_n| <= (2/(2n-1)) r^(2n-1), r^2 = q^2/D.
    """
    s10 = pow10(scale)
    q2 = q * q
    d = 4 * p * p + q2
    x_mul = q2 - 4 * p * p
    y_mul = 4 * p * q
    big_g, big_h = 2 * p, q
    qp = q          # q^(2n-1)
    dp = d          # D^(2n-1)
    sq = q2         # q^(2n)
    sd = d          # D^n
    total = mpz(0)
    radius = mpz(0)
    terms = 0
    n = 0
    while True:
        n += 1
        term = 2 * big_g * qp * s10 // ((2 * n - 1) * dp)
        total += term
        radius += 1
        terms += 1
        if abs(term) <= stop_ulps:
            # tail(n) <= (2/(2n+1)) (q^2/D)^n D/(4p^2)
            tail = _ceil_div(2 * sq * d * s10, (2 * n + 1) * sd * (d - q2))
            radius += tail
            break
        if terms >= max_terms:
            raise BudgetError(f"iterative_gh kernel exceeded {max_terms} terms")
        big_g, big_h = big_g * x_mul + big_h * y_mul, big_h * x_mul - big_g * y_mul
        qp *= q2
        dp *= d * d
        sq *= q2
        sd *= d
    return total, radius, terms


def arctan_limit(x: RationalLike, big_n: int) -> Fraction:
    """Exact N-term value of the telescoping tangent-difference kernel.

    Converges to arctan(x) from above (for x > 0) with error in
    (0, x^3/(2 N^2)] once N >= 2|x|.
    """
    f = Fraction(x) if isinstance(x, int) else x
    if big_n < 1:
        raise DomainError("N must be >= 1")
    if f == 0:
        return Fraction(0)
    p = mpz(f.numerator)
    q = mpz(f.denominator)
    nn = mpz(big_n)
    base = nn * nn * q * q
    top = nn * p * q
    pairs = [(top, base + (n - 1) * n * p * p) for n in range(1, big_n + 1)]
    while len(pairs) > 1:
        merged = []
        for i in range(0, len(pairs) - 1, 2):
            a, b = pairs[i]
            c, d = pairs[i + 1]
            merged.append((a * d + c * b, b * d))
        if len(pairs) % 2:
            merged.append(pairs[-1])
        pairs = merged
    return coprime_fraction(pairs[0][0], pairs[0][1])


def _limit_ball(f: Fraction, precision: int) -> tuple[RealBall, int]:
    if precision > LIMIT_KERNEL_MAX_PRECISION:
        raise BudgetError(
            f"limit_formula error decays like 1/N^2; precision {precision} would need "
            f"~10^{(precision + 6) // 2} terms (cap {LIMIT_KERNEL_MAX_PRECISION})"
        )
    x = abs(f)
    # N >= 2x for the tan t - t <= t^3/2 bound, and N^2 >= x^3 10^(p+6)/2
    x3 = x * x * x
    need = mpz(x3.numerator) * pow10(precision + 6) // (2 * mpz(x3.denominator))
    n_min = gmpy2.isqrt(need) + 1
    big_n = int(max(n_min, 2 * _ceil_div(mpz(x.numerator), mpz(x.denominator)), 4))
    if big_n > 5_000_000:
        raise BudgetError(
            f"limit_formula would need N={big_n} terms for precision {precision} at x={x}"
        )
    approx = arctan_limit(x, big_n)
    bound = x * x * x / (2 * big_n * big_n)
    scale = precision + 8
    center = RealBall.from_fraction(approx - bound / 2, scale)
    ball = RealBall(center.center, center.radius + RealBall.from_fraction(bound / 2, scale).center + 2, scale)
    if f < 0:
        ball = -ball
    return ball, big_n


def _digits_per_term(kernel: SeriesKernel, p: "mpz", q: "mpz") -> float:
    lp = float(gmpy2.log10(p))
    lq = float(gmpy2.log10(q))
    if kernel == SeriesKernel.MACLAURIN:
        return 2.0 * (lp - lq)
    if kernel == SeriesKernel.EULER_2F1:
        return float(gmpy2.log10(p * p + q * q)) - 2.0 * lq
    if kernel == SeriesKernel.ITERATIVE_GH:
        return float(gmpy2.log10(4 * p * p + q * q)) - 2.0 * lq
    raise ValueError(kernel)


_SUMMERS = {
    SeriesKernel.MACLAURIN: _maclaurin_sum,
    SeriesKernel.EULER_2F1: _euler_sum,
    SeriesKernel.ITERATIVE_GH: _gh_sum,
}


def arctan_reciprocal(
    beta: RationalLike,
    precision: int,
    kernel: SeriesKernel = SeriesKernel.ITERATIVE_GH,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> RealBall:
    """Certified ball containing arctan(1/beta), radius <= 10^-precision."""
    f = Fraction(beta) if isinstance(beta, int) else beta
    if f == 0:
        raise DomainError("arctan(1/beta) needs beta != 0")
    if precision < 1:
        raise ValueError("precision must be >= 1")
    cap = precision_cap()
    if precision > cap:
        raise PrecisionCapError(f"precision {precision} exceeds cap {cap}")
    ball, _ = _arctan_reciprocal_report(f, precision, kernel, max_terms)
    return ball


def _arctan_reciprocal_report(
    f: Fraction,
    precision: int,
    kernel: SeriesKernel,
    max_terms: int,
) -> tuple[RealBall, int]:
    neg = f < 0
    a = abs(f)
    p = mpz(a.numerator)
    q = mpz(a.denominator)
    if kernel == SeriesKernel.LIMIT_FORMULA:
        ball, terms = _limit_ball(Fraction(1) / (a if not neg else -a), precision)
        return ball, terms
    if kernel in (SeriesKernel.MACLAURIN, SeriesKernel.ITERATIVE_GH) and p < q:
        raise DomainError(f"{kernel.value} kernel needs |beta| >= 1, got {format_rational(a)}")
    summer = _SUMMERS[kernel]
    dpt = _digits_per_term(kernel, p, q)
    est = int((precision + 8) / dpt) + 2 if dpt > 1e-9 else max_terms + 1
    guard = 10 + digits10(min(est, max_terms) + 1)
    scale = precision + guard
    cap = precision_cap()
    while True:
        total, radius, terms = summer(p, q, scale, pow10(scale - (precision + 5)), max_terms)
        if radius <= pow10(scale - precision):
            break
        scale += precision // 2 + 16
        if scale > cap + precision:
            raise PrecisionCapError(f"radius target unreachable under precision cap {cap}")
    ball = RealBall(int(total), int(radius), scale)
    if neg:
        ball = -ball
    return ball, terms


def _error_string(ball: RealBall) -> str:
    if ball.radius == 0:
        return "0"
    s = mpz(ball.radius).digits(10)
    exp = len(s) - ball.precision - 1
    if len(s) >= 2:
        return f"{s[0]}.{s[1]}e{exp:+d}"
    return f"{s[0]}e{exp:+d}"


def convergence_benchmark(
    betas: Sequence[RationalLike],
    precisions: Sequence[int],
    kernels: Optional[Iterable[SeriesKernel]] = None,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> list[SeriesReport]:
    """Terms/error/time for each (kernel, beta, precision) combination.

    Domain violations (e.g. |beta| < 1 for the maclaurin kernel, precision
    beyond the limit kernel's practical cap) are recorded per entry rather
    than aborting the sweep.
    """
    if kernels is None:
        kernels = list(SeriesKernel)
    reports = []
    for kernel in kernels:
        for beta in betas:
            f = Fraction(beta) if isinstance(beta, int) else beta
            for precision in precisions:
                label = format_rational(f)
                try:
                    t0 = time.perf_counter()
                    ball, terms = _arctan_reciprocal_report(f, precision, kernel, max_terms)
                    ms = (time.perf_counter() - t0) * 1000.0
                    reports.append(
                        SeriesReport(
                            kernel=kernel.value,
                            beta=label,
                            precision=precision,
                            terms_used=terms,
                            certified_error=_error_string(ball),
                            wall_time_ms=round(ms, 3),
                        )
                    )
                except (DomainError, BudgetError) as exc:
                    reports.append(
                        SeriesReport(
                            kernel=kernel.value,
                            beta=label,
                            precision=precision,
                            terms_used=0,
                            certified_error=f"error: {exc}",
                            wall_time_ms=0.0,
                        )
                    )
    return reports


def benchmark_csv(reports: Sequence[SeriesReport]) -> str:
    lines = ["kernel,beta,precision,terms_used,certified_error,wall_time_ms"]
    for r in reports:
        err = r.certified_error.replace(",", ";")
        lines.append(f"{r.kernel},{r.beta},{r.precision},{r.terms_used},{err},{r.wall_time_ms}")
    return "\n".join(lines) + "\n"
