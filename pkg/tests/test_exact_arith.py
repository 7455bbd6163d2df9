"""Certified arithmetic layer: balls, exact helpers, logarithms."""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from machinpi.errors import DomainError, FloorBoundaryError, PrecisionCapError
from machinpi.exact_arith import (
    RealBall,
    ball_floor_certified,
    ball_sqrt,
    certified_decimal_string,
    certified_log10,
    coprime_fraction,
    digits10,
    format_rational,
    int_to_str,
    parse_rational,
    pow10,
    precision_cap,
    rational_floor,
    str_to_int,
)

ints = st.integers(min_value=-(10**60), max_value=10**60)
nonzero_ints = ints.filter(lambda n: n != 0)
fractions = st.fractions(
    min_value=Fraction(-(10**12)), max_value=Fraction(10**12), max_denominator=10**12
)
precisions = st.integers(min_value=5, max_value=80)


# ---------------------------------------------------------------- digits10


@given(ints)
def test_digits10_matches_string_length(n):
    assert digits10(n) == len(str(abs(n))) if n else digits10(0) == 1


def test_digits10_power_of_ten_boundaries():
    # gmpy2.num_digits may over-report by one near powers of ten; the
    # wrapper must not
    for e in range(1, 150):
        p = 10**e
        assert digits10(p - 1) == e
        assert digits10(p) == e + 1
        assert digits10(p + 1) == e + 1


def test_digits10_regressions():
    assert digits10(0) == 1
    assert digits10(9) == 1
    assert digits10(-9) == 1
    assert digits10(999) == 3
    assert digits10(9140003941) == 10


# ------------------------------------------------------- big int round trip


def test_int_str_round_trip_beyond_cpython_limit():
    n = 10**20000 + 12345  # str(n) raises ValueError on stock CPython 3.11+
    s = int_to_str(n)
    assert len(s) == 20001
    assert s.startswith("1" + "0" * 10)
    assert s.endswith("12345")
    assert str_to_int(s) == n
    assert str_to_int("-" + s) == -n


@given(ints)
def test_int_str_round_trip(n):
    assert str_to_int(int_to_str(n)) == n


# ------------------------------------------------------------ rational text


@pytest.mark.parametrize(
    "text,expected",
    [
        ("3/4", Fraction(3, 4)),
        (" -5/2 ", Fraction(-5, 2)),
        ("7", Fraction(7)),
        ("+3/-6", Fraction(-1, 2)),
        ("-0", Fraction(0)),
    ],
)
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["", "a", "1.5", "1/2/3", "1 / 2"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_parse_rational_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")


@given(fractions)
def test_format_parse_round_trip(f):
    assert parse_rational(format_rational(f)) == f


def test_format_rational_plain_ints():
    assert format_rational(42) == "42"
    assert format_rational(Fraction(-8, 2)) == "-4"
    assert format_rational(Fraction(-3, 7)) == "-3/7"


# --------------------------------------------------------- coprime_fraction


@given(ints, nonzero_ints)
def test_coprime_fraction_matches_fraction(num, den):
    f = coprime_fraction(num, den)
    assert f == Fraction(num, den)
    assert f.denominator > 0
    assert math.gcd(f.numerator, f.denominator) == 1


def test_coprime_fraction_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        coprime_fraction(1, 0)


@given(fractions)
def test_rational_floor(f):
    assert rational_floor(f) == math.floor(f)


def test_rational_floor_int_passthrough():
    assert rational_floor(-7) == -7


# ----------------------------------------------------------------- RealBall


@given(fractions, precisions)
def test_ball_from_fraction_contains(f, p):
    b = RealBall.from_fraction(f, p)
    assert b.contains(f)
    assert b.radius <= 1
    assert b.upper - b.lower <= Fraction(2, 10**p)


@given(fractions, fractions, precisions)
def test_ball_add_sub_contain(x, y, p):
    bx = RealBall.from_fraction(x, p)
    by = RealBall.from_fraction(y, p)
    assert (bx + by).contains(x + y)
    assert (bx - by).contains(x - y)
    assert (x + by).contains(x + y)  # scalar coercion
    assert (x - by).contains(x - y)


@given(fractions, fractions, precisions)
def test_ball_mul_contains(x, y, p):
    bx = RealBall.from_fraction(x, p)
    by = RealBall.from_fraction(y, p)
    assert (bx * by).contains(x * y)
    assert (bx * y).contains(x * y)
    assert (3 * bx).contains(3 * x)


@given(fractions, fractions, precisions)
def test_ball_div_contains(x, y, p):
    assume(abs(y) > Fraction(1, 1000))
    bx = RealBall.from_fraction(x, max(p, 10))
    by = RealBall.from_fraction(y, max(p, 10))
    assert (bx / by).contains(x / y)
    assert (bx / y).contains(x / y)


def test_ball_div_rejects_zero_straddle():
    wide = RealBall(0, 5, 3)
    num = RealBall.from_int(1, 3)
    with pytest.raises(ZeroDivisionError):
        num / wide
    with pytest.raises(ZeroDivisionError):
        num / Fraction(0)


@given(fractions, precisions)
def test_ball_neg_and_rescale(f, p):
    b = RealBall.from_fraction(f, p)
    assert (-b).contains(-f)
    assert b.rescale(p + 10).contains(f)
    down = b.rescale(max(p - 7, 0))
    assert down.contains(f)


def test_ball_exactness_flags():
    assert RealBall.from_int(7, 12).is_exact
    assert RealBall.from_fraction(Fraction(3, 8), 10).is_exact  # divides evenly
    assert not RealBall.from_fraction(Fraction(1, 3), 10).is_exact


def test_ball_rejects_bad_construction():
    with pytest.raises(ValueError):
        RealBall(0, -1, 5)
    with pytest.raises(ValueError):
        RealBall(0, 0, -2)


def test_floor_maybe():
    assert RealBall.from_fraction(Fraction(5, 2), 20).floor_maybe() == 2
    assert RealBall.from_fraction(Fraction(-5, 2), 20).floor_maybe() == -3
    assert RealBall.from_int(7, 10).floor_maybe() == 7
    assert RealBall(0, 1, 0).floor_maybe() is None  # spans [-1, 1]


def test_certified_truncation_pins_common_prefix():
    b = RealBall(31415, 1, 4)  # [3.1414, 3.1416]
    n, d = b.certified_truncation()
    assert (n, d) == (3141, 3)
    with pytest.raises(DomainError):
        RealBall(0, 1, 4).certified_truncation()  # extends below zero


def test_certified_decimal_string_third():
    b = RealBall.from_fraction(Fraction(1, 3), 30)
    text, d = certified_decimal_string(b)
    assert text.startswith("0.33333333333333")
    assert d >= 25
    capped, dc = certified_decimal_string(b, max_decimals=5)
    assert (capped, dc) == ("0.33333", 5)


def test_certified_decimal_string_integer_part_only():
    text, d = certified_decimal_string(RealBall.from_int(14, 6), max_decimals=0)
    assert (text, d) == ("14", 0)


def test_certified_decimal_string_too_wide():
    with pytest.raises(DomainError):
        certified_decimal_string(RealBall(10**12, 10**12 - 1, 4))


# ---------------------------------------------------------------- ball_sqrt


@given(
    st.fractions(min_value=Fraction(0), max_value=Fraction(10**9), max_denominator=10**9),
    precisions,
)
def test_ball_sqrt_contains(f, p):
    # tiny values round to balls reaching below zero, which sqrt rejects
    assume(f == 0 or f > Fraction(2, 10**p))
    b = ball_sqrt(RealBall.from_fraction(f, p))
    lo, hi = b.lower, b.upper
    assert lo >= 0
    assert lo * lo <= f
    assert hi * hi >= f


def test_ball_sqrt_exact_square():
    b = ball_sqrt(RealBall.from_int(49, 30))
    assert b.contains(7)
    assert b.upper - b.lower <= Fraction(2, 10**30)


def test_ball_sqrt_rejects_negative_reach():
    with pytest.raises(DomainError):
        ball_sqrt(RealBall.from_fraction(Fraction(-1, 2), 10))


# ------------------------------------------------------ ball_floor_certified


def test_ball_floor_certified_refines_until_pinned():
    f = Fraction(10**40 + 1, 10**40)  # floor 1, needs > 40 digits to see it
    calls = []

    def refine(p):
        calls.append(p)
        return RealBall.from_fraction(f, p)

    assert ball_floor_certified(refine, initial_precision=4) == 1
    assert len(calls) > 1  # escalated at least once


def test_ball_floor_certified_boundary_gives_up():
    def stuck(p):
        return RealBall(5 * 10**p, 1, p)  # always straddles the integer 5

    with pytest.raises(FloorBoundaryError):
        ball_floor_certified(stuck, initial_precision=8, max_precision=64)


# ------------------------------------------------------------ certified log


def _mp_log10(f: Fraction) -> Fraction:
    with mpmath.workdps(60):
        v = mpmath.log10(mpmath.mpf(f.numerator) / f.denominator)
        return Fraction(mpmath.nstr(v, 40))


@given(
    st.fractions(
        min_value=Fraction(1, 10**9), max_value=Fraction(10**12), max_denominator=10**9
    ),
    st.integers(min_value=10, max_value=40),
)
def test_certified_log10_contains_truth(f, p):
    assume(f > 0)
    ball = certified_log10(f, p)
    approx = _mp_log10(f)
    slack = Fraction(1, 10**35)  # oracle is itself 40-digit truncated
    assert ball.lower - slack <= approx <= ball.upper + slack
    assert ball.upper - ball.lower <= Fraction(4, 10**p)


def test_certified_log10_known_points():
    assert certified_log10(10, 30).contains(1)
    assert certified_log10(1, 30).contains(0)
    assert certified_log10(Fraction(1, 10), 30).contains(-1)
    assert certified_log10(1000, 30).contains(3)
    assert certified_log10(-100, 30).contains(2)  # |x| convention


def test_certified_log10_regression_near_power_of_ten():
    # 9140003941 is barely below 10^10; a digit-count slip once clamped
    # this to exactly 10.0
    ball = certified_log10(9140003941, 30)
    assert ball.upper < 10
    assert ball.contains(_mp_log10(Fraction(9140003941)))


def test_certified_log10_rejects_zero():
    with pytest.raises(DomainError):
        certified_log10(0, 10)


# ------------------------------------------------------------ precision cap


def test_precision_cap_default(monkeypatch):
    monkeypatch.delenv("MACHIN_PRECISION_CAP", raising=False)
    assert precision_cap() == 1_000_000


def test_precision_cap_env_override(monkeypatch):
    monkeypatch.setenv("MACHIN_PRECISION_CAP", "123")
    assert precision_cap() == 123


@pytest.mark.parametrize("bad", ["abc", "-5", "0"])
def test_precision_cap_rejects(monkeypatch, bad):
    monkeypatch.setenv("MACHIN_PRECISION_CAP", bad)
    with pytest.raises(PrecisionCapError):
        precision_cap()


def test_pow10_cache_consistency():
    assert pow10(0) == 1
    assert pow10(7) == 10**7
    assert pow10(7) == 10**7  # cached path
