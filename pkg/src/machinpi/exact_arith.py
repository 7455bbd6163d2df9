"""Exact integer/rational arithmetic and decimal fixed-point ball arithmetic.

Everything here is exact or certified: a RealBall operation returns an
interval that provably contains the true result, and floors or decimal
digits are only reported once the interval pins them down uniquely.

Large-integer primitives are delegated to gmpy2 (GMP). CPython ints are
exact but their gcd, division and str paths are too slow at the
million-digit scale this package routinely reaches.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import gmpy2
from gmpy2 import mpz

from .errors import DomainError, FloorBoundaryError, PrecisionCapError

BigInt = int
BigRational = Fraction
RationalLike = Union[int, Fraction]

_MPZ_TYPE = type(mpz(0))

DEFAULT_PRECISION_CAP = 1_000_000


def precision_cap() -> int:
    """Working-precision cap in decimal digits.

    Reads MACHIN_PRECISION_CAP from the environment; defaults to 1e6.
    """
    raw = os.environ.get("MACHIN_PRECISION_CAP")
    if raw is None:
        return DEFAULT_PRECISION_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise PrecisionCapError(
            f"MACHIN_PRECISION_CAP must be an integer, got {raw!r}"
        ) from None
    if cap <= 0:
        raise PrecisionCapError(f"MACHIN_PRECISION_CAP must be positive, got {cap}")
    return cap


_POW10_CACHE: dict[int, "mpz"] = {}


def pow10(n: int) -> "mpz":
    """10**n as an mpz; small cache for repeated scales."""
    v = _POW10_CACHE.get(n)
    if v is None:
        v = mpz(10) ** n
        if len(_POW10_CACHE) < 512:
            _POW10_CACHE[n] = v
    return v


def digits10(n: Union[int, "mpz"]) -> int:
    """Exact decimal digit count of |n|; digits10(0) == 1."""
    if n == 0:
        return 1
    # num_digits wraps mpz_sizeinbase, which may report one digit too many
    d = gmpy2.num_digits(mpz(n), 10)
    if abs(mpz(n)) < pow10(d - 1):
        d -= 1
    return d


def int_to_str(n: Union[int, "mpz"]) -> str:
    """Decimal string of n.

    Bypasses CPython's int-to-str conversion, which is quadratic and (since
    3.11) refuses integers beyond a few thousand digits.
    """
    return mpz(n).digits(10)


def str_to_int(text: str) -> int:
    """Parse a decimal integer of any size (CPython's int() enforces a digit
    limit on recent versions)."""
    return int(mpz(text, 10))


_RATIONAL_RE = re.compile(r"^([+-]?[0-9]+)(?:/([+-]?[0-9]+))?$")


def parse_rational(text: str) -> Fraction:
    """Parse "p" or "p/q" into a normalized Fraction."""
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = str_to_int(m.group(1))
    den = str_to_int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return coprime_fraction(num, den)


def format_rational(value: RationalLike) -> str:
    """Render an int or Fraction as "p" or "p/q" (q > 0, sign on p)."""
    if isinstance(value, int):
        return int_to_str(value)
    if value.denominator == 1:
        return int_to_str(value.numerator)
    return f"{int_to_str(value.numerator)}/{int_to_str(value.denominator)}"


def coprime_fraction(num: Union[int, "mpz"], den: Union[int, "mpz"] = 1) -> Fraction:
    """Fraction(num, den) with the reduction done by GMP.

    The stock Fraction constructor normalizes with math.gcd, which dominates
    runtime once operands reach ~1e5 digits. This reduces with gmpy2 and
    installs the result directly into a Fraction instance.
    """
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    n = mpz(num)
    d = mpz(den)
    if d < 0:
        n, d = -n, -d
    g = gmpy2.gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    f = Fraction.__new__(Fraction)
    f._numerator = int(n)
    f._denominator = int(d)
    return f


def rational_floor(value: RationalLike) -> int:
    """floor(value) for an int or Fraction of any size."""
    if isinstance(value, int):
        return value
    return int(mpz(value.numerator) // mpz(value.denominator))


def _ceil_div(a: "mpz", b: "mpz") -> "mpz":
    return -((-a) // b)


@dataclass(frozen=True)
class RealBall:
    """Decimal fixed-point ball.

    Represents the closed interval
    [(center - radius) * 10^-precision, (center + radius) * 10^-precision].
    All operations return balls that contain the exact image of their
    operand intervals, so any property read off a ball (floor, decimal
    prefix, sign) is certified.
    """

    center: int
    radius: int
    precision: int

    def __post_init__(self) -> None:
        for name in ("center", "radius", "precision"):
            v = getattr(self, name)
            if not isinstance(v, int):
                object.__setattr__(self, name, int(v))
        if self.radius < 0:
            raise ValueError("negative radius")
        if self.precision < 0:
            raise ValueError("negative precision")

    @classmethod
    def from_int(cls, value: Union[int, "mpz"], precision: int) -> "RealBall":
        return cls(int(mpz(value) * pow10(precision)), 0, precision)

    @classmethod
    def from_fraction(cls, value: RationalLike, precision: int) -> "RealBall":
        if isinstance(value, int):
            return cls.from_int(value, precision)
        num = mpz(value.numerator) * pow10(precision)
        den = mpz(value.denominator)
        q, r = gmpy2.f_divmod(num, den)
        if r == 0:
            return cls(int(q), 0, precision)
        return cls(int(q), 1, precision)

    @property
    def lower(self) -> Fraction:
        return coprime_fraction(self.center - self.radius, pow10(self.precision))

    @property
    def upper(self) -> Fraction:
        return coprime_fraction(self.center + self.radius, pow10(self.precision))

    @property
    def is_exact(self) -> bool:
        return self.radius == 0

    def contains(self, value: RationalLike) -> bool:
        v = Fraction(value) if isinstance(value, int) else value
        return self.lower <= v <= self.upper

    def rescale(self, precision: int) -> "RealBall":
        if precision == self.precision:
            return self
        if precision > self.precision:
            f = pow10(precision - self.precision)
            return RealBall(self.center * f, self.radius * f, precision)
        shift = pow10(self.precision - precision)
        lo = (mpz(self.center) - self.radius) // shift
        hi = _ceil_div(mpz(self.center) + self.radius, shift)
        rad = _ceil_div(hi - lo, 2)
        return RealBall(lo + rad, rad, precision)

    def __neg__(self) -> "RealBall":
        return RealBall(-self.center, self.radius, self.precision)

    def _coerce(self, other: object, precision: int) -> Optional["RealBall"]:
        if isinstance(other, RealBall):
            return other
        if isinstance(other, (int, Fraction)):
            return RealBall.from_fraction(other, precision)
        return None

    def __add__(self, other: object) -> "RealBall":
        o = self._coerce(other, self.precision)
        if o is None:
            return NotImplemented
        t = max(self.precision, o.precision)
        a = self.rescale(t)
        b = o.rescale(t)
        return RealBall(a.center + b.center, a.radius + b.radius, t)

    __radd__ = __add__

    def __sub__(self, other: object) -> "RealBall":
        o = self._coerce(other, self.precision)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "RealBall":
        o = self._coerce(other, self.precision)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> "RealBall":
        if isinstance(other, int):
            return RealBall(self.center * other, self.radius * abs(other), self.precision)
        if isinstance(other, Fraction):
            return self._mul_rational(other)
        if not isinstance(other, RealBall):
            return NotImplemented
        t = max(self.precision, other.precision)
        xlo = mpz(self.center) - self.radius
        xhi = mpz(self.center) + self.radius
        ylo = mpz(other.center) - other.radius
        yhi = mpz(other.center) + other.radius
        cands = (xlo * ylo, xlo * yhi, xhi * ylo, xhi * yhi)
        shift = pow10(self.precision + other.precision - t)
        lo = min(cands) // shift
        hi = _ceil_div(max(cands), shift)
        rad = _ceil_div(hi - lo, 2)
        return RealBall(lo + rad, rad, t)

    __rmul__ = __mul__

    def _mul_rational(self, f: Fraction) -> "RealBall":
        n = mpz(f.numerator)
        d = mpz(f.denominator)
        c1 = (mpz(self.center) - self.radius) * n
        c2 = (mpz(self.center) + self.radius) * n
        if c1 > c2:
            c1, c2 = c2, c1
        lo = c1 // d
        hi = _ceil_div(c2, d)
        rad = _ceil_div(hi - lo, 2)
        return RealBall(lo + rad, rad, self.precision)

    def __truediv__(self, other: object) -> "RealBall":
        if isinstance(other, int):
            other = Fraction(other)
        if isinstance(other, Fraction):
            if other == 0:
                raise ZeroDivisionError("division by zero rational")
            return self._mul_rational(Fraction(other.denominator, other.numerator))
        if not isinstance(other, RealBall):
            return NotImplemented
        t = max(self.precision, other.precision)
        a = self.rescale(t)
        b = other.rescale(t)
        ylo = mpz(b.center) - b.radius
        yhi = mpz(b.center) + b.radius
        if ylo <= 0 <= yhi:
            raise ZeroDivisionError("divisor ball contains zero")
        s = pow10(t)
        xlo = (mpz(a.center) - a.radius) * s
        xhi = (mpz(a.center) + a.radius) * s
        lo = hi = None
        for num in (xlo, xhi):
            for den in (ylo, yhi):
                qlo = num // den
                qhi = _ceil_div(num, den)
                lo = qlo if lo is None or qlo < lo else lo
                hi = qhi if hi is None or qhi > hi else hi
        rad = _ceil_div(hi - lo, 2)
        return RealBall(lo + rad, rad, t)

    def __rtruediv__(self, other: object) -> "RealBall":
        if isinstance(other, (int, Fraction)):
            return RealBall.from_fraction(other, self.precision) / self
        return NotImplemented

    def floor_maybe(self) -> Optional[int]:
        """The unique integer floor if the ball certifies one, else None."""
        s = pow10(self.precision)
        f1 = (mpz(self.center) - self.radius) // s
        f2 = (mpz(self.center) + self.radius) // s
        if f1 == f2:
            return int(f1)
        return None

    def certified_truncation(self) -> tuple[int, int]:
        """Best certified decimal truncation of a nonnegative-valued ball.

        Returns (n, d) with floor(v * 10^d) == n guaranteed for the exact
        value v, d as large as the ball allows (d <= precision; d may be
        negative if not even the leading digits are pinned down).
        """
        lo = mpz(self.center) - self.radius
        hi = mpz(self.center) + self.radius
        if lo < 0:
            raise DomainError("certified truncation needs a nonnegative ball")
        shi = hi.digits(10)
        slo = lo.digits(10).zfill(len(shi))
        cp = 0
        for a, b in zip(slo, shi):
            if a != b:
                break
            cp += 1
        d = self.precision - (len(shi) - cp)
        n = str_to_int(slo[:cp]) if cp else 0
        return n, d

    def __repr__(self) -> str:
        c = int_to_str(self.center)
        if len(c) > 24:
            c = f"{c[:12]}...{c[-4:]}<{len(c)} digits>"
        return f"RealBall(center={c}, radius={self.radius}, precision={self.precision})"


def ball_sqrt(x: RealBall) -> RealBall:
    """Certified square root; the ball must not extend below zero."""
    lo = mpz(x.center) - x.radius
    hi = mpz(x.center) + x.radius
    if lo < 0:
        raise DomainError("sqrt of a ball extending below zero")
    s = pow10(x.precision)
    rlo = gmpy2.isqrt(lo * s)
    hi_scaled = hi * s
    rhi = gmpy2.isqrt(hi_scaled)
    if rhi * rhi < hi_scaled:
        rhi += 1
    rad = _ceil_div(rhi - rlo, 2)
    return RealBall(rlo + rad, rad, x.precision)


def ball_floor_certified(
    refine: Callable[[int], RealBall],
    initial_precision: int = 60,
    max_precision: Optional[int] = None,
) -> int:
    """Certified floor of the real number approximated by refine.

    refine(p) must return a ball at working precision p containing the exact
    value; precision doubles until the floor is pinned. Values that sit on
    an integer boundary exhaust the cap and raise FloorBoundaryError: a
    floor can then genuinely not be certified by interval refinement.
    """
    if max_precision is None:
        max_precision = precision_cap()
    p = max(initial_precision, 4)
    while True:
        f = refine(p).floor_maybe()
        if f is not None:
            return f
        if p >= max_precision:
            raise FloorBoundaryError(
                f"floor undecided at precision {p}; the value may be an exact integer"
            )
        p = min(2 * p, max_precision)


def certified_decimal_string(ball: RealBall, max_decimals: Optional[int] = None) -> tuple[str, int]:
    """Certified truncated decimal expansion "I.ddd..." of a positive ball.

    Returns (text, decimals). Every printed digit is a digit of the exact
    value's truncated expansion. Raises DomainError if not even the integer
    part is certified.
    """
    n, d = ball.certified_truncation()
    if d < 0:
        raise DomainError("ball too wide to certify the integer part")
    if max_decimals is not None and d > max_decimals:
        n = int(mpz(n) // pow10(d - max_decimals))
        d = max_decimals
    s = int_to_str(n)
    if d == 0:
        return s, 0
    if len(s) <= d:
        s = "0" * (d + 1 - len(s)) + s
    return f"{s[:-d]}.{s[-d:]}", d


def _scaled_ln_bounds(t: Fraction, scale: int) -> tuple[int, int]:
    """(lo, hi) integer bounds on ln(t) * 10^scale for moderate t in (0, 10].

    Uses ln t = 2 * sum u^(2j+1)/(2j+1), u = (t-1)/(t+1). Convergence needs
    |u| bounded away from 1; callers pass mantissas in [1, 10], so
    u in [0, 9/11]. Terms are carried as scaled integers; inherited rounding
    contracts geometrically, 5 ulp per term covers it with margin.
    """
    if t <= 0:
        raise DomainError("ln of a nonpositive value")
    u = t - 1
    v = t + 1
    num = mpz(u.numerator) * mpz(v.denominator)
    den = mpz(u.denominator) * mpz(v.numerator)
    if num == 0:
        return 0, 0
    s = pow10(scale)
    n2 = num * num
    d2 = den * den
    term = num * s // den
    acc = term
    err = 5
    j = 0
    while True:
        j += 1
        term = term * n2 // d2
        contrib = term // (2 * j + 1)
        acc += contrib
        err += 5
        if abs(term) <= 2 * j + 3:
            # tail < |term| * u^2/(1-u^2) / (2j+3) <= ~2.03 * |term| ulps
            err += 2 * abs(int(term)) + 4
            break
    lo = 2 * (acc - err)
    hi = 2 * (acc + err)
    return int(lo), int(hi)


_LN10_CACHE: dict[int, tuple[int, int]] = {}


def _ln10_bounds(scale: int) -> tuple[int, int]:
    b = _LN10_CACHE.get(scale)
    if b is None:
        b = _scaled_ln_bounds(Fraction(10), scale)
        if len(_LN10_CACHE) < 64:
            _LN10_CACHE[scale] = b
    return b


def _log10_int_bounds(n: "mpz", scale: int) -> tuple[int, int]:
    """(lo, hi) integer bounds on log10(n) * 10^scale for n >= 1.

    Huge n is truncated to a working mantissa; the [T, T+1] bracket keeps
    the result certified.
    """
    if n == 1:
        return 0, 0
    length = digits10(n)
    keep = min(length, scale + 15)
    drop = length - keep
    t_lo = n // pow10(drop) if drop else n
    t_hi = t_lo + 1 if drop else t_lo
    scale10 = pow10(scale)
    ln10_lo, ln10_hi = _ln10_bounds(scale)
    out = []
    for t, pick_hi in ((t_lo, False), (t_hi, True)):
        mant = coprime_fraction(t, pow10(keep - 1))
        lo_ln, hi_ln = _scaled_ln_bounds(mant, scale)
        if pick_hi:
            # mant <= 10 so hi_ln >= 0 is not guaranteed tiny; ln >= 0 here
            val = _ceil_div(mpz(max(hi_ln, 0)) * scale10, mpz(ln10_lo))
        else:
            val = mpz(max(lo_ln, 0)) * scale10 // mpz(ln10_hi)
        out.append(val)
    base = (length - 1) * scale10  # log10(n) = (length-1) + log10(mantissa in [1,10))
    lo = base + out[0]
    hi = base + out[1]
    return int(lo), int(hi)


def certified_log10(x: RationalLike, precision: int) -> RealBall:
    """log10 |x| as a certified ball at the given decimal precision."""
    f = Fraction(x) if isinstance(x, int) else x
    if f == 0:
        raise DomainError("log10 of zero")
    scale = precision + 10
    nlo, nhi = _log10_int_bounds(mpz(abs(f.numerator)), scale)
    if f.denominator == 1:
        lo, hi = nlo, nhi
    else:
        dlo, dhi = _log10_int_bounds(mpz(f.denominator), scale)
        lo, hi = nlo - dhi, nhi - dlo
    rad = _ceil_div(mpz(hi - lo), 2)
    ball = RealBall(lo + rad, rad, scale)
    return ball.rescale(precision)
