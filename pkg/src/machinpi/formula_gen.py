"""Generation and exact verification of Machin-like arctangent identities.

Pipeline: a nested-radical cotangent quotient supplies an integer seed whose
arctangent is nearly an exact binary fraction of pi/2; an angle-doubling
iteration produces the exact rational companion closing the identity; and
repeated integer-reciprocal splitting fans the companion out into
integer-argument arctangents whose sizes square at every step.

All identities produced here are exact; deciding how many terms to evaluate
as series versus linearize is the evaluation engine's concern.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import AbstractSet, Optional, Sequence, Union

import gmpy2
from gmpy2 import mpz

from .arctan_eval import SeriesKernel, arctan_reciprocal
from .errors import (
    BudgetError,
    DegenerateFormulaError,
    DomainError,
    MeasureUndefinedError,
    NegativeLogError,
    PrecisionCapError,
)
from .exact_arith import (
    RationalLike,
    RealBall,
    ball_floor_certified,
    ball_sqrt,
    certified_log10,
    coprime_fraction,
    digits10,
    format_rational,
    int_to_str,
    parse_rational,
    pow10,
    precision_cap,
    rational_floor,
)

MAX_K = 64
MAX_STEPS = 64
MAX_ELL = 18

# two_step_companion result size is ~2^(k-1) * digits(seed^2 + 1); refuse
# beyond this many digits unless the caller raises the limit explicitly
DEFAULT_COMPANION_DIGIT_CAP = 200_000_000


def _as_fraction(value: RationalLike) -> Fraction:
    return Fraction(value) if isinstance(value, int) else value


@dataclass(frozen=True)
class ArctanTerm:
    """coefficient * arctan(1/beta) with rational nonzero beta."""

    coefficient: int
    beta: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.beta, Fraction):
            object.__setattr__(self, "beta", Fraction(self.beta))
        if self.beta == 0:
            raise ValueError("beta must be nonzero")
        if self.coefficient == 0:
            raise ValueError("coefficient must be nonzero")

    @property
    def argument(self) -> Fraction:
        """The arctangent argument 1/beta."""
        return coprime_fraction(self.beta.denominator, self.beta.numerator)


@dataclass(frozen=True)
class MachinFormula:
    """A sum of arctangent terms asserted to equal pi/4."""

    terms: tuple[ArctanTerm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("formula needs at least one term")

    def to_json(self) -> str:
        obj = {
            "target": "pi/4",
            "terms": [
                {
                    "coeff": int_to_str(t.coefficient),
                    "beta": format_rational(t.beta),
                }
                for t in self.terms
            ],
        }
        return json.dumps(obj, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MachinFormula":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON: {exc}") from None
        if not isinstance(obj, dict) or obj.get("target") != "pi/4":
            raise ValueError('formula JSON must carry "target": "pi/4"')
        raw_terms = obj.get("terms")
        if not isinstance(raw_terms, list) or not raw_terms:
            raise ValueError("formula JSON needs a nonempty terms list")
        terms = []
        for entry in raw_terms:
            if not isinstance(entry, dict) or "coeff" not in entry or "beta" not in entry:
                raise ValueError("each term needs coeff and beta")
            coeff = parse_rational(str(entry["coeff"]))
            if coeff.denominator != 1:
                raise ValueError(f"coefficient must be an integer, got {entry['coeff']}")
            beta = parse_rational(str(entry["beta"]))
            terms.append(ArctanTerm(int(coeff), beta))
        return cls(tuple(terms))

    def render(self) -> str:
        """Display form, sign folded: "pi/4 = 8*atan(1/10) - atan(1/239)"."""
        parts = []
        for t in self.terms:
            c = t.coefficient
            b = t.beta
            if b < 0:
                b = -b
                c = -c
            arg = coprime_fraction(b.denominator, b.numerator)
            atan = f"atan({format_rational(arg)})"
            mag = -c if c < 0 else c
            body = atan if mag == 1 else f"{int_to_str(mag)}*{atan}"
            parts.append((c < 0, body))
        out = ["pi/4 = "]
        for i, (neg, body) in enumerate(parts):
            if i == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)


@dataclass(frozen=True)
class IterationState:
    """Exact (cos, sin) of 2^step * arctan(1/beta) reached by angle doubling."""

    sigma: Fraction
    tau: Fraction
    step: int


def sigma_tau_states(beta: RationalLike, k: int) -> tuple[IterationState, ...]:
    """States after 1..k doublings of arctan(1/beta); sigma^2 + tau^2 == 1.

    Sizes square with each step; intended for moderate k.
    """
    f = _as_fraction(beta)
    if f == 0:
        raise DomainError("beta must be nonzero")
    if k < 1:
        raise ValueError("k must be >= 1")
    p = mpz(f.numerator)
    q = mpz(f.denominator)
    s = p * p - q * q
    t = 2 * p * q
    d = p * p + q * q
    out = [IterationState(coprime_fraction(s, d), coprime_fraction(t, d), 1)]
    for n in range(2, k + 1):
        s, t = s * s - t * t, 2 * s * t
        d = d * d
        out.append(IterationState(coprime_fraction(s, d), coprime_fraction(t, d), n))
    return tuple(out)


def two_step_companion(beta: RationalLike, k: int, max_digits: int = DEFAULT_COMPANION_DIGIT_CAP) -> Fraction:
    """The rational beta2 with 2^(k-1)*arctan(1/beta) + arctan(1/beta2) = pi/4.

    Runs the angle-doubling iteration to (sigma_k, tau_k) and returns
    sigma_k / (1 - tau_k). Seeds whose scaled angle is exactly pi/2
    (tau_k = 1, e.g. beta = 1 at k = 1) admit no companion and raise
    DegenerateFormulaError.
    """
    f = _as_fraction(beta)
    if f == 0:
        raise DomainError("beta must be nonzero")
    if k < 1:
        raise ValueError("k must be >= 1")
    p = mpz(f.numerator)
    q = mpz(f.denominator)
    predicted = (digits10(p * p + q * q) + 1) << max(k - 1, 0)
    if predicted > max_digits:
        raise BudgetError(
            f"companion for k={k} would reach ~{predicted} digits (cap {max_digits})"
        )
    s = p * p - q * q
    t = 2 * p * q
    d = p * p + q * q
    for _ in range(k - 1):
        s, t = s * s - t * t, 2 * s * t
        d = d * d
    if t == d:
        raise DegenerateFormulaError(
            "scaled seed angle is exactly pi/2: the leading term alone is pi/4"
        )
    return coprime_fraction(s, d - t)


def companion_closed_form(beta: RationalLike, k: int) -> Fraction:
    """Companion via one Gaussian power: (u + iv) = (p + iq)^(2^(k-1)),
    beta2 = (u + v)/(u - v).

    Independent of the doubling recurrence; used to cross-check it.
    """
    f = _as_fraction(beta)
    if f == 0:
        raise DomainError("beta must be nonzero")
    if k < 1:
        raise ValueError("k must be >= 1")
    u = mpz(f.numerator)
    v = mpz(f.denominator)
    for _ in range(k - 1):
        u, v = u * u - v * v, 2 * u * v
    if u == v:
        raise DegenerateFormulaError(
            "scaled seed angle is exactly pi/2: the leading term alone is pi/4"
        )
    return coprime_fraction(u + v, u - v)


def nested_radical_quotient(k: int, precision: int) -> RealBall:
    """Certified ball for a_k / sqrt(2 - a_{k-1}) with a_0 = 0,
    a_j = sqrt(2 + a_{j-1}); the value is cot(pi/2^(k+1)).

    k = 1 gives exactly 1 (radius 0).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if precision < 1:
        raise ValueError("precision must be >= 1")
    if k == 1:
        return RealBall.from_int(1, precision)
    cap = precision_cap()
    w = precision + k + 15
    while True:
        two = RealBall.from_int(2, w)
        a = RealBall.from_int(0, w)
        for _ in range(k - 1):
            a = ball_sqrt(two + a)
        num = ball_sqrt(two + a)
        den = ball_sqrt(two - a)
        ratio = num / den
        if ratio.radius <= pow10(w - precision):
            return ratio
        if w >= cap:
            raise PrecisionCapError(f"quotient radius target unreachable under cap {cap}")
        w = min(2 * w, cap)


def leading_integer(k: int, mode: str = "floor") -> int:
    """Integer part (floor or ceiling) of the nested-radical quotient."""
    if mode not in ("floor", "ceiling"):
        raise ValueError(f"mode must be floor or ceiling, got {mode!r}")
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must be in [1, {MAX_K}]")
    if k == 1:
        return 1
    start = 2 * k + 40
    if mode == "floor":
        return ball_floor_certified(lambda p: nested_radical_quotient(k, p), start)
    return -ball_floor_certified(lambda p: -nested_radical_quotient(k, p), start)


def _run_chain(
    start: Fraction, steps: int, max_digits: Optional[int]
) -> tuple[list[int], Fraction, bool]:
    """Iterate the splitting map from `start` for up to `steps` splits.

    Each split peels off floor(B); the recursion B <- (1 + floor(B)*B) /
    (floor(B) - B) squares the magnitude. Runs gcd-free (floors are
    invariant under common factors); the terminal is normalized once.
    """
    p = mpz(start.numerator)
    q = mpz(start.denominator)
    floors: list[int] = []
    for _ in range(steps):
        if p % q == 0:
            break
        if 0 <= p < q:
            raise DomainError("splitting is undefined for values in [0, 1)")
        b = p // q
        floors.append(int(b))
        p, q = q + b * p, b * q - p
        if q < 0:
            p, q = -p, -q
        if max_digits is not None and digits10(p) > max_digits:
            raise BudgetError(
                f"chain numerator passed {max_digits} digits after {len(floors)} splits"
            )
    terminal = coprime_fraction(p, q)
    return floors, terminal, terminal.denominator == 1


@dataclass(frozen=True)
class ChainResult:
    """Splitting chain for the companion of a doubled integer-seed arctangent.

    The exact identity is
      pi/4 = leading_coefficient * atan(1/leading_integer)
             + sum(atan(1/b) for b in floor_integers) + atan(1/terminal).
    terminal has denominator 1 iff the chain terminated exactly; evaluators
    may linearize atan(1/terminal) to 1/terminal when it did not.
    """

    k: int
    mode: str
    leading_coefficient: int
    leading_integer: int
    floor_integers: tuple[int, ...]
    terminal: Fraction
    terminated_exactly: bool

    def formula(self) -> MachinFormula:
        terms = [ArctanTerm(self.leading_coefficient, Fraction(self.leading_integer))]
        terms.extend(ArctanTerm(1, Fraction(b)) for b in self.floor_integers)
        terms.append(ArctanTerm(1, self.terminal))
        return MachinFormula(tuple(terms))


def split_chain(
    k: int,
    steps: int,
    mode: str = "floor",
    max_digits: Optional[int] = None,
) -> ChainResult:
    """Seed + companion + up to `steps` integer-reciprocal splits.

    Stops early (terminated_exactly) when a split lands on an integer.
    """
    if not 0 <= steps <= MAX_STEPS:
        raise ValueError(f"steps must be in [0, {MAX_STEPS}]")
    seed = leading_integer(k, mode)
    companion = two_step_companion(seed, k)
    floors, terminal, exact = _run_chain(companion, steps, max_digits)
    return ChainResult(
        k=k,
        mode=mode,
        leading_coefficient=1 << (k - 1),
        leading_integer=seed,
        floor_integers=tuple(floors),
        terminal=terminal,
        terminated_exactly=exact,
    )


@dataclass(frozen=True)
class AltChainResult:
    """Scaled-seed variant: the seed is the quotient truncated to ell
    decimals, the whole split chain inherits the 2^(k-1) coefficient, and
    one rational companion term closes the identity:
      pi/4 = leading_coefficient * (sum(atan(1/a) for a in floor_integers)
             + atan(1/terminal)) + atan(1/companion).
    floor_integers[0] is floor(seed). Digit yield is governed by the
    companion, so it is independent of how many splits are taken.
    """

    k: int
    ell: int
    seed: Fraction
    leading_coefficient: int
    floor_integers: tuple[int, ...]
    terminal: Fraction
    companion: Fraction
    terminated_exactly: bool

    def formula(self) -> MachinFormula:
        c = self.leading_coefficient
        terms = [ArctanTerm(c, Fraction(b)) for b in self.floor_integers]
        terms.append(ArctanTerm(c, self.terminal))
        terms.append(ArctanTerm(1, self.companion))
        return MachinFormula(tuple(terms))


def alt_chain(k: int, ell: int, steps: int, max_digits: Optional[int] = None) -> AltChainResult:
    """Split chain started from the decimal-truncated quotient itself."""
    if not 0 <= ell <= MAX_ELL:
        raise ValueError(f"ell must be in [0, {MAX_ELL}]")
    if not 0 <= steps <= MAX_STEPS:
        raise ValueError(f"steps must be in [0, {MAX_STEPS}]")
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must be in [1, {MAX_K}]")
    scale = int(pow10(ell))
    scaled_floor = ball_floor_certified(
        lambda p: nested_radical_quotient(k, p) * scale, 2 * k + 40 + ell
    )
    seed = coprime_fraction(scaled_floor, scale)
    companion = two_step_companion(seed, k)
    floors, terminal, exact = _run_chain(seed, steps, max_digits)
    return AltChainResult(
        k=k,
        ell=ell,
        seed=seed,
        leading_coefficient=1 << (k - 1),
        floor_integers=tuple(floors),
        terminal=terminal,
        companion=companion,
        terminated_exactly=exact,
    )


@dataclass(frozen=True)
class Decomposition:
    """arctan(1/z) = sum(atan(1/n) for n in integers) + atan(1/terminal)."""

    integers: tuple[int, ...]
    terminal: Fraction
    terminated_exactly: bool


def decompose_arctan(z: RationalLike, max_steps: int = 64) -> Decomposition:
    """Expand arctan(1/z) into integer-reciprocal arctangents.

    z in [0, 1) is rejected (the split pivots on floor(z) and needs
    |z| >= 1 or z < 0). Negative values are folded through the odd symmetry
    arctan(-x) = -arctan(x), so emitted integers carry the running sign;
    only z in (-1, 0) takes one literal floor step (pivot -1) first.
    """
    f = _as_fraction(z)
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    p = mpz(f.numerator)
    q = mpz(f.denominator)
    if 0 <= p < q:
        raise DomainError(f"decomposition undefined for z in [0, 1): {format_rational(f)}")
    sign = 1
    ints: list[int] = []
    steps = 0
    while True:
        if p < 0 and -p >= q:
            sign = -sign
            p = -p
        if p % q == 0:
            return Decomposition(tuple(ints), coprime_fraction(sign * p, q), True)
        if steps >= max_steps:
            return Decomposition(tuple(ints), coprime_fraction(sign * p, q), False)
        b = p // q
        ints.append(int(sign * b))
        p, q = q + b * p, b * q - p
        if q < 0:
            p, q = -p, -q
        steps += 1


def lehmer_measure(
    formula: MachinFormula,
    exclusions: Optional[AbstractSet[int]] = None,
    precision: int = 25,
) -> RealBall:
    """Certified ball for sum(1/log10|beta|) over the formula's terms.

    One summand per term, whatever its integer coefficient. `exclusions`
    names term indices left out of the sum (e.g. a linearized closer).
    Terms with |beta| = 1 make the measure undefined; |beta| < 1 would
    contribute a negative-logarithm summand and is rejected.
    """
    skip = exclusions or frozenset()
    included = [t for i, t in enumerate(formula.terms) if i not in skip]
    for t in included:
        b = abs(t.beta)
        if b == 1:
            raise MeasureUndefinedError(
                "term with |beta| = 1 has log10 0; measure undefined"
            )
        if b < 1:
            raise NegativeLogError(
                f"term with |beta| = {format_rational(b)} < 1 gives a negative summand"
            )
    work = precision + 5
    cap = precision_cap()
    while True:
        try:
            total = RealBall.from_int(0, work)
            one = RealBall.from_int(1, work)
            for t in included:
                lg = certified_log10(abs(t.beta), work)
                total = total + one / lg
            return total.rescale(precision)
        except ZeroDivisionError:
            # a |beta| barely above 1: the log ball straddled zero
            if work >= cap:
                raise MeasureUndefinedError(
                    f"could not separate log10|beta| from zero under cap {cap}"
                ) from None
            work = min(2 * work, cap)


def _gauss_mul(ar: "mpz", ai: "mpz", br: "mpz", bi: "mpz") -> tuple["mpz", "mpz"]:
    return ar * br - ai * bi, ar * bi + ai * br


def _gauss_pow(re: "mpz", im: "mpz", e: int) -> tuple["mpz", "mpz"]:
    rr, ri = mpz(1), mpz(0)
    br, bi = re, im
    while e:
        if e & 1:
            rr, ri = _gauss_mul(rr, ri, br, bi)
        e >>= 1
        if e:
            br, bi = _gauss_mul(br, bi, br, bi)
    return rr, ri


_TWO_PI_LOWER = Fraction(6283185, 1000000)  # < 2*pi


def verify_formula_exact(formula: MachinFormula) -> bool:
    """Exact decision: does the formula sum to pi/4?

    Two ingredients, both required: a Gaussian-integer product test that the
    total angle is pi/4 modulo 2*pi (each term contributes
    (p + iq)^|coeff| to numerator or denominator by coefficient sign; the
    combined product must satisfy re == im > 0), and a 25-digit ball
    evaluation of the angle sum that pins the winding to zero.
    """
    num = (mpz(1), mpz(0))
    den = (mpz(1), mpz(0))
    for t in formula.terms:
        p = mpz(t.beta.numerator)
        q = mpz(t.beta.denominator)
        if p < 0:
            p, q = -p, -q
        powed = _gauss_pow(p, q, abs(t.coefficient))
        if t.coefficient > 0:
            num = _gauss_mul(num[0], num[1], powed[0], powed[1])
        else:
            den = _gauss_mul(den[0], den[1], powed[0], powed[1])
    g_re = num[0] * den[0] + num[1] * den[1]
    g_im = num[1] * den[0] - num[0] * den[1]
    if g_re != g_im or g_re <= 0:
        return False
    # winding: the angle sum equals pi/4 + 2*pi*w; |sum - pi/4| < 2*pi => w = 0
    prec = 25
    cap = precision_cap()
    while True:
        total = RealBall.from_int(0, prec)
        for t in formula.terms:
            total = total + arctan_reciprocal(t.beta, prec, SeriesKernel.EULER_2F1) * t.coefficient
        diff = total - arctan_reciprocal(1, prec, SeriesKernel.ITERATIVE_GH)
        if diff.upper < _TWO_PI_LOWER and diff.lower > -_TWO_PI_LOWER:
            return True
        if diff.lower >= _TWO_PI_LOWER or diff.upper <= -_TWO_PI_LOWER:
            return False
        if prec >= cap:
            raise PrecisionCapError(f"winding undecided under precision cap {cap}")
        prec = min(2 * prec, cap)
