"""Certified pi digits from splitting-chain identities.

The engine evaluates every arctangent term of a generated identity as a
certified series, linearizes the non-integer terminal (arctan(1/B) -> 1/B,
error under |B|^-3/3), and counts correct digits by comparing truncated
decimal expansions against a reference that is itself cross-verified by two
independent identity/kernel routes.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import gmpy2
from gmpy2 import mpz

from .arctan_eval import SeriesKernel, arctan_reciprocal
from .errors import ConsistencyError, MeasureUndefinedError, PrecisionCapError
from .exact_arith import (
    RealBall,
    certified_decimal_string,
    certified_log10,
    coprime_fraction,
    digits10,
    pow10,
    precision_cap,
)
from .formula_gen import (
    AltChainResult,
    ArctanTerm,
    ChainResult,
    MachinFormula,
    alt_chain,
    leading_integer,
    lehmer_measure,
    split_chain,
    two_step_companion,
)

# first reference route: the classic two-term identity
_ROUTE_A = ((4, 5), (1, -239))

# second route: an exactly-terminating six-split chain, frozen as literals so
# the reference never depends on the generator it is used to check
_ROUTE_B = (
    (8, 10),
    (1, -84),
    (1, -21342),
    (1, -991268848),
    (1, -193018008592515208050),
    (1, -197967899896401851763240424238758988350338),
    (
        1,
        -117573868168175352930277752844194126767991915008537018836932014293678271636885792397,
    ),
)


_REFERENCE_PROVENANCE = (
    "two-term identity via maclaurin x seven-term integer identity via "
    "iterative_gh, digit-for-digit agreement"
)


@dataclass(frozen=True)
class ReferencePi:
    """Truncated decimal expansion of pi: digits == "3." + precision digits."""

    digits: str
    precision: int
    provenance: str = _REFERENCE_PROVENANCE


_best_reference: Optional[ReferencePi] = None


def _eval_terms(
    terms: Sequence[tuple[int, Union[int, Fraction]]],
    precision: int,
    kernel: SeriesKernel,
    threads: int = 1,
) -> RealBall:
    """Sum coefficient * arctan(1/beta) over terms, in listed order."""
    if threads > 1 and len(terms) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            balls = list(
                pool.map(lambda t: arctan_reciprocal(t[1], precision, kernel), terms)
            )
    else:
        balls = [arctan_reciprocal(b, precision, kernel) for _, b in terms]
    total = RealBall.from_int(0, precision)
    for (coeff, _), ball in zip(terms, balls):
        total = total + ball * coeff
    return total


def reference_pi(decimals: int, threads: int = 1) -> ReferencePi:
    """Truncated expansion of pi, certified by two independent routes.

    Route A evaluates the classic two-term identity with the alternating
    kernel; route B evaluates a seven-term integer identity with the
    complex-pair kernel. Both must agree digit for digit or the call fails.
    Results are cached; shorter requests slice the longest computed string.
    """
    global _best_reference
    if decimals < 1:
        raise ValueError("decimals must be >= 1")
    cap = precision_cap()
    if decimals > cap:
        raise PrecisionCapError(f"{decimals} reference decimals exceed cap {cap}")
    if _best_reference is not None and _best_reference.precision >= decimals:
        return ReferencePi(_best_reference.digits[: decimals + 2], decimals)
    work = decimals + 10
    while True:
        a = _eval_terms(_ROUTE_A, work, SeriesKernel.MACLAURIN, threads) * 4
        b = _eval_terms(_ROUTE_B, work, SeriesKernel.ITERATIVE_GH, threads) * 4
        text_a, dec_a = certified_decimal_string(a, decimals)
        text_b, dec_b = certified_decimal_string(b, decimals)
        if dec_a >= decimals and dec_b >= decimals:
            if text_a != text_b:
                raise ConsistencyError(
                    "reference routes disagree: "
                    f"{text_a[:40]}... vs {text_b[:40]}..."
                )
            ref = ReferencePi(text_a, decimals)
            if (
                _best_reference is None
                or decimals > _best_reference.precision
            ):
                _best_reference = ref
            return ref
        work = work + decimals // 2 + 20
        if work > cap:
            raise PrecisionCapError(f"reference precision blew past cap {cap}")


def count_matching_decimals(digits: str, reference: str) -> int:
    """Length of the common decimal prefix after "3." of two expansions."""
    if not digits.startswith("3.") or not reference.startswith("3."):
        return 0
    n = 0
    for a, b in zip(digits[2:], reference[2:]):
        if a != b:
            break
        n += 1
    return n


@dataclass(frozen=True)
class PiApproximation:
    """One evaluated identity: certified digits and bookkeeping."""

    k: int
    steps: int
    mode: str
    variant: str
    kernel: str
    precision: int
    digits: str
    certified_text: str
    correct_digits: int
    exact_identity: bool
    value: RealBall
    lehmer: RealBall
    wall_time_ms: float
    chain: Union[ChainResult, AltChainResult]


def _predicted_digits(terminal: Fraction) -> int:
    """Decimal digits the linearized terminal should deliver: ~3 log10|B|."""
    num = abs(terminal.numerator)
    den = terminal.denominator
    log_b = float(gmpy2.log10(mpz(num))) - float(gmpy2.log10(mpz(den)))
    return max(int(3 * log_b), 1)


def _series_formula(chain: Union[ChainResult, AltChainResult]) -> MachinFormula:
    """The terms the engine evaluates as series (linearized closer omitted)."""
    if isinstance(chain, ChainResult):
        terms = [ArctanTerm(chain.leading_coefficient, Fraction(chain.leading_integer))]
        terms.extend(ArctanTerm(1, Fraction(b)) for b in chain.floor_integers)
        if chain.terminated_exactly:
            terms.append(ArctanTerm(1, chain.terminal))
        return MachinFormula(tuple(terms))
    c = chain.leading_coefficient
    terms = [ArctanTerm(c, Fraction(b)) for b in chain.floor_integers]
    terms.append(ArctanTerm(c, chain.terminal))
    return MachinFormula(tuple(terms))


def _evaluate_chain(
    chain: Union[ChainResult, AltChainResult],
    precision: int,
    kernel: SeriesKernel,
    threads: int,
) -> RealBall:
    """pi ball: 4 * (series terms + linearized closer if any)."""
    series = _series_formula(chain)
    pairs = [(t.coefficient, t.beta) for t in series.terms]
    total = _eval_terms(pairs, precision, kernel, threads)
    if isinstance(chain, ChainResult):
        closer = None if chain.terminated_exactly else chain.terminal
    else:
        closer = chain.companion
    if closer is not None:
        # linearized closer: the term arctan(1/B) is replaced by 1/B itself.
        # The ball stays tight around the linearized sum; its distance from
        # pi/4 is between 1/(4|B|^3) and 1/(3|B|^3), which is what the digit
        # comparison against the reference measures.
        recip = RealBall.from_fraction(
            coprime_fraction(closer.denominator, closer.numerator), precision
        )
        total = total + recip
    return total * 4


def _finish(
    chain: Union[ChainResult, AltChainResult],
    k: int,
    steps: int,
    mode: str,
    variant: str,
    kernel: SeriesKernel,
    precision: Optional[int],
    threads: int,
    exact: bool,
    terminal_for_prediction: Fraction,
    t0: float,
) -> PiApproximation:
    cap = precision_cap()
    if exact:
        pred = None
        work = precision or 120
    else:
        pred = _predicted_digits(terminal_for_prediction)
        work = precision or (2 * pred + 20)
    if work > cap:
        raise PrecisionCapError(f"working precision {work} exceeds cap {cap}")
    attempts = 0
    while True:
        attempts += 1
        value = _evaluate_chain(chain, work, kernel, threads)
        text, certified = certified_decimal_string(value)
        if exact:
            window = certified
        else:
            window = min(certified, pred + 30)
        ref = reference_pi(max(window, 1), threads)
        matched = count_matching_decimals(text, ref.digits)
        if exact or matched < window:
            correct = matched
            break
        if attempts >= 4:
            raise ConsistencyError(
                f"no digit mismatch found within {window} decimals at precision {work}"
            )
        work = 2 * work
        if work > cap:
            raise PrecisionCapError(f"working precision {work} exceeds cap {cap}")
    measure = lehmer_measure(_series_formula(chain))
    return PiApproximation(
        k=k,
        steps=steps,
        mode=mode,
        variant=variant,
        kernel=kernel.value,
        precision=work,
        digits=text[: correct + 2],
        certified_text=text,
        correct_digits=correct,
        exact_identity=exact,
        value=value,
        lehmer=measure,
        wall_time_ms=round((time.perf_counter() - t0) * 1000.0, 3),
        chain=chain,
    )


def approximate_pi(
    k: int,
    steps: int,
    mode: str = "floor",
    kernel: SeriesKernel = SeriesKernel.ITERATIVE_GH,
    precision: Optional[int] = None,
    threads: int = 1,
    max_digits: Optional[int] = None,
) -> PiApproximation:
    """Evaluate the k-seed chain identity after `steps` splits.

    The non-integer terminal is linearized; an exactly-terminated chain is an
    exact identity for pi, so correct_digits then just reports how many
    digits were compared (exact_identity is the definitive flag).
    """
    t0 = time.perf_counter()
    chain = split_chain(k, steps, mode, max_digits)
    return _finish(
        chain,
        k,
        steps,
        mode,
        "standard",
        kernel,
        precision,
        threads,
        chain.terminated_exactly,
        chain.terminal,
        t0,
    )


def approximate_pi_alt(
    k: int,
    ell: int,
    steps: int,
    kernel: SeriesKernel = SeriesKernel.ITERATIVE_GH,
    precision: Optional[int] = None,
    threads: int = 1,
    max_digits: Optional[int] = None,
) -> PiApproximation:
    """Evaluate the scaled-seed variant.

    Here the linearized closer is the companion, fixed before any splitting,
    so correct_digits does not depend on `steps`.
    """
    t0 = time.perf_counter()
    chain = alt_chain(k, ell, steps, max_digits)
    return _finish(
        chain,
        k,
        steps,
        "floor",
        "alternative",
        kernel,
        precision,
        threads,
        False,
        chain.companion,
        t0,
    )


@dataclass(frozen=True)
class DoublingRow:
    steps: int
    correct_digits: int
    ratio: Optional[float]


@dataclass(frozen=True)
class DoublingTable:
    k: int
    mode: str
    rows: tuple[DoublingRow, ...]


def digit_doubling_table(
    k: int,
    max_steps: int,
    mode: str = "floor",
    kernel: SeriesKernel = SeriesKernel.ITERATIVE_GH,
    threads: int = 1,
) -> DoublingTable:
    """correct_digits for steps = 0..max_steps; each split about doubles it.

    Stops early if the chain terminates exactly (all further rows would
    repeat the same exact identity).
    """
    rows: list[DoublingRow] = []
    prev: Optional[int] = None
    for m in range(0, max_steps + 1):
        appr = approximate_pi(k, m, mode, kernel, threads=threads)
        if appr.exact_identity:
            break
        ratio = round(appr.correct_digits / prev, 6) if prev else None
        rows.append(DoublingRow(m, appr.correct_digits, ratio))
        prev = appr.correct_digits
    return DoublingTable(k, mode, tuple(rows))


@dataclass(frozen=True)
class LehmerRow:
    steps: int
    low: Fraction
    high: Fraction
    certified_exact: bool
    change_upper: Fraction


@dataclass(frozen=True)
class LehmerTable:
    k: int
    mode: str
    rows: tuple[LehmerRow, ...]
    stabilization_steps: Optional[int]
    threshold: Fraction


def lehmer_vs_steps(
    k: int,
    max_steps: int,
    mode: str = "floor",
    threshold: Fraction = Fraction(1, 10**4),
    exact_digit_cap: int = 3_000_000,
) -> LehmerTable:
    """Measure of the evaluated identity as a function of split count.

    The chain runs exactly while its numerator stays under exact_digit_cap
    digits. Beyond the cap, rows carry certified bands instead: squaring
    growth gives log10|B_next| >= 2*(log10|B| - 1), so the summand of the
    j-th capped row is at most 1/(2^(j-1) * (L0 - 2)) with L0 a certified
    lower bound on log10|B| at the crossing. stabilization_steps is the
    first row whose certified per-step change drops below threshold.
    """
    prec = 30

    def contribution(value: Union[int, Fraction]) -> RealBall:
        f = abs(Fraction(value))
        if f <= 1:
            raise MeasureUndefinedError(
                "chain emitted a term with |beta| <= 1; measure undefined"
            )
        return RealBall.from_int(1, prec) / certified_log10(f, prec)

    seed = leading_integer(k, mode)
    companion = two_step_companion(seed, k)
    p = mpz(companion.numerator)
    q = mpz(companion.denominator)

    mu = contribution(seed)
    terminated = p % q == 0
    if terminated:
        mu = mu + contribution(coprime_fraction(p, q))
    rows = [LehmerRow(0, mu.lower, mu.upper, True, Fraction(0))]

    band_step = Fraction(0)
    band_high = Fraction(0)
    banded = False
    base_low = mu.lower
    base_high = mu.upper
    stabilization: Optional[int] = None

    for m in range(1, max_steps + 1):
        if terminated:
            change = Fraction(0)
            low, high, exact_row = rows[-1].low, rows[-1].high, rows[-1].certified_exact
        elif banded:
            band_high += band_step
            change = band_step
            band_step = band_step / 2
            low, high, exact_row = base_low, base_high + band_high, False
        else:
            b = p // q
            c = contribution(int(b))
            prev_low = mu.lower
            mu = mu + c
            p, q = q + b * p, b * q - p
            if q < 0:
                p, q = -p, -q
            if p % q == 0:
                # the next value is an integer: it becomes an evaluated term
                mu = mu + contribution(coprime_fraction(p, q))
                terminated = True
            low, high, exact_row = mu.lower, mu.upper, True
            change = high - prev_low
            if not terminated and digits10(p) > exact_digit_cap:
                l0 = digits10(p) - digits10(q) - 1  # certified: log10|B| >= l0
                if l0 > 3:
                    banded = True
                    band_step = Fraction(1, l0 - 2)
                    base_low, base_high = low, high
        rows.append(LehmerRow(m, low, high, exact_row, change))
        if stabilization is None and change < threshold:
            stabilization = m
    return LehmerTable(k, mode, tuple(rows), stabilization, threshold)


# contract-facing alias: the measure-vs-steps experiment keyed by M
lehmer_vs_M = lehmer_vs_steps
