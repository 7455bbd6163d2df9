"""Command-line interface.

Subcommands: generate (emit an identity), pi (evaluate digits), verify
(exact check of a formula JSON), decompose (integer-reciprocal expansion of
one arctangent), experiments (CSV studies).

Exit codes: 0 success / identity true; 1 identity false or a mathematical
or budget failure; 2 usage or parse errors. Output for identical flags is
byte-identical, except for wall-time measurement fields in JSON reports.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .arctan_eval import SeriesKernel, benchmark_csv, convergence_benchmark
from .errors import BudgetError, MachinError
from .exact_arith import certified_decimal_string, format_rational, parse_rational
from .formula_gen import (
    ArctanTerm,
    MachinFormula,
    alt_chain,
    decompose_arctan,
    lehmer_measure,
    split_chain,
    verify_formula_exact,
)
from .pi_engine import (
    PiApproximation,
    approximate_pi,
    approximate_pi_alt,
    digit_doubling_table,
    lehmer_vs_steps,
)

# widely reproduced reference column for the doubling experiment (k = 6,
# rows M = 0..12); our computation certifies that row M = 4 must be ~110,
# not 98 -- see README for the analysis. Kept verbatim for comparison.
PUBLISHED_DOUBLING_COLUMN = (5, 11, 27, 54, 98, 222, 444, 889, 1783, 3567, 7136, 14273, 28546)

DEFAULT_BUDGET_SECONDS = 60.0


def _int_range(lo: int, hi: int, name: str):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}")
        if not lo <= v <= hi:
            raise argparse.ArgumentTypeError(f"{name} must be in [{lo}, {hi}], got {v}")
        return v

    return parse


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def predict_cost_seconds(k: int, steps: int, evaluate: bool) -> float:
    """Crude runtime estimate used by --budget refusals.

    Models the companion squaring chain, the splitting recursion, and (for
    pi evaluation) the dominant series divisions. Deliberately rough; it
    exists to refuse hopeless requests up front, not to meter real runs.
    """
    a = max(2.0 ** (k + 1) / math.pi, 2.0)
    companion_digits = 2.0 ** (k - 1) * math.log10(a * a + 1.0)
    l1 = math.log10(a) + 2.0
    lm = l1 * (2.0**steps)
    chain_digits = companion_digits / 2.0 + lm

    def mul_cost(d: float) -> float:
        return (max(d, 1.0) / 1e6) ** 1.1 * 0.02

    cost = mul_cost(companion_digits) * (k + 4)
    cost += mul_cost(chain_digits) * max(steps, 1) * 3.0
    if evaluate:
        precision = 6.0 * lm + 40.0
        terms = precision / max(math.log10(4.0 * a * a + 1.0), 1.0)
        cost += terms * (precision / 1e6) * 0.004
        cost += precision * precision / 4e9
    return cost


def _budget_guard(k: int, steps: int, budget: float, evaluate: bool) -> None:
    predicted = predict_cost_seconds(k, steps, evaluate)
    if predicted > budget:
        raise BudgetError(
            f"predicted cost ~{predicted:.1f}s exceeds budget {budget:.1f}s "
            f"(raise with --budget)"
        )


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _frac_decimal(x: Fraction, places: int) -> str:
    """Exact truncated decimal rendering of a nonnegative rational."""
    scaled = (x.numerator * 10**places) // x.denominator
    s = str(scaled).rjust(places + 1, "0")
    return f"{s[:-places]}.{s[-places:]}" if places else s


def cmd_generate(args: argparse.Namespace) -> int:
    _budget_guard(args.k, args.M, args.budget, evaluate=False)
    if args.variant == "alternative":
        formula = alt_chain(args.k, args.ell, args.M).formula()
    else:
        formula = split_chain(args.k, args.M, args.mode).formula()
    out = formula.to_json() if args.format == "json" else formula.render() + "\n"
    _write(args.output, out)
    return 0


def cmd_pi(args: argparse.Namespace) -> int:
    _budget_guard(args.k, args.M, args.budget, evaluate=True)
    kernel = SeriesKernel(args.kernel)

    def run(precision: Optional[int]) -> PiApproximation:
        if args.variant == "alternative":
            return approximate_pi_alt(
                args.k, args.ell, args.M, kernel, precision, args.threads
            )
        return approximate_pi(args.k, args.M, args.mode, kernel, precision, args.threads)

    appr = run(args.precision)
    stream = appr.digits
    if args.digits is not None:
        # --digits asks for a fixed-length certified stream regardless of how
        # many of those digits the identity itself gets right.
        if len(appr.certified_text) - 2 < args.digits:
            appr = run(max(args.precision or 0, args.digits + 15))
        stream = appr.certified_text[: args.digits + 2]
    lehmer_text, _ = certified_decimal_string(appr.lehmer, 15)
    if args.format == "json":
        payload = {
            "k": appr.k,
            "M": appr.steps,
            "variant": appr.variant,
            "mode": appr.mode,
            "kernel": appr.kernel,
            "precision": appr.precision,
            "correct_digits": appr.correct_digits,
            "exact_identity": appr.exact_identity,
            "lehmer_measure": lehmer_text,
            "wall_time_ms": appr.wall_time_ms,
            "digits": stream,
        }
        _write(args.output, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [
            stream,
            f"# correct_digits: {appr.correct_digits}",
            f"# exact_identity: {'true' if appr.exact_identity else 'false'}",
            f"# lehmer_measure: {lehmer_text}",
        ]
        _write(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    if args.input is None or args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, "r", encoding="utf-8") as fh:
            text = fh.read()
    formula = MachinFormula.from_json(text)  # ValueError -> exit 2
    ok = verify_formula_exact(formula)
    print(formula.render())
    print("verified: exact identity" if ok else "verified: FALSE (does not equal pi/4)")
    return 0 if ok else 1


def _substitute_decomposition(formula: MachinFormula, z: Fraction, dec) -> MachinFormula:
    """Replace every term with argument 1/z by its integer expansion."""
    new_terms: list[ArctanTerm] = []
    hit = False
    for term in formula.terms:
        if term.beta == z:
            hit = True
            for n in dec.integers:
                new_terms.append(ArctanTerm(term.coefficient, Fraction(n)))
            new_terms.append(ArctanTerm(term.coefficient, dec.terminal))
        else:
            new_terms.append(term)
    if not hit:
        raise MachinError(f"formula has no term with argument 1/({format_rational(z)})")
    return MachinFormula(tuple(new_terms))


def cmd_decompose(args: argparse.Namespace) -> int:
    dec = decompose_arctan(args.z, args.max_steps)
    substituted = None
    measures = {}
    if args.formula is not None:
        with open(args.formula, "r", encoding="utf-8") as fh:
            base = MachinFormula.from_json(fh.read())
        substituted = _substitute_decomposition(base, args.z, dec)
        if not verify_formula_exact(substituted):
            raise MachinError("substituted formula no longer encodes pi/4 exactly")
        measures["lehmer_before"], _ = certified_decimal_string(lehmer_measure(base), 10)
        measures["lehmer_after"], _ = certified_decimal_string(
            lehmer_measure(substituted), 10
        )
    if args.format == "json":
        payload = {
            "z": format_rational(args.z),
            "integers": [str(n) for n in dec.integers],
            "terminal": format_rational(dec.terminal),
            "terminated_exactly": dec.terminated_exactly,
        }
        if substituted is not None:
            payload["substituted"] = json.loads(substituted.to_json())
            payload.update(measures)
        _write(args.output, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [
            f"z = {format_rational(args.z)}",
            "integers: " + (", ".join(str(n) for n in dec.integers) or "(none)"),
            f"terminal: {format_rational(dec.terminal)}",
            f"terminated_exactly: {'true' if dec.terminated_exactly else 'false'}",
        ]
        if substituted is not None:
            lines.append(f"substituted: {substituted.render()}")
            lines.append(f"lehmer_before: {measures['lehmer_before']}")
            lines.append(f"lehmer_after: {measures['lehmer_after']}")
        _write(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_experiments(args: argparse.Namespace) -> int:
    if args.experiment == "table1":
        table = digit_doubling_table(args.k, args.max_M, kernel=SeriesKernel(args.kernel))
        lines = ["M,correct_digits,published,delta,status"]
        failures = 0
        for row in table.rows:
            idx = row.steps
            if idx >= len(PUBLISHED_DOUBLING_COLUMN):
                break
            pub = PUBLISHED_DOUBLING_COLUMN[idx]
            delta = row.correct_digits - pub
            ok = abs(delta) <= 1
            failures += 0 if ok else 1
            lines.append(
                f"{row.steps},{row.correct_digits},{pub},{delta:+d},{'PASS' if ok else 'FAIL'}"
            )
        _write(args.output, "\n".join(lines) + "\n")
        print(
            f"doubling column k={args.k}: {failures} row(s) outside +-1",
            file=sys.stderr,
        )
        return 0 if failures == 0 else 1
    if args.experiment == "lehmer-stabilization":
        table = lehmer_vs_steps(args.k, args.max_M)
        lines = ["M,mu_low,mu_high,change_upper,certified_exact"]
        for row in table.rows:
            lines.append(
                f"{row.steps},{_frac_decimal(row.low, 8)},{_frac_decimal(row.high, 8)},"
                f"{_frac_decimal(row.change_upper, 8)},{'yes' if row.certified_exact else 'band'}"
            )
        _write(args.output, "\n".join(lines) + "\n")
        reached = (
            f"M={table.stabilization_steps}"
            if table.stabilization_steps is not None
            else "not reached in range"
        )
        print(
            f"stabilization at {reached} (threshold {_frac_decimal(table.threshold, 6)})",
            file=sys.stderr,
        )
        return 0
    if args.experiment == "series-bench":
        betas = [parse_rational(b) for b in args.betas.split(",") if b.strip()]
        precisions = [int(p) for p in args.precisions.split(",") if p.strip()]
        if args.kernels == "all":
            kernels = list(SeriesKernel)
        else:
            kernels = [SeriesKernel(k.strip()) for k in args.kernels.split(",")]
        reports = convergence_benchmark(betas, precisions, kernels)
        _write(args.output, benchmark_csv(reports))
        return 0
    raise ValueError(f"unknown experiment {args.experiment!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="machinpi",
        description="Machin-like arctangent identities for pi: generate, "
        "evaluate to N digits, verify exactly, decompose, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    k_type = _int_range(1, 64, "--k")
    m_type = _int_range(0, 64, "--M")
    ell_type = _int_range(0, 18, "--ell")

    def common(p: argparse.ArgumentParser, evaluate: bool) -> None:
        p.add_argument("--k", type=k_type, required=True, help="seed index (1..64)")
        p.add_argument("--M", type=m_type, default=0, help="number of splits (0..64)")
        p.add_argument(
            "--mode",
            choices=("floor", "ceiling"),
            default="floor",
            help="integer part taken from the seed quotient",
        )
        p.add_argument(
            "--variant",
            choices=("standard", "alternative"),
            default="standard",
            help="alternative = decimal-truncated seed with a rational companion",
        )
        p.add_argument(
            "--ell",
            type=ell_type,
            default=2,
            help="decimals kept in the alternative seed (0..18)",
        )
        p.add_argument(
            "--budget",
            type=float,
            default=DEFAULT_BUDGET_SECONDS,
            help="refuse if the predicted cost (seconds) exceeds this",
        )
        p.add_argument("--output", help="write to this path instead of stdout")
        if evaluate:
            p.add_argument(
                "--kernel",
                choices=[k.value for k in SeriesKernel],
                default=SeriesKernel.ITERATIVE_GH.value,
                help="series kernel for arctangent terms",
            )
            p.add_argument(
                "--precision",
                type=_positive_int,
                default=None,
                help="override the working precision (decimal digits)",
            )
            p.add_argument(
                "--threads",
                type=_positive_int,
                default=os.cpu_count() or 1,
                help="evaluate terms concurrently (output is independent of this)",
            )

    p_gen = sub.add_parser("generate", help="emit an exact identity")
    common(p_gen, evaluate=False)
    p_gen.add_argument("--format", choices=("text", "json"), default="text")
    p_gen.set_defaults(func=cmd_generate)

    p_pi = sub.add_parser("pi", help="evaluate an identity to certified digits")
    common(p_pi, evaluate=True)
    p_pi.add_argument(
        "--digits",
        type=_positive_int,
        default=None,
        help="print exactly this many certified decimals (may exceed the "
        "identity's correct digits; the correct_digits line still tells the truth)",
    )
    p_pi.add_argument("--format", choices=("text", "json"), default="text")
    p_pi.set_defaults(func=cmd_pi)

    p_ver = sub.add_parser("verify", help="exact check of a formula JSON")
    p_ver.add_argument(
        "--input",
        help="formula JSON path (default: stdin; '-' also reads stdin)",
    )
    p_ver.set_defaults(func=cmd_verify)

    p_dec = sub.add_parser("decompose", help="expand arctan(1/z) over integers")
    p_dec.add_argument("--z", type=_rational, required=True, help='rational like "-2513489/2"')
    p_dec.add_argument(
        "--max-steps", type=_int_range(0, 4096, "--max-steps"), default=64
    )
    p_dec.add_argument(
        "--formula",
        help="formula JSON path: substitute the expansion for every term with "
        "argument 1/z and report the Lehmer measure before and after",
    )
    p_dec.add_argument("--format", choices=("text", "json"), default="text")
    p_dec.add_argument("--output", help="write to this path instead of stdout")
    p_dec.set_defaults(func=cmd_decompose)

    p_exp = sub.add_parser("experiments", help="reproducible CSV studies")
    exp_sub = p_exp.add_subparsers(dest="experiment", required=True)

    e1 = exp_sub.add_parser("table1", help="digit doubling vs split count")
    e1.add_argument("--k", type=k_type, default=6)
    e1.add_argument("--max-M", type=m_type, default=12)
    e1.add_argument(
        "--kernel",
        choices=[k.value for k in SeriesKernel],
        default=SeriesKernel.ITERATIVE_GH.value,
    )
    e1.add_argument("--output", help="CSV path (default stdout)")
    e1.set_defaults(func=cmd_experiments)

    e2 = exp_sub.add_parser("lehmer-stabilization", help="measure vs split count")
    e2.add_argument("--k", type=k_type, default=17)
    e2.add_argument("--max-M", type=m_type, default=25)
    e2.add_argument("--output", help="CSV path (default stdout)")
    e2.set_defaults(func=cmd_experiments)

    e3 = exp_sub.add_parser("series-bench", help="kernel convergence benchmark")
    e3.add_argument("--betas", default="10,40,83443", help="comma-separated rationals")
    e3.add_argument("--precisions", default="1000", help="comma-separated digit counts")
    e3.add_argument("--kernels", default="all", help='"all" or comma-separated names')
    e3.add_argument("--output", help="CSV path (default stdout)")
    e3.set_defaults(func=cmd_experiments)

    return parser


def _absorb_flag_values(argv: Sequence[str]) -> list[str]:
    """Join "--z -5/2" into "--z=-5/2" so negative rationals parse."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--z", "--betas"):
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_absorb_flag_values(argv))
    except SystemExit as exc:  # argparse handles --help and usage errors
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except MachinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
