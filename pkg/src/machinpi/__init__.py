"""Machin-like arctangent identities for pi.

Generates identities pi/4 = sum a_j * arctan(1/b_j) by iteratively splitting
an arctangent over the integer part of its cotangent, evaluates them to a
requested number of certified decimal digits with interchangeable series
kernels, and measures their quality (Lehmer's measure) with certified
interval arithmetic throughout.
"""

from .arctan_eval import (
    SeriesKernel,
    SeriesReport,
    arctan_limit,
    arctan_reciprocal,
    benchmark_csv,
    convergence_benchmark,
    gh_states,
)
from .errors import (
    BudgetError,
    ConsistencyError,
    DegenerateFormulaError,
    DomainError,
    FloorBoundaryError,
    MachinError,
    MeasureUndefinedError,
    NegativeLogError,
    PrecisionCapError,
)
from .exact_arith import (
    RealBall,
    ball_floor_certified,
    ball_sqrt,
    certified_decimal_string,
    certified_log10,
    coprime_fraction,
    digits10,
    format_rational,
    parse_rational,
)
from .formula_gen import (
    AltChainResult,
    ArctanTerm,
    ChainResult,
    Decomposition,
    MachinFormula,
    alt_chain,
    companion_closed_form,
    decompose_arctan,
    leading_integer,
    lehmer_measure,
    nested_radical_quotient,
    sigma_tau_states,
    split_chain,
    two_step_companion,
    verify_formula_exact,
)
from .pi_engine import (
    DoublingTable,
    LehmerTable,
    PiApproximation,
    ReferencePi,
    approximate_pi,
    approximate_pi_alt,
    count_matching_decimals,
    digit_doubling_table,
    lehmer_vs_M,
    lehmer_vs_steps,
    reference_pi,
)

__version__ = "0.1.0"

__all__ = [
    "AltChainResult",
    "ArctanTerm",
    "BudgetError",
    "ChainResult",
    "ConsistencyError",
    "Decomposition",
    "DegenerateFormulaError",
    "DomainError",
    "DoublingTable",
    "FloorBoundaryError",
    "LehmerTable",
    "MachinError",
    "MachinFormula",
    "MeasureUndefinedError",
    "NegativeLogError",
    "PiApproximation",
    "PrecisionCapError",
    "RealBall",
    "ReferencePi",
    "SeriesKernel",
    "SeriesReport",
    "alt_chain",
    "approximate_pi",
    "approximate_pi_alt",
    "arctan_limit",
    "arctan_reciprocal",
    "ball_floor_certified",
    "ball_sqrt",
    "benchmark_csv",
    "certified_decimal_string",
    "certified_log10",
    "companion_closed_form",
    "convergence_benchmark",
    "coprime_fraction",
    "count_matching_decimals",
    "decompose_arctan",
    "digit_doubling_table",
    "digits10",
    "format_rational",
    "gh_states",
    "leading_integer",
    "lehmer_measure",
    "lehmer_vs_M",
    "lehmer_vs_steps",
    "nested_radical_quotient",
    "parse_rational",
    "reference_pi",
    "sigma_tau_states",
    "split_chain",
    "two_step_companion",
    "verify_formula_exact",
    "__version__",
]
