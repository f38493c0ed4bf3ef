"""Restriction constants and decoupling exponents of digit-restricted sets.

The package computes, exactly where possible and with certified bands
otherwise:

- ellipsephic levels and arithmetic-Cantor data for a digit set (cantor),
- the even-moment restriction objective, its gradient, and exact additive
  energies (restriction),
- sphere-constrained maximization with multi-start determinism (optimize),
- decoupling-exponent estimates, power laws, and reports (exponents),
- exact solution counts for moment systems (counting),
- a CLI with caching, CSV/JSON output, and figures (cli).
"""

__version__ = "0.1.0"

from .cantor import (
    DigitSet,
    EllipsephicLevel,
    FreimanDefect,
    LatticeSet,
    enumerate_level,
    freiman_defect,
    has_carryover,
    hausdorff_dimension,
    normalize_digits,
    regroup_base,
    tensor,
)
from .counting import (
    CountResult,
    SystemSpec,
    count_solutions,
    count_vinogradov_ellipsephic,
    diagonal_count,
    energy_vs_restriction,
    offdiagonal_lower_bound,
)
from .errors import (
    BudgetExceededError,
    CarryoverPresentError,
    EllipsephicError,
    InvariantViolationError,
    LevelNotDivisibleError,
    LevelTooSmallError,
    NonFiniteError,
    OverflowRiskError,
    ParseError,
    ZeroVectorError,
)
from .exponents import (
    BAND_CAVEAT,
    EXACT_CAVEAT,
    ExponentEstimate,
    band_half_width,
    construct_maximal_cantor,
    decoupling_report,
    exponent_banded,
    exponent_no_carryover,
    exponent_sweep,
    product_extremizer,
    trivial_cap,
    verify_power_law,
)
from .optimize import (
    OptimizerConfig,
    RestrictionEstimate,
    default_descriptor,
    estimate_restriction,
    fixed_point,
    gradient_ascent,
    kkt_residual,
)
from .restriction import (
    SparseSignal,
    WeightVector,
    additive_energy,
    convolve_power,
    gradient,
    objective,
    objective_raw,
    uniform_objective,
)
from .serialize import dumps_canonical, format_real

__all__ = [
    "__version__",
    "BAND_CAVEAT",
    "EXACT_CAVEAT",
    "BudgetExceededError",
    "CarryoverPresentError",
    "CountResult",
    "DigitSet",
    "EllipsephicError",
    "EllipsephicLevel",
    "ExponentEstimate",
    "FreimanDefect",
    "InvariantViolationError",
    "LatticeSet",
    "LevelNotDivisibleError",
    "LevelTooSmallError",
    "NonFiniteError",
    "OptimizerConfig",
    "OverflowRiskError",
    "ParseError",
    "RestrictionEstimate",
    "SparseSignal",
    "SystemSpec",
    "WeightVector",
    "ZeroVectorError",
    "additive_energy",
    "band_half_width",
    "construct_maximal_cantor",
    "convolve_power",
    "count_solutions",
    "count_vinogradov_ellipsephic",
    "decoupling_report",
    "default_descriptor",
    "diagonal_count",
    "dumps_canonical",
    "energy_vs_restriction",
    "enumerate_level",
    "estimate_restriction",
    "exponent_banded",
    "exponent_no_carryover",
    "exponent_sweep",
    "fixed_point",
    "format_real",
    "freiman_defect",
    "gradient",
    "gradient_ascent",
    "has_carryover",
    "hausdorff_dimension",
    "kkt_residual",
    "normalize_digits",
    "objective",
    "objective_raw",
    "offdiagonal_lower_bound",
    "product_extremizer",
    "regroup_base",
    "tensor",
    "trivial_cap",
    "uniform_objective",
    "verify_power_law",
]
