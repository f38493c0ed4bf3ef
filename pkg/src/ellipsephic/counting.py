"""Exact solution counts for digit-restricted moment systems.

count_solutions enumerates the |S|^s ordered s-tuples of a one-dimensional
set once, bins them by the exact integer vector of power sums (one sum per
moment), and squares bin sizes: that is the number of 2s-tuple solutions of
the system sum x_i^e = sum y_i^e, e in moments. Everything stays in exact
integer arithmetic; budgets and 64-bit range checks run before enumeration.
The counts double as an independent oracle for the restriction objective,
since moments = [1] with s = n is the additive energy.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cantor import INT64_MAX, DigitSet, LatticeSet, enumerate_level
from .errors import (
    BudgetExceededError,
    InvariantViolationError,
    OverflowRiskError,
    ParseError,
)
from .optimize import OptimizerConfig, default_descriptor, estimate_restriction
from .restriction import uniform_objective

DEFAULT_COUNT_BUDGET = 100_000_000
_CHUNK_ROWS = 1 << 20


@dataclass(frozen=True)
class SystemSpec:
    variables_per_side: int
    moments: tuple[int, ...]

    def __post_init__(self):
        if self.variables_per_side < 1:
            raise ParseError("variables_per_side must be >= 1")
        if not self.moments:
            raise ParseError("moments must be nonempty")
        if any(m < 1 for m in self.moments) or any(
            a >= b for a, b in zip(self.moments, self.moments[1:])
        ):
            raise ParseError("moments must be strictly increasing positive integers")

    @classmethod
    def vinogradov(cls, s: int, degree: int) -> "SystemSpec":
        if degree < 1:
            raise ParseError("degree must be >= 1")
        return cls(s, tuple(range(1, degree + 1)))

    def to_payload(self) -> dict:
        return {
            "variables_per_side": self.variables_per_side,
            "moments": list(self.moments),
        }


@dataclass(frozen=True)
class CountResult:
    set_descriptor: str
    spec: SystemSpec
    count: int
    diagonal_count: int
    tuples_enumerated: int

    def to_payload(self) -> dict:
        return {
            "set": self.set_descriptor,
            "spec": self.spec.to_payload(),
            "count": self.count,
            "diagonal_count": self.diagonal_count,
            "tuples_enumerated": self.tuples_enumerated,
        }


def diagonal_count(set_size: int, s: int) -> int:
    """Ordered pairs (x, y) of s-tuples with y a permutation of x.

    Exact sum over multisets of (s! / prod multiplicity!)^2, computed as
    s!^2 times the t^s coefficient of (sum_m t^m / m!^2)^set_size in
    rational arithmetic.
    """
    if set_size < 0 or s < 0:
        raise ParseError("set_size and s must be nonnegative")
    if set_size == 0:
        return 1 if s == 0 else 0
    base = [Fraction(1, math.factorial(m) ** 2) for m in range(s + 1)]

    def mul(p, q):
        out = [Fraction(0)] * (s + 1)
        for i, a in enumerate(p):
            if a == 0:
                continue
            for j, b in enumerate(q):
                if i + j > s:
                    break
                out[i + j] += a * b
        return out

    result = [Fraction(1)] + [Fraction(0)] * s
    power = base
    e = set_size
    while e:
        if e & 1:
            result = mul(result, power)
        e >>= 1
        if e:
            power = mul(power, power)
    total = result[s] * math.factorial(s) ** 2
    if total.denominator != 1:
        raise InvariantViolationError("permutation-pair count was not an integer")
    return int(total)


def _coordinates(S: LatticeSet) -> list[int]:
    if S.dimension != 1:
        raise ParseError("counting requires a one-dimensional set")
    return [p[0] for p in S.points]


def _power_table(xs: list[int], moments: tuple[int, ...], s: int) -> np.ndarray:
    table = [[x**e for e in moments] for x in xs]
    for col, e in enumerate(moments):
        worst = max(abs(row[col]) for row in table)
        if s * worst > INT64_MAX:
            raise OverflowRiskError(
                f"power sums for moment {e} may exceed the 64-bit range "
                f"({s} * {worst})"
            )
    return np.asarray(table, dtype=np.int64)


def _pack_strides(table: np.ndarray, s: int):
    """Affine packing of power-sum vectors into single int64 keys, if safe."""
    mins, strides = [], []
    span_product = 1
    offset_bound = 0
    for col in range(table.shape[1]):
        column = [int(v) for v in table[:, col]]
        mins.append(s * min(column))
        span = s * max(column) - s * min(column) + 1
        strides.append(span_product)
        offset_bound += s * max(abs(v) for v in column) * span_product
        span_product *= span
        if span_product > INT64_MAX or offset_bound > INT64_MAX:
            return None
    return np.asarray(mins, np.int64), np.asarray(strides, np.int64)


def _bin_sizes(table: np.ndarray, s: int) -> list[int]:
    """Sizes of the fibers of the power-sum map over all k^s tuples."""
    k, m = table.shape
    suffix_depth = 0
    suffix_rows = 1
    while suffix_depth < s and suffix_rows * k <= _CHUNK_ROWS:
        suffix_rows *= k
        suffix_depth += 1
    prefix_depth = s - suffix_depth
    block = np.zeros((1, m), dtype=np.int64)
    for _ in range(suffix_depth):
        block = (block[:, None, :] + table[None, :, :]).reshape(-1, m)

    packing = _pack_strides(table, s)
    bins: dict = {}
    if packing is not None:
        mins, strides = packing
        packed_block = ((block - mins) * strides).sum(axis=1)
        for prefix in itertools.product(range(k), repeat=prefix_depth):
            offset = int((table[list(prefix)].sum(axis=0) * strides).sum())
            uniq, counts = np.unique(packed_block + offset, return_counts=True)
            for key, c in zip(uniq.tolist(), counts.tolist()):
                bins[key] = bins.get(key, 0) + c
    else:
        for prefix in itertools.product(range(k), repeat=prefix_depth):
            offset = table[list(prefix)].sum(axis=0)
            uniq, counts = np.unique(block + offset, axis=0, return_counts=True)
            for key, c in zip(map(tuple, uniq.tolist()), counts.tolist()):
                bins[key] = bins.get(key, 0) + c
    return list(bins.values())


def count_solutions(
    S: LatticeSet,
    spec: SystemSpec,
    budget: int = DEFAULT_COUNT_BUDGET,
    descriptor: str | None = None,
) -> CountResult:
    """Exact number of 2s-tuples with matching power sums on each moment."""
    xs = _coordinates(S)
    s = spec.variables_per_side
    tuples = len(xs) ** s
    if tuples > budget:
        raise BudgetExceededError(
            f"enumeration of {len(xs)}^{s} = {tuples} tuples exceeds budget {budget}"
        )
    table = _power_table(xs, spec.moments, s)
    sizes = _bin_sizes(table, s)
    count = sum(c * c for c in sizes)
    diagonal = diagonal_count(len(xs), s)
    if count < diagonal or count < tuples:
        raise InvariantViolationError(
            "count fell below the permutation-pair floor; binning is broken"
        )
    return CountResult(
        set_descriptor=descriptor or default_descriptor(S),
        spec=spec,
        count=count,
        diagonal_count=diagonal,
        tuples_enumerated=tuples,
    )


def count_vinogradov_ellipsephic(
    generator: DigitSet,
    j: int,
    s: int,
    degree: int,
    budget: int = DEFAULT_COUNT_BUDGET,
) -> CountResult:
    """Vinogradov-system count over level j of an ellipsephic generator."""
    level = enumerate_level(generator, j)
    return count_solutions(
        level.elements,
        SystemSpec.vinogradov(s, degree),
        budget=budget,
        descriptor=level.descriptor(),
    )


def offdiagonal_lower_bound(
    generator: DigitSet, j: int, s: int, degree: int = 2
) -> float:
    """Cauchy-Schwarz floor for the quadratic Vinogradov count at level j.

    The k^j level points give (k^j)^s left-hand sides whose (sum, sum of
    squares) image lies in a box of (2 s q^j + 1)(2 s q^{2j} + 1) integer
    points; squaring the average fiber size gives the bound. Weak at small
    scales by design; every exact count must exceed it.
    """
    if degree != 2:
        raise ParseError("the off-diagonal floor is stated for degree 2 only")
    if j < 0 or s < 1:
        raise ParseError("need j >= 0 and s >= 1")
    k, q = generator.k, generator.base
    numerator = (k**j) ** (2 * s)
    denominator = (2 * s * q**j + 1) * (2 * s * q ** (2 * j) + 1)
    return float(Fraction(numerator, denominator))


def energy_vs_restriction(
    S: LatticeSet,
    n: int,
    cfg: OptimizerConfig | None = None,
    expect_uniform_extremal: bool | None = None,
) -> dict:
    """Cross-check the uniform-weight objective against the optimized one.

    The uniform value additive_energy / |S|^n can never exceed the sphere
    maximum; when expect_uniform_extremal is True the two must agree to
    1e-9 (sets where the constant weight is extremal), when False they must
    differ by more, and when None both outcomes are acceptable.
    """
    uniform = uniform_objective(S, n)
    estimate = estimate_restriction(S, n, cfg)
    if uniform > estimate.value_2n + 1e-9:
        raise InvariantViolationError(
            f"uniform objective {uniform} exceeds the optimized value "
            f"{estimate.value_2n}"
        )
    gap = estimate.value_2n - uniform
    uniform_is_extremal = abs(gap) <= 1e-9
    if expect_uniform_extremal is True and not uniform_is_extremal:
        raise InvariantViolationError(
            f"expected the constant weight to be extremal; gap {gap}"
        )
    if expect_uniform_extremal is False and uniform_is_extremal:
        raise InvariantViolationError(
            "expected a non-uniform extremizer but the uniform weight matched"
        )
    return {
        "set": estimate.set_descriptor,
        "n": n,
        "uniform_objective": uniform,
        "value_2n": estimate.value_2n,
        "gap": gap,
        "uniform_is_extremal": uniform_is_extremal,
    }
