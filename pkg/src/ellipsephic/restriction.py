"""The even-moment restriction objective and its exact gradient.

For frequencies S in Z^m and nonnegative weights a: S -> R>=0, Plancherel
turns the 2n-th moment of the weighted exponential sum into a purely
combinatorial quantity,

    F_n(a) = || a^{*n} ||_{l^2}^2 = sum_t ( sum_{l_1+...+l_n = t} prod a(l_i) )^2,

so the 2n-th power of the restriction constant A_{2n,m}(S) is the maximum of
F_n over the unit l^2 sphere of nonnegative weights. This module evaluates
F_n exactly (up to float rounding) by repeated sparse convolution, provides
the closed-form gradient

    (grad F_n)(l) = 2n * sum_t (a^{*n})(t) * (a^{*(n-1)})(t - l),

with a^{*0} the unit mass at 0, and supplies exact integer additive-energy
oracles (F_n at constant weights, integer arithmetic throughout).

Two evaluation paths exist behind one interface: a dense numpy path for
1-dimensional supports of modest range (the optimizer's hot loop), and a
hash-keyed sparse path for everything else. No FFT: exact support arithmetic
and exact-zero pruning matter more than asymptotics at these sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cantor import INT64_MAX, LatticeSet, Point
from .errors import BudgetExceededError, OverflowRiskError, ParseError, ZeroVectorError

#: Dense arrays are used on the line only while n * (range of S) stays below
#: this; wider supports fall back to the sparse dict path.
DENSE_RANGE_CAP = 1 << 22

#: Largest n-tuple enumeration additive_energy will attempt.
DEFAULT_ENERGY_BUDGET = 10**8


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative weights aligned index-for-index with support.points."""

    support: LatticeSet
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != len(self.support):
            raise ParseError(
                f"{len(vals)} values for {len(self.support)} support points"
            )
        for v in vals:
            if not math.isfinite(v) or v < 0:
                raise ParseError(f"weights must be finite and nonnegative, got {v}")

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.array()))

    def to_payload(self) -> dict:
        return {
            "support": self.support.to_payload(),
            "values": list(self.values),
        }


@dataclass(frozen=True)
class SparseSignal:
    """Finitely supported function on Z^m; exact zeros are never stored."""

    dimension: int
    entries: dict[Point, float]

    def __post_init__(self):
        cleaned = {
            tuple(int(c) for c in t): float(v)
            for t, v in self.entries.items()
            if v != 0.0
        }
        object.__setattr__(self, "entries", cleaned)
        for t in cleaned:
            if len(t) != self.dimension:
                raise ParseError(f"entry key {t} does not have dimension {self.dimension}")

    def __len__(self) -> int:
        return len(self.entries)

    def to_payload(self) -> dict:
        """JSON object mapping 't1,t2,...' keys to coefficients."""
        return {
            ",".join(str(c) for c in t): v
            for t, v in sorted(self.entries.items())
        }


# ---------------------------------------------------------------------------
# sparse dict arithmetic (any dimension)

def _conv_dict(a: dict, b: dict) -> dict:
    out: dict = {}
    for t1, v1 in a.items():
        for t2, v2 in b.items():
            key = tuple(x + y for x, y in zip(t1, t2))
            out[key] = out.get(key, 0.0) + v1 * v2
    return {t: v for t, v in out.items() if v != 0.0}


def _chain_dict(points: Sequence[Point], values: np.ndarray, n: int) -> list[dict]:
    """[f_1, ..., f_n] as dicts, f_i the i-fold self-convolution."""
    base = {p: float(v) for p, v in zip(points, values) if v != 0.0}
    chain = [base]
    for _ in range(n - 1):
        chain.append(_conv_dict(chain[-1], base))
    return chain


# ---------------------------------------------------------------------------
# dense line arithmetic (dimension 1, modest range)

class _LineKernel:
    """Dense evaluation workspace for a fixed 1-d support and n."""

    def __init__(self, support: LatticeSet, n: int):
        ints = support.integers()
        lo = ints[0]
        self.n = n
        self.offsets = np.asarray([x - lo for x in ints], dtype=np.intp)
        self.width = int(ints[-1] - lo + 1)

    def chain(self, w: np.ndarray) -> list[np.ndarray]:
        f = np.zeros(self.width)
        f[self.offsets] = w
        chain = [f]
        for _ in range(self.n - 1):
            prev = chain[-1]
            out = np.zeros(len(prev) + self.width - 1)
            for o, v in zip(self.offsets, w):
                if v != 0.0:
                    out[o : o + len(prev)] += v * prev
            chain.append(out)
        return chain

    def value(self, w: np.ndarray) -> float:
        f_n = self.chain(w)[-1]
        return float(f_n @ f_n)

    def value_and_gradient(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        chain = self.chain(w)
        f_n = chain[-1]
        value = float(f_n @ f_n)
        if self.n == 1:
            return value, 2.0 * w
        f_prev = chain[-2]
        width = len(f_prev)
        grad = np.empty(len(self.offsets))
        for i, o in enumerate(self.offsets):
            grad[i] = f_n[o : o + width] @ f_prev
        return value, 2.0 * self.n * grad


class _DictKernel:
    """Sparse evaluation workspace; any dimension, any spread."""

    def __init__(self, support: LatticeSet, n: int):
        self.points = support.points
        self.n = n

    def value(self, w: np.ndarray) -> float:
        f_n = _chain_dict(self.points, w, self.n)[-1]
        return math.fsum(v * v for v in f_n.values())

    def value_and_gradient(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        chain = _chain_dict(self.points, w, self.n)
        f_n = chain[-1]
        value = math.fsum(v * v for v in f_n.values())
        if self.n == 1:
            return value, 2.0 * w
        f_prev = chain[-2]
        grad = np.zeros(len(self.points))
        for i, p in enumerate(self.points):
            grad[i] = math.fsum(
                v * f_n.get(tuple(u + c for u, c in zip(t, p)), 0.0)
                for t, v in f_prev.items()
            )
        return value, 2.0 * self.n * grad


def make_kernel(support: LatticeSet, n: int):
    """Pick the evaluation path for a support; shared by all entry points."""
    if n < 1:
        raise ParseError(f"n must be positive, got {n}")
    if support.dimension == 1 and len(support) > 0:
        ints = support.integers()
        if n * (ints[-1] - ints[0] + 1) <= DENSE_RANGE_CAP:
            return _LineKernel(support, n)
    return _DictKernel(support, n)


# ---------------------------------------------------------------------------
# public operations

def convolve_power(w: WeightVector, n: int) -> SparseSignal:
    """n-fold self-convolution of the weights over Z^m.

    Entry at t is the weighted count of ordered n-tuples of support points
    summing to t. Exact up to float rounding; exact zeros are pruned.
    """
    if n < 1:
        raise ParseError(f"n must be positive, got {n}")
    support = w.support
    values = w.array()
    if support.dimension == 1 and len(support) > 0:
        ints = support.integers()
        if n * (ints[-1] - ints[0] + 1) <= DENSE_RANGE_CAP:
            dense = _LineKernel(support, n).chain(values)[-1]
            lo = ints[0] * n
            entries = {
                (lo + i,): float(v) for i, v in enumerate(dense) if v != 0.0
            }
            return SparseSignal(1, entries)
    f_n = _chain_dict(support.points, values, n)[-1]
    return SparseSignal(support.dimension, f_n)


def objective_raw(w: WeightVector, n: int) -> float:
    """||w^{*n}||^2 at the weights exactly as given (no normalization)."""
    return make_kernel(w.support, n).value(w.array())


def objective(w: WeightVector, n: int) -> float:
    """||w^{*n}||^2 after scaling w to the unit l^2 sphere.

    The applied scale is ||w||_2, i.e. objective(w) equals
    objective_raw(w) / ||w||^(2n); the result is scale-invariant and is a
    lower bound on A_{2n,m}(S)^(2n), with equality at an extremizer.
    """
    values = w.array()
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
        raise ZeroVectorError("weight vector has zero l2 norm")
    return make_kernel(w.support, n).value(values / norm)


def gradient(w: WeightVector, n: int) -> np.ndarray:
    """Exact gradient of ||w^{*n}||^2 in the unnormalized weights.

    Component at l is 2n * sum_t (w^{*n})(t) (w^{*(n-1)})(t-l); for n=1 this
    is 2w. Aligned index-for-index with w.support.points.
    """
    _, grad = make_kernel(w.support, n).value_and_gradient(w.array())
    return grad


# ---------------------------------------------------------------------------
# exact integer oracles

def _energy_dict(points: Sequence[Point], n: int) -> int:
    base = {p: 1 for p in points}
    f = base
    for _ in range(n - 1):
        out: dict = {}
        for t1, v1 in f.items():
            for t2, v2 in base.items():
                key = tuple(x + y for x, y in zip(t1, t2))
                out[key] = out.get(key, 0) + v1 * v2
        f = out
    return sum(v * v for v in f.values())


def _energy_line(ints: Sequence[int], n: int) -> int:
    lo = ints[0]
    width = ints[-1] - lo + 1
    offsets = [x - lo for x in ints]
    f = np.zeros(width, dtype=np.int64)
    f[offsets] = 1
    for _ in range(n - 1):
        out = np.zeros(len(f) + width - 1, dtype=np.int64)
        for o in offsets:
            out[o : o + len(f)] += f
        f = out
    return int(np.dot(f, f))


def additive_energy(S: LatticeSet, n: int, budget: int = DEFAULT_ENERGY_BUDGET) -> int:
    """Number of 2n-tuples in S^(2n) with equal n-fold sums, exactly.

    Computed as sum_t r_n(t)^2 with integer representation counts r_n; this
    is F_n at constant unit weights times |S|^n, and the package's primary
    integer oracle.
    """
    if n < 1:
        raise ParseError(f"n must be positive, got {n}")
    size = len(S)
    if size == 0:
        return 0
    if size**n > budget:
        raise BudgetExceededError(
            f"|S|^n = {size}^{n} exceeds the enumeration budget {budget}"
        )
    max_abs = max(abs(c) for p in S.points for c in p)
    if n * max_abs > INT64_MAX:
        raise OverflowRiskError("n-fold sums would exceed the 64-bit range")
    if S.dimension == 1:
        ints = S.integers()
        if n * (ints[-1] - ints[0] + 1) <= DENSE_RANGE_CAP:
            # int64 is safe: sum r^2 <= |S|^(2n-1) <= budget^2 / |S| << 2^63
            return _energy_line(ints, n)
    return _energy_dict(S.points, n)


def uniform_objective(S: LatticeSet, n: int, budget: int = DEFAULT_ENERGY_BUDGET) -> float:
    """F_n at the constant unit-norm weight: additive_energy / |S|^n.

    Always a lower bound for A_{2n,m}(S)^(2n); tight exactly when the
    constant function is an extremizer.
    """
    return additive_energy(S, n, budget) / len(S) ** n
