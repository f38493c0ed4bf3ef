"""Digit sets, ellipsephic levels, and Freiman-map utilities.

A digit set (base q, digits D) generates the integers whose base-q expansion
uses only digits from D. Truncating to j digits gives the level-j set

    { sum_{s<j} a_s q^s : a_s in D },

a finite set of k^j integers (k = |D|). The same data read as interval maps
x -> (x+d)/q generates an arithmetic Cantor set of Hausdorff dimension
log k / log q; everything downstream works with the integer levels only.

All coordinates are kept inside the signed 64-bit range so that serialized
output is portable; constructors reject inputs that could overflow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    BudgetExceededError,
    LevelNotDivisibleError,
    OverflowRiskError,
    ParseError,
)

INT64_MAX = (1 << 63) - 1

#: Most points a single level enumeration may materialize. Defensive memory
#: guard; the 64-bit overflow check alone would admit trillion-point levels.
DEFAULT_LEVEL_POINT_CAP = 1 << 26

#: Largest tuple enumeration freiman_defect will attempt (|S|^(2n) tuples).
DEFAULT_DEFECT_BUDGET = 10**8

Point = tuple[int, ...]


@dataclass(frozen=True)
class DigitSet:
    """Base q >= 2 with a strictly increasing digit list inside [0, q)."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.base, int) or self.base < 2:
            raise ParseError(f"base must be an integer >= 2, got {self.base!r}")
        digits = tuple(int(d) for d in self.digits)
        object.__setattr__(self, "digits", digits)
        if not digits:
            raise ParseError("digit list must be nonempty")
        if any(d < 0 or d >= self.base for d in digits):
            raise ParseError(f"digits must lie in [0, {self.base}), got {digits}")
        if any(b <= a for a, b in zip(digits, digits[1:])):
            raise ParseError(f"digits must be strictly increasing, got {digits}")

    @property
    def k(self) -> int:
        return len(self.digits)

    def to_text(self) -> str:
        """Canonical text form 'q:d1,d2,...,dk'."""
        return f"{self.base}:{','.join(str(d) for d in self.digits)}"

    def __str__(self) -> str:
        return self.to_text()

    @staticmethod
    def parse(text: str) -> "DigitSet":
        """Parse 'q:d1,d2,...,dk' with optional '^T' power suffix.

        The power suffix is defined for contiguous digit ranges {1,...,r}
        only and denotes base q^T with digits {1,...,r^T} (the powered
        construction used for maximal-exponent Cantor sets). Example:
        '3:1,2^2' is base 9 with digits {1,2,3,4}.
        """
        body = text.strip()
        power = 1
        if "^" in body:
            body, _, suffix = body.partition("^")
            try:
                power = int(suffix)
            except ValueError:
                raise ParseError(f"bad power suffix {suffix!r} in {text!r}") from None
            if power < 1:
                raise ParseError(f"power suffix must be >= 1, got {power}")
        head, sep, tail = body.partition(":")
        if not sep:
            raise ParseError(f"expected 'q:d1,d2,...', got {text!r}")
        try:
            base = int(head)
            digits = tuple(int(part) for part in tail.split(","))
        except ValueError:
            raise ParseError(f"expected 'q:d1,d2,...', got {text!r}") from None
        generator = DigitSet(base, digits)
        if power == 1:
            return generator
        r = generator.digits[-1]
        if generator.digits != tuple(range(1, r + 1)):
            raise ParseError(
                "'^T' is only defined for contiguous digit ranges 1..r, "
                f"got digits {generator.digits}"
            )
        if generator.base**power > INT64_MAX:
            raise OverflowRiskError(
                f"{generator.base}^{power} exceeds the 64-bit range"
            )
        return DigitSet(generator.base**power, tuple(range(1, r**power + 1)))


@dataclass(frozen=True)
class LatticeSet:
    """Finite set of distinct integer points in Z^m, sorted lexicographically."""

    dimension: int
    points: tuple[Point, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise ParseError(f"dimension must be >= 1, got {self.dimension}")
        pts = tuple(tuple(int(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        for p in pts:
            if len(p) != self.dimension:
                raise ParseError(f"point {p} does not have dimension {self.dimension}")
            for c in p:
                if abs(c) > INT64_MAX:
                    raise OverflowRiskError(f"coordinate {c} exceeds the 64-bit range")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ParseError("points must be strictly increasing lexicographically")

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]], dimension: int | None = None) -> "LatticeSet":
        """Canonicalize an arbitrary iterable of points (sort + dedupe)."""
        pts = sorted({tuple(int(c) for c in p) for p in points})
        if dimension is None:
            if not pts:
                raise ParseError("cannot infer dimension of an empty point set")
            dimension = len(pts[0])
        return cls(dimension, tuple(pts))

    @classmethod
    def from_integers(cls, values: Iterable[int]) -> "LatticeSet":
        return cls.from_points([(int(v),) for v in values], dimension=1)

    def __len__(self) -> int:
        return len(self.points)

    def integers(self) -> tuple[int, ...]:
        """The points of a 1-dimensional set, as plain integers."""
        if self.dimension != 1:
            raise ParseError(f"set has dimension {self.dimension}, expected 1")
        return tuple(p[0] for p in self.points)

    def to_payload(self) -> list[list[int]]:
        return [list(p) for p in self.points]


@dataclass(frozen=True)
class EllipsephicLevel:
    """Level j of the set generated by a digit set: all j-digit expansions."""

    generator: DigitSet
    level: int
    elements: LatticeSet

    def descriptor(self) -> str:
        return f"{self.generator.to_text()}@{self.level}"


@dataclass(frozen=True)
class FreimanDefect:
    """Distinct discrepancies of a bijection over equal-sum n-tuples."""

    defect_points: LatticeSet
    size: int


def enumerate_level(
    generator: DigitSet, j: int, point_cap: int = DEFAULT_LEVEL_POINT_CAP
) -> EllipsephicLevel:
    """All k^j integers whose j-digit base-q expansion stays in the digit set.

    Level 0 is the singleton {0} (the empty expansion). Raises OverflowRisk
    when q^j leaves the 64-bit range and BudgetExceeded when the level would
    hold more than point_cap points.
    """
    if j < 0:
        raise ParseError(f"level must be nonnegative, got {j}")
    q = generator.base
    if q**j > INT64_MAX:
        raise OverflowRiskError(f"{q}^{j} exceeds the 64-bit integer range")
    if generator.k**j > point_cap:
        raise BudgetExceededError(
            f"level would contain {generator.k}^{j} points, cap is {point_cap}"
        )
    elements = [0]
    place = 1
    for _ in range(j):
        elements = [x + d * place for x in elements for d in generator.digits]
        place *= q
    elements.sort()
    points = tuple((x,) for x in elements)
    return EllipsephicLevel(generator, j, LatticeSet(1, points))


def has_carryover(generator: DigitSet, n: int) -> bool:
    """True iff n-fold digitwise sums can carry between base-q positions."""
    if n < 1:
        raise ParseError(f"n must be positive, got {n}")
    return n * generator.digits[-1] >= generator.base


def hausdorff_dimension(generator: DigitSet) -> float:
    """log k / log q, the dimension of the associated Cantor set."""
    return math.log(generator.k) / math.log(generator.base)


def normalize_digits(generator: DigitSet) -> DigitSet:
    """Divide the digits by their gcd; x -> x/g is a Freiman isomorphism.

    Restriction constants of every level are invariant under this map, and
    it can remove carryover (e.g. {0,2} base 3 becomes {0,1} base 3). The
    all-zero digit set has gcd 0 and is returned unchanged.
    """
    g = math.gcd(*generator.digits)
    if g <= 1:
        return generator
    return DigitSet(generator.base, tuple(d // g for d in generator.digits))


def tensor(first: LatticeSet, second: LatticeSet) -> LatticeSet:
    """Cartesian product embedded in Z^(m+m')."""
    points = [x + y for x in first.points for y in second.points]
    return LatticeSet.from_points(points, first.dimension + second.dimension)


def regroup_base(level: EllipsephicLevel, t: int) -> LatticeSet:
    """Split each element into its j base-q^t digits, one axis per digit.

    For level jt, the bijection sum_s a_s q^(st) -> (a_0, ..., a_{j-1}) sends
    the level into the j-fold product of level-t sets. It is injective, and
    its inverse is a Freiman homomorphism of every order.
    """
    if t < 1:
        raise ParseError(f"t must be positive, got {t}")
    if level.level < t or level.level % t != 0:
        raise LevelNotDivisibleError(
            f"level {level.level} is not a positive multiple of t={t}"
        )
    j = level.level // t
    block = level.generator.base**t
    points = []
    for (x,) in level.elements.points:
        rest = x
        vec = []
        for _ in range(j):
            vec.append(rest % block)
            rest //= block
        points.append(tuple(vec))
    return LatticeSet.from_points(points, j)


def _as_pairing(
    source: LatticeSet,
    target: LatticeSet,
    phi: Mapping[Point, Point] | Iterable[tuple[Sequence[int], Sequence[int]]],
) -> dict[Point, Point]:
    if isinstance(phi, Mapping):
        items = phi.items()
    else:
        items = list(phi)
    pairing = {}
    for src, dst in items:
        pairing[tuple(int(c) for c in src)] = tuple(int(c) for c in dst)
    if set(pairing) != set(source.points):
        raise ParseError("pairing domain does not match the source set")
    if set(pairing.values()) != set(target.points) or len(set(pairing.values())) != len(pairing):
        raise ParseError("pairing is not a bijection onto the target set")
    return pairing


def freiman_defect(
    source: LatticeSet,
    target: LatticeSet,
    phi: Mapping[Point, Point] | Iterable[tuple[Sequence[int], Sequence[int]]],
    n: int,
    budget: int = DEFAULT_DEFECT_BUDGET,
) -> FreimanDefect:
    """Defect set D of a bijection phi under n-fold sums.

    D collects sum phi(x_i) - sum phi(y_i) over all 2n-tuples with
    sum x_i = sum y_i. D = {0} exactly when phi is a Freiman homomorphism of
    order n; |D|^(1/2n) bounds the distortion of the restriction constant.
    """
    if n < 1:
        raise ParseError(f"n must be positive, got {n}")
    if len(source) != len(target):
        raise ParseError("source and target must have equal cardinality")
    size = len(source)
    if size**(2 * n) > budget:
        raise BudgetExceededError(
            f"|S|^(2n) = {size}^{2 * n} exceeds the enumeration budget {budget}"
        )
    max_abs = max((abs(c) for p in source.points for c in p), default=0)
    if n * max_abs > INT64_MAX:
        raise OverflowRiskError("n-fold sums would exceed the 64-bit range")
    pairing = _as_pairing(source, target, phi)

    m_out = target.dimension
    sums_to_images: dict[Point, set[Point]] = {}
    for combo in itertools.product(source.points, repeat=n):
        key = tuple(sum(c) for c in zip(*combo))
        image = tuple(sum(c) for c in zip(*(pairing[p] for p in combo)))
        sums_to_images.setdefault(key, set()).add(image)
    defects: set[Point] = set()
    for images in sums_to_images.values():
        for u in images:
            for v in images:
                defects.add(tuple(a - b for a, b in zip(u, v)))
    points = LatticeSet.from_points(defects, m_out)
    return FreimanDefect(points, len(points))
