"""Named self-check suites: known answers, invariants, cross-path oracles.

Each check returns (name, passed, detail). The CLI's verify command prints
one line per check and exits nonzero if any fail; the test suite reuses the
same functions so the two surfaces cannot drift apart.
"""

from __future__ import annotations

import math

import numpy as np

from .cantor import DigitSet, LatticeSet, enumerate_level, freiman_defect, normalize_digits
from .counting import (
    SystemSpec,
    count_solutions,
    count_vinogradov_ellipsephic,
    diagonal_count,
    energy_vs_restriction,
    offdiagonal_lower_bound,
)
from .exponents import (
    band_half_width,
    exponent_banded,
    exponent_no_carryover,
    exponent_sweep,
    trivial_cap,
    verify_power_law,
)
from .optimize import OptimizerConfig, estimate_restriction, kkt_residual
from .restriction import (
    WeightVector,
    additive_energy,
    convolve_power,
    gradient,
    objective_raw,
)
from .rng import SplitMix64, substream
from .serialize import dumps_canonical

Check = tuple[str, bool, str]


def _set1d(*xs: int) -> LatticeSet:
    return LatticeSet.from_integers(xs)


def _estimate(xs, n, **overrides):
    cfg = OptimizerConfig(**overrides) if overrides else OptimizerConfig()
    return estimate_restriction(_set1d(*xs), n, cfg)


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol


def known_answers() -> list[Check]:
    checks: list[Check] = []
    targets = [
        ((0, 1), 1.5, (2 ** -0.5, 2 ** -0.5)),
        ((0, 1, 2), 15 / 7, (math.sqrt(2 / 7), math.sqrt(3 / 7), math.sqrt(2 / 7))),
        ((0, 1, 3), 5 / 3, (3 ** -0.5, 3 ** -0.5, 3 ** -0.5)),
    ]
    for xs, expected, extremizer in targets:
        est = _estimate(xs, 2)
        ok = _close(est.value_2n, expected, 1e-9)
        checks.append(
            (
                f"value {set(xs)} n=2",
                ok,
                f"value_2n = {est.value_2n!r}, expected {expected!r}",
            )
        )
        got = est.extremizer.array()
        direct = float(np.max(np.abs(got - np.asarray(extremizer))))
        mirrored = float(np.max(np.abs(got[::-1] - np.asarray(extremizer))))
        dev = min(direct, mirrored)
        checks.append(
            (
                f"extremizer {set(xs)} n=2",
                dev <= 1e-5,
                f"componentwise deviation {dev:.3g} (up to reflection)",
            )
        )
        residual = kkt_residual(est.extremizer, 2)
        checks.append(
            (
                f"stationarity {set(xs)} n=2",
                residual <= 1e-8,
                f"kkt residual {residual:.3g}",
            )
        )
    return checks


def power_law() -> list[Check]:
    checks: list[Check] = []
    for base, digits, j_max in ((3, (0, 1), 3), (7, (0, 1, 3), 2)):
        generator = DigitSet(base, digits)
        report = verify_power_law(generator, 2, j_max)
        checks.append(
            (
                f"power law {generator.to_text()} j<={j_max}",
                report["passed"],
                f"max relative error {report['max_relative_error']:.3g}, "
                f"max extremizer gap {report['max_extremizer_gap']:.3g}",
            )
        )
    return checks


def freiman() -> list[Check]:
    checks: list[Check] = []
    doubled = DigitSet(3, (0, 2))
    plain = DigitSet(3, (0, 1))
    same = normalize_digits(doubled) == plain
    checks.append(("normalize {0,2} -> {0,1}", same, f"normalized to {normalize_digits(doubled).to_text()}"))
    for j in (1, 2, 3):
        a = estimate_restriction(enumerate_level(normalize_digits(doubled), j).elements, 2)
        b = estimate_restriction(enumerate_level(plain, j).elements, 2)
        identical = dumps_canonical(a.to_payload()) == dumps_canonical(b.to_payload())
        checks.append(
            (
                f"rescale identical estimates j={j}",
                identical,
                f"value_2n {a.value_2n!r} vs {b.value_2n!r}",
            )
        )
    source = _set1d(0, 2)
    target = _set1d(0, 1)
    halve = {(0,): (0,), (2,): (1,)}
    defect = freiman_defect(source, target, halve, 2)
    checks.append(
        (
            "halving defect {0}",
            defect.defect_points.points == ((0,),),
            f"defect set {defect.defect_points.points}",
        )
    )
    return checks


def bands() -> list[Check]:
    checks: list[Check] = []
    generator = DigitSet(3, (1, 2))
    sweep = exponent_sweep(generator, 2, range(1, 5))
    widths_ok = all(
        _close(est.half_width, band_half_width(2, est.t_used, 2), 1e-15)
        for est in sweep
    )
    checks.append(
        (
            "band widths {1,2} n=2 t=1..4",
            widths_ok,
            "half-widths match log(2n+1)/(2n t log k)",
        )
    )
    nested = all(
        abs(b.alpha_point - a.alpha_point) <= a.half_width + b.half_width
        for a, b in zip(sweep, sweep[1:])
    )
    checks.append(("band nesting {1,2} n=2", nested, "consecutive bands intersect"))
    flat = exponent_sweep(generator, 1, range(1, 5))
    zero = all(est.alpha_point == 0.0 for est in flat)
    checks.append(("n=1 curve is zero", zero, f"points {[e.alpha_point for e in flat]}"))
    capped = all(
        est.alpha_point <= trivial_cap(est.n) + 1e-9 for est in sweep + flat
    )
    checks.append(("trivial cap respected", capped, "alpha_point <= 1/2 - 1/(2n)"))
    return checks


def counting() -> list[Check]:
    checks: list[Check] = []
    generator = DigitSet(3, (0, 1))
    ok = True
    details = []
    for j in (1, 2, 3):
        level = enumerate_level(generator, j)
        result = count_solutions(level.elements, SystemSpec(2, (1,)))
        details.append(f"j={j}: {result.count}")
        ok = ok and result.count == 6**j
    checks.append(("linear counts 6^j", ok, ", ".join(details)))
    vino = count_vinogradov_ellipsephic(generator, 1, 6, 2)
    checks.append(
        (
            "vinogradov j=1 s=6",
            vino.count == 924 and vino.diagonal_count == 924,
            f"count {vino.count}, diagonal {vino.diagonal_count}",
        )
    )
    floor = offdiagonal_lower_bound(generator, 1, 6)
    checks.append(
        (
            "off-diagonal floor",
            vino.count >= floor and vino.count >= 2**6,
            f"count {vino.count} >= floor {floor:.4f} and diagonal 64",
        )
    )
    rng = SplitMix64(2024)
    agree = True
    for _ in range(10):
        size = 2 + rng.next_below(5)
        xs = set()
        while len(xs) < size:
            xs.add(rng.next_below(30) - 15)
        S = _set1d(*xs)
        n = 2 + rng.next_below(2)
        energy = additive_energy(S, n)
        counted = count_solutions(S, SystemSpec(n, (1,))).count
        agree = agree and energy == counted
    checks.append(
        ("energy equals linear count", agree, "10 random sets, exact match")
    )
    report = energy_vs_restriction(_set1d(0, 1), 2, expect_uniform_extremal=True)
    checks.append(
        (
            "uniform extremal on {0,1}",
            report["uniform_is_extremal"],
            f"gap {report['gap']:.3g}",
        )
    )
    checks.append(
        (
            "diagonal benchmark",
            diagonal_count(2, 6) == 924,
            f"diag(2,6) = {diagonal_count(2, 6)}",
        )
    )
    return checks


def gradients() -> list[Check]:
    checks: list[Check] = []
    worst = 0.0
    rng = substream(7, 0)
    for _ in range(10):
        size = 2 + rng.next_below(6)
        n = 1 + rng.next_below(3)
        support = set()
        while len(support) < size:
            support.add(rng.next_below(40) - 20)
        S = _set1d(*support)
        values = np.asarray([rng.next_float() + 0.05 for _ in range(size)])
        values /= np.linalg.norm(values)
        w = WeightVector(S, tuple(values))
        g = gradient(w, n)
        step = 1e-5
        for i in range(size):
            bumped = values.copy()
            bumped[i] += step
            dropped = values.copy()
            dropped[i] -= step
            fd = (
                objective_raw(WeightVector(S, tuple(bumped)), n)
                - objective_raw(WeightVector(S, tuple(dropped)), n)
            ) / (2 * step)
            worst = max(worst, abs(fd - g[i]) / max(1.0, abs(g[i])))
    checks.append(
        (
            "gradient vs finite differences",
            worst <= 1e-6,
            f"worst relative deviation {worst:.3g}",
        )
    )
    return checks


def determinism() -> list[Check]:
    checks: list[Check] = []
    first = _estimate((0, 1, 4), 2, rng_seed=11)
    second = _estimate((0, 1, 4), 2, rng_seed=11)
    identical = dumps_canonical(first.to_payload()) == dumps_canonical(second.to_payload())
    checks.append(("repeated estimate bitwise equal", identical, "seed 11"))
    gen = SplitMix64(0)
    observed = [gen.next_uint64() for _ in range(3)]
    expected = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    checks.append(
        (
            "splitmix64 reference stream",
            observed == expected,
            f"first outputs {[hex(v) for v in observed]}",
        )
    )
    return checks


def caps() -> list[Check]:
    checks: list[Check] = []
    samples = [
        exponent_no_carryover(DigitSet(3, (0, 1)), 2),
        exponent_no_carryover(DigitSet(7, (0, 1, 2)), 2),
        exponent_banded(DigitSet(3, (1, 2)), 2, 3),
        exponent_banded(DigitSet(5, (0, 1, 2, 3, 4)), 2, 1),
    ]
    ok = all(0.0 <= est.alpha_point <= trivial_cap(est.n) + 1e-9 for est in samples)
    checks.append(
        (
            "alpha_point within [0, cap]",
            ok,
            ", ".join(f"{e.generator.to_text()}: {e.alpha_point:.5f}" for e in samples),
        )
    )
    mass = True
    rng = substream(13, 1)
    for _ in range(5):
        size = 2 + rng.next_below(5)
        S = _set1d(*range(size))
        values = tuple(rng.next_float() + 0.01 for _ in range(size))
        w = WeightVector(S, values)
        n = 1 + rng.next_below(3)
        total = math.fsum(convolve_power(w, n).entries.values())
        expected = sum(values) ** n
        mass = mass and abs(total - expected) <= 1e-10 * abs(expected)
    checks.append(
        ("convolution mass conservation", mass, "sum of w^{*n} equals (sum w)^n")
    )
    return checks


SUITES = {
    "known-answers": known_answers,
    "power-law": power_law,
    "freiman": freiman,
    "bands": bands,
    "counting": counting,
    "gradient": gradients,
    "determinism": determinism,
    "caps": caps,
}

SUITE_ORDER = tuple(SUITES)


def run_suite(name: str) -> list[Check]:
    if name == "all":
        rows: list[Check] = []
        for suite in SUITE_ORDER:
            rows.extend(SUITES[suite]())
        return rows
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
