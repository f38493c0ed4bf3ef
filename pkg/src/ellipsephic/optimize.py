"""Sphere-constrained maximization of the restriction objective.

Two methods, one driver. Projected gradient ascent takes monotone steps
w <- project(w + step * grad), where project clamps negatives to zero and
renormalizes; backtracking keeps the objective nondecreasing. The fixed-point
iteration renormalizes the gradient map itself, w <- g / ||g||, exploiting
the Lagrange stationarity condition w = grad / ||grad|| satisfied by interior
extremizers; its convergence is empirical, not proven, so non-convergence is
reported rather than raised. The driver runs both from a deterministic
battery of starts (uniform, single-mass, then seeded splitmix64 draws) and
keeps the largest objective value, breaking near-ties (1e-12) toward the
lowest restart index with the fixed-point certificate preferred within a
restart because it reaches machine-level stationarity residuals.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .cantor import LatticeSet
from .errors import (
    EllipsephicError,
    NonFiniteError,
    ParseError,
    ZeroVectorError,
)
from .restriction import WeightVector, gradient, make_kernel
from .rng import substream
from .serialize import dumps_canonical

_MIN_STEP = 1e-18
_MAX_STEP = 1e8
_PLATEAU_LIMIT = 32
_TIE_TOL = 1e-12

METHODS = ("gradient_ascent", "fixed_point", "both")


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "both"
    tolerance: float = 1e-8
    max_iterations: int = 100_000
    restarts: int = 16
    rng_seed: int = 0
    step_init: float = 0.1
    step_shrink: float = 0.5

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParseError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (self.tolerance > 0):
            raise ParseError("tolerance must be positive")
        if self.max_iterations < 1 or self.restarts < 1:
            raise ParseError("max_iterations and restarts must be >= 1")
        if not (self.step_init > 0 and 0 < self.step_shrink < 1):
            raise ParseError("step rule requires step_init > 0 and 0 < step_shrink < 1")

    def to_payload(self) -> dict:
        return {
            "method": self.method,
            "tolerance": self.tolerance,
            "max_iterations": self.max_iterations,
            "restarts": self.restarts,
            "rng_seed": self.rng_seed,
            "step_init": self.step_init,
            "step_shrink": self.step_shrink,
        }


@dataclass(frozen=True)
class RestrictionEstimate:
    set_descriptor: str
    n: int
    value_2n: float
    value: float
    extremizer: WeightVector
    stationarity_residual: float
    iterations_used: int
    converged: bool
    method_used: str

    def to_payload(self) -> dict:
        return {
            "set": self.set_descriptor,
            "n": self.n,
            "value_2n": self.value_2n,
            "value": self.value,
            "extremizer": self.extremizer.to_payload(),
            "stationarity_residual": self.stationarity_residual,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "method_used": self.method_used,
        }


def default_descriptor(S: LatticeSet) -> str:
    digest = hashlib.sha256(dumps_canonical(S.to_payload()).encode()).hexdigest()
    return f"points:{digest[:12]}"


def kkt_residual(w: WeightVector, n: int) -> float:
    """Distance of w from the normalized active-set gradient direction.

    With g the raw gradient and mu = <g, w> the sphere multiplier, gradient
    components at boundary points (w_l = 0 with g_l <= mu) are inactive and
    zeroed; the residual ||w - g~/||g~|| || vanishes exactly at stationary
    points, including boundary ones such as all mass on a single frequency.
    """
    values = w.array()
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
        raise ZeroVectorError("kkt_residual of the zero vector")
    if abs(norm - 1.0) > 1e-6:
        raise ParseError(f"kkt_residual expects unit-norm weights, got ||w|| = {norm}")
    g = gradient(w, n)
    return _stationarity(values, g)


def _stationarity(w: np.ndarray, g: np.ndarray) -> float:
    mu = float(g @ w)
    trimmed = np.where((w == 0.0) & (g <= mu), 0.0, g)
    norm = float(np.linalg.norm(trimmed))
    if norm == 0.0:
        raise ZeroVectorError("gradient vanished; stationarity residual undefined")
    return float(np.linalg.norm(w - trimmed / norm))


def _projected_residual(w: np.ndarray, g: np.ndarray) -> float:
    r = g - float(g @ w) * w
    r = np.where((w == 0.0) & (r < 0.0), 0.0, r)
    return float(np.linalg.norm(r))


def _require_finite(value: float) -> None:
    if not math.isfinite(value):
        raise NonFiniteError(f"objective became non-finite ({value})")


def _check_start(S: LatticeSet, w0: WeightVector) -> np.ndarray:
    if w0.support != S:
        raise ParseError("start vector support does not match the optimization set")
    return w0.array()


def _finish(
    S: LatticeSet,
    n: int,
    descriptor: str,
    w: np.ndarray,
    value: float,
    g: np.ndarray,
    iterations: int,
    converged: bool,
    method: str,
) -> RestrictionEstimate:
    extremizer = WeightVector(S, tuple(float(x) for x in w))
    return RestrictionEstimate(
        set_descriptor=descriptor,
        n=n,
        value_2n=float(value),
        value=float(value) ** (1.0 / (2 * n)),
        extremizer=extremizer,
        stationarity_residual=_stationarity(w, g),
        iterations_used=iterations,
        converged=converged,
        method_used=method,
    )


def gradient_ascent(
    S: LatticeSet,
    n: int,
    cfg: OptimizerConfig,
    w0: WeightVector,
    descriptor: str | None = None,
) -> RestrictionEstimate:
    """Monotone projected ascent on the nonnegative unit sphere.

    Stops when the Riemannian gradient norm (tangential component, feasible
    directions only at active bounds) drops to cfg.tolerance, when
    max_iterations is hit, or when backtracking can no longer find an
    ascending step at float precision (a stall, reported converged=False).
    """
    descriptor = descriptor or default_descriptor(S)
    w = np.maximum(_check_start(S, w0), 0.0)
    norm = float(np.linalg.norm(w))
    if norm == 0.0:
        raise ZeroVectorError("gradient_ascent requires a nonzero start")
    w = w / norm
    kernel = make_kernel(S, n)
    value, g = kernel.value_and_gradient(w)
    _require_finite(value)

    step = cfg.step_init
    converged = False
    plateau = 0
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        if _projected_residual(w, g) <= cfg.tolerance:
            converged = True
            break
        accepted = False
        shrunk = False
        cand = cand_value = cand_grad = None
        while step >= _MIN_STEP:
            cand = np.maximum(w + step * g, 0.0)
            cand_norm = float(np.linalg.norm(cand))
            if cand_norm > 0.0:
                cand = cand / cand_norm
                cand_value, cand_grad = kernel.value_and_gradient(cand)
                _require_finite(cand_value)
                if cand_value >= value:
                    accepted = True
                    break
            step *= cfg.step_shrink
            shrunk = True
        if not accepted:
            break
        stalled = cand_value - value <= abs(value) * 1e-15
        plateau = plateau + 1 if stalled else 0
        w, value, g = cand, cand_value, cand_grad
        if plateau >= _PLATEAU_LIMIT:
            break
        if not shrunk:
            step = min(step * 2.0, _MAX_STEP)
    return _finish(S, n, descriptor, w, value, g, iterations, converged, "gradient_ascent")


def fixed_point(
    S: LatticeSet,
    n: int,
    cfg: OptimizerConfig,
    w0: WeightVector,
    descriptor: str | None = None,
) -> RestrictionEstimate:
    """Normalized gradient-map iteration w <- g(w) / ||g(w)||.

    Requires a strictly positive start so the map is unambiguous. Stops when
    consecutive iterates are within cfg.tolerance in l^2; convergence is
    conjectural, so hitting max_iterations reports converged=False with the
    last iterate rather than raising.
    """
    descriptor = descriptor or default_descriptor(S)
    w = _check_start(S, w0)
    if np.any(w <= 0.0):
        raise ParseError("fixed_point requires a strictly positive start")
    w = w / float(np.linalg.norm(w))
    kernel = make_kernel(S, n)

    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        _, g = kernel.value_and_gradient(w)
        g_norm = float(np.linalg.norm(g))
        if g_norm == 0.0:
            raise ZeroVectorError("gradient map vanished; fixed point undefined")
        w_next = g / g_norm
        delta = float(np.linalg.norm(w_next - w))
        w = w_next
        if delta <= cfg.tolerance:
            converged = True
            break
    value, g = kernel.value_and_gradient(w)
    _require_finite(value)
    return _finish(S, n, descriptor, w, value, g, iterations, converged, "fixed_point")


def _starting_weights(size: int, cfg: OptimizerConfig) -> list[np.ndarray]:
    starts = []
    for r in range(cfg.restarts):
        if r == 0:
            starts.append(np.full(size, 1.0 / math.sqrt(size)))
        elif r == 1:
            single = np.zeros(size)
            single[0] = 1.0
            starts.append(single)
        else:
            gen = substream(cfg.rng_seed, r)
            starts.append(np.asarray([gen.next_float() for _ in range(size)]))
    return starts


def estimate_restriction(
    S: LatticeSet,
    n: int,
    cfg: OptimizerConfig | None = None,
    descriptor: str | None = None,
) -> RestrictionEstimate:
    """Multi-start driver: the best estimate across restarts and methods.

    Start 0 is uniform, start 1 is all mass on the first (canonical-order)
    point, the rest are seeded splitmix64 uniform(0,1) draws. Per-start
    failures (e.g. the single-mass start violating fixed_point's positivity
    precondition) are tolerated; an error propagates only if every start of
    every method fails. Deterministic for fixed (S, n, cfg).
    """
    cfg = cfg or OptimizerConfig()
    if len(S) < 1:
        raise ParseError("cannot optimize over an empty set")
    descriptor = descriptor or default_descriptor(S)
    if cfg.method == "both":
        methods = (fixed_point, gradient_ascent)
    elif cfg.method == "fixed_point":
        methods = (fixed_point,)
    else:
        methods = (gradient_ascent,)

    best: RestrictionEstimate | None = None
    first_error: EllipsephicError | None = None
    for start in _starting_weights(len(S), cfg):
        w0 = WeightVector(S, tuple(float(x) for x in start))
        for method in methods:
            try:
                est = method(S, n, cfg, w0, descriptor=descriptor)
            except EllipsephicError as exc:
                if first_error is None:
                    first_error = exc
                continue
            if best is None or est.value_2n > best.value_2n + _TIE_TOL:
                best = est
    if best is None:
        raise first_error if first_error is not None else ZeroVectorError(
            "all optimizer starts failed"
        )
    return best
