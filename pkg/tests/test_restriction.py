import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipsephic import (
    BudgetExceededError,
    LatticeSet,
    OverflowRiskError,
    ParseError,
    WeightVector,
    ZeroVectorError,
    additive_energy,
    convolve_power,
    freiman_defect,
    gradient,
    objective,
    objective_raw,
    tensor,
    uniform_objective,
)
from ellipsephic.restriction import DENSE_RANGE_CAP, _DictKernel, make_kernel

from conftest import set1d


def naive_energy(xs, n):
    """Fully nested 2n-loop oracle, exponential and honest."""
    import itertools

    count = 0
    for left in itertools.product(xs, repeat=n):
        for right in itertools.product(xs, repeat=n):
            if sum(left) == sum(right):
                count += 1
    return count


def _support_and_values(min_weight):
    return st.integers(min_value=2, max_value=7).flatmap(
        lambda size: st.tuples(
            st.sets(
                st.integers(min_value=-30, max_value=30), min_size=size, max_size=size
            ),
            st.lists(
                st.floats(min_value=min_weight, max_value=3.0, allow_nan=False),
                min_size=size,
                max_size=size,
            ),
        )
    )


weights_strategy = _support_and_values(0.0)
# bounded away from zero so central differences stay inside the cone
positive_weights_strategy = _support_and_values(0.05)


class TestWeightVector:
    def test_alignment_enforced(self):
        with pytest.raises(ParseError):
            WeightVector(set1d(0, 1), (1.0,))

    def test_negative_rejected(self):
        with pytest.raises(ParseError):
            WeightVector(set1d(0, 1), (1.0, -0.5))

    def test_non_finite_rejected(self):
        with pytest.raises(ParseError):
            WeightVector(set1d(0, 1), (1.0, math.nan))

    def test_payload_shape(self):
        w = WeightVector(set1d(0, 2), (0.5, 1.5))
        assert w.to_payload() == {"support": [[0], [2]], "values": [0.5, 1.5]}


class TestConvolvePower:
    def test_frozen_triangle(self):
        w = WeightVector(set1d(0, 1, 2), (1.0, 1.0, 1.0))
        signal = convolve_power(w, 2)
        assert signal.entries == {(0,): 1.0, (1,): 2.0, (2,): 3.0, (3,): 2.0, (4,): 1.0}

    def test_power_one_is_identity(self):
        w = WeightVector(set1d(-1, 3), (0.25, 4.0))
        assert convolve_power(w, 1).entries == {(-1,): 0.25, (3,): 4.0}

    def test_exact_zeros_pruned(self):
        w = WeightVector(set1d(0, 1), (1.0, 0.0))
        assert convolve_power(w, 3).entries == {(0,): 1.0}

    def test_negative_support_offsets(self):
        w = WeightVector(set1d(-2, -1), (1.0, 1.0))
        assert convolve_power(w, 2).entries == {(-4,): 1.0, (-3,): 2.0, (-2,): 1.0}

    def test_two_dimensional_support(self):
        S = LatticeSet.from_points([(0, 0), (1, 2)])
        w = WeightVector(S, (1.0, 1.0))
        assert convolve_power(w, 2).entries == {
            (0, 0): 1.0,
            (1, 2): 2.0,
            (2, 4): 1.0,
        }

    def test_dense_and_sparse_paths_agree(self):
        xs = (0, 3, 7, 19)
        values = (0.3, 1.1, 0.0, 2.4)
        w = WeightVector(set1d(*xs), values)
        dense = convolve_power(w, 3).entries
        sparse_kernel = _DictKernel(set1d(*xs), 3)
        assert make_kernel(set1d(*xs), 3).__class__.__name__ == "_LineKernel"
        dense_val, dense_grad = make_kernel(set1d(*xs), 3).value_and_gradient(
            np.asarray(values)
        )
        sparse_val, sparse_grad = sparse_kernel.value_and_gradient(np.asarray(values))
        assert dense_val == pytest.approx(sparse_val, rel=1e-12)
        assert dense_grad == pytest.approx(sparse_grad, rel=1e-12)
        assert set(dense) == {
            (a + b + c,) for a in xs for b in xs for c in xs
            if values[xs.index(a)] * values[xs.index(b)] * values[xs.index(c)] != 0.0
        }

    def test_wide_support_uses_sparse_path(self):
        S = set1d(0, DENSE_RANGE_CAP)
        assert make_kernel(S, 2).__class__.__name__ == "_DictKernel"
        w = WeightVector(S, (1.0, 1.0))
        assert convolve_power(w, 2).entries[(DENSE_RANGE_CAP,)] == 2.0

    @given(weights_strategy, st.integers(min_value=1, max_value=4))
    @settings(max_examples=60, deadline=None)
    def test_mass_conservation(self, sv, n):
        xs, values = sv
        w = WeightVector(set1d(*xs), tuple(values))
        total = math.fsum(convolve_power(w, n).entries.values())
        expected = sum(values) ** n
        assert abs(total - expected) <= 1e-10 * max(1.0, abs(expected))


class TestObjectiveAndGradient:
    def test_uniform_objective_is_energy_over_size_power(self):
        assert uniform_objective(set1d(0, 1), 2) == pytest.approx(1.5)
        assert uniform_objective(set1d(0, 1, 2), 2) == pytest.approx(19 / 9)
        assert uniform_objective(set1d(0, 1, 3), 2) == pytest.approx(15 / 9)
        assert uniform_objective(set1d(7), 2) == pytest.approx(1.0)

    def test_objective_normalizes_scale(self):
        w1 = WeightVector(set1d(0, 1), (1.0, 1.0))
        w2 = WeightVector(set1d(0, 1), (17.0, 17.0))
        assert objective(w1, 2) == pytest.approx(objective(w2, 2), rel=1e-12)

    def test_objective_raw_does_not_normalize(self):
        # ||(2,2)^{*2}||^2 = ||(4, 8, 4)||^2 = 96, no unit-sphere scaling
        w = WeightVector(set1d(0, 1), (2.0, 2.0))
        assert objective_raw(w, 2) == pytest.approx(96.0)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVectorError):
            objective(WeightVector(set1d(0, 1), (0.0, 0.0)), 2)

    def test_gradient_frozen_values(self):
        S = set1d(0, 1)
        assert gradient(WeightVector(S, (1.0, 0.0)), 2) == pytest.approx([4.0, 0.0])
        r = 2**-0.5
        assert gradient(WeightVector(S, (r, r)), 2) == pytest.approx(
            [3 * 2**0.5, 3 * 2**0.5], rel=1e-12
        )

    def test_gradient_n_equals_one(self):
        w = WeightVector(set1d(0, 5), (0.25, 2.0))
        assert gradient(w, 1) == pytest.approx([0.5, 4.0])

    @given(weights_strategy, st.integers(min_value=1, max_value=4))
    @settings(max_examples=40, deadline=None)
    def test_scale_invariance(self, sv, n):
        xs, values = sv
        # entries below ~1e-162 square to 0.0, so the l2 norm underflows and
        # the vector is indistinguishable from zero; keep inside float range
        if max(values) < 1e-150:
            return
        base = WeightVector(set1d(*xs), tuple(values))
        scaled = WeightVector(set1d(*xs), tuple(3.7 * v for v in values))
        assert objective(base, n) == pytest.approx(objective(scaled, n), rel=1e-12)

    @given(positive_weights_strategy, st.integers(min_value=1, max_value=4))
    @settings(max_examples=30, deadline=None)
    def test_gradient_matches_finite_differences(self, sv, n):
        xs, values = sv
        arr = np.asarray(values)
        arr = arr / np.linalg.norm(arr)
        S = set1d(*xs)
        g = gradient(WeightVector(S, tuple(arr)), n)
        step = 1e-5
        for i in range(len(arr)):
            up = arr.copy()
            up[i] += step
            down = arr.copy()
            down[i] -= step
            fd = (
                objective_raw(WeightVector(S, tuple(up)), n)
                - objective_raw(WeightVector(S, tuple(down)), n)
            ) / (2 * step)
            assert abs(fd - g[i]) <= 1e-6 * max(1.0, abs(g[i]))

    def test_tensor_multiplicativity_at_fixed_weights(self):
        a = WeightVector(set1d(0, 1), (0.6, 0.8))
        b = WeightVector(set1d(0, 2, 5), (0.5, 0.5, 1.0))
        product_support = tensor(a.support, b.support)
        values = {}
        for (x,), va in zip(a.support.points, a.values):
            for (y,), vb in zip(b.support.points, b.values):
                values[(x, y)] = va * vb
        w = WeightVector(product_support, tuple(values[p] for p in product_support.points))
        assert objective(w, 2) == pytest.approx(
            objective(a, 2) * objective(b, 2), rel=1e-10
        )
        assert objective(w, 3) == pytest.approx(
            objective(a, 3) * objective(b, 3), rel=1e-10
        )

    def test_freiman_isomorphism_preserves_objective(self):
        # x -> 3x + 4 preserves all additive structure: the integer oracle
        # transfers exactly, the float objective up to summation order
        xs = (0, 1, 5)
        ys = tuple(3 * x + 4 for x in xs)
        assert additive_energy(set1d(*ys), 3) == additive_energy(set1d(*xs), 3)
        values = (0.2, 1.4, 0.9)
        a = objective(WeightVector(set1d(*xs), values), 2)
        b = objective(WeightVector(set1d(*ys), values), 2)
        assert a == pytest.approx(b, rel=1e-12)

    def test_general_bijection_defect_bound(self):
        # phi: {0,1,2} -> {0,1,4} is not order-2 Freiman; |D| = 3 bounds the loss
        source, target = set1d(0, 1, 2), set1d(0, 1, 4)
        phi = {(0,): (0,), (1,): (1,), (2,): (4,)}
        defect = freiman_defect(source, target, phi, 2)
        values = (0.9, 0.4, 1.2)
        lhs = objective(WeightVector(source, values), 2)
        rhs = objective(WeightVector(target, values), 2)
        assert lhs <= defect.size * rhs + 1e-12


class TestAdditiveEnergy:
    def test_frozen_energies(self):
        assert additive_energy(set1d(0, 1), 2) == 6
        assert additive_energy(set1d(0, 1, 2), 2) == 19
        assert additive_energy(set1d(0, 1, 3), 2) == 15
        assert additive_energy(set1d(9), 3) == 1

    def test_translation_invariance(self):
        assert additive_energy(set1d(100, 101, 103), 2) == 15

    def test_dense_sparse_agreement(self):
        S2 = LatticeSet.from_points([(x, 0) for x in (0, 1, 3)])
        assert additive_energy(S2, 2) == additive_energy(set1d(0, 1, 3), 2)

    def test_budget_guard(self):
        with pytest.raises(BudgetExceededError):
            additive_energy(set1d(*range(100)), 5, budget=10**6)

    def test_overflow_guard(self):
        S = set1d(0, 2**62)
        with pytest.raises(OverflowRiskError):
            additive_energy(S, 4)

    @given(
        st.sets(st.integers(min_value=-12, max_value=12), min_size=1, max_size=5),
        st.integers(min_value=1, max_value=3),
    )
    @settings(max_examples=40, deadline=None)
    def test_matches_naive_nested_loops(self, xs, n):
        assert additive_energy(set1d(*xs), n) == naive_energy(sorted(xs), n)

    @given(st.sets(st.integers(min_value=-9, max_value=9), min_size=1, max_size=6))
    @settings(max_examples=30, deadline=None)
    def test_energy_at_least_diagonal(self, xs):
        # the 2n-tuples with y a permutation of x always solve the system
        assert additive_energy(set1d(*xs), 2) >= 2 * len(xs) ** 2 - len(xs)
