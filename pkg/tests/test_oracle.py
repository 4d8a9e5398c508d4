import numpy as np
import pytest

from fftstencil import (
    BoundaryRule,
    FieldGrid,
    GridShape,
    StencilKernel,
    dense_stencil_matrix,
    evolve_aperiodic_naive,
    evolve_periodic_naive,
    step_aperiodic,
    step_periodic,
)
from _helpers import random_grid, random_kernel

THREE_TAP = StencilKernel({-1: -2.0, 0: 1.0, 1: 3.0})
THREE_TAP_MATRIX = np.array([
    [1, 3, 0, -2],
    [-2, 1, 3, 0],
    [0, -2, 1, 3],
    [3, 0, -2, 1],
], dtype=float)
IDENTITY = StencilKernel({0: 1.0})
SHIFT = StencilKernel({1: 1.0})


def heat(alpha):
    return StencilKernel({-1: alpha, 0: 1 - 2 * alpha, 1: alpha})


def grid(values):
    return FieldGrid.from_array(np.asarray(values, dtype=float))


class TestPeriodicStep:
    def test_three_tap_step(self, backend):
        out = step_periodic(grid([1, 2, 3, 4]), THREE_TAP)
        np.testing.assert_array_equal(out.values, [-1, 9, 11, 1])

    def test_identity(self, backend):
        a = random_grid(np.random.default_rng(1), (5, 6))
        assert step_periodic(a, StencilKernel({(0, 0): 1.0})) == a

    def test_shift(self, backend):
        np.testing.assert_array_equal(step_periodic(grid([1, 2, 3, 4]), SHIFT).values, [2, 3, 4, 1])

    def test_offset_too_large(self, backend):
        with pytest.raises(ValueError):
            step_periodic(grid([1, 2, 3]), StencilKernel({3: 1.0}))

    def test_wrong_dimension(self, backend):
        with pytest.raises(ValueError):
            step_periodic(grid([[1, 2], [3, 4]]), THREE_TAP)

    def test_block_kernel(self, backend):
        k = StencilKernel({0: [[1, 2], [0, 1]], 1: [[0, 0], [1, 0]]})
        a = FieldGrid.from_array(np.array([[1.0, 1.0], [2.0, 3.0], [0.5, -1.0]]), fields=2)
        out = step_periodic(a, k)
        # out[i] = B0 a[i] + B1 a[i+1]
        expected = [[1 + 2, 1 + 2], [2 + 6, 3 + 0.5], [0.5 - 2, -1 + 1]]
        np.testing.assert_allclose(out.data, expected, rtol=0, atol=1e-15)

    def test_commutes_with_rotation(self, backend):
        rng = np.random.default_rng(2)
        for dims in [(9,), (5, 7), (4, 3, 5)]:
            k = random_kernel(rng, len(dims), 1)
            a = random_grid(rng, dims)
            shift = tuple(int(rng.integers(n)) for n in dims)
            axes = tuple(range(len(dims)))
            rot = FieldGrid(a.shape, np.roll(a.data, shift, axis=axes))
            lhs = step_periodic(rot, k).data
            rhs = np.roll(step_periodic(a, k).data, shift, axis=axes)
            np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)


class TestPeriodicEvolve:
    def test_zero_steps(self, backend):
        a = grid([1, 2, 3])
        assert evolve_periodic_naive(a, THREE_TAP, 0) is a

    def test_shift_five_times(self, backend):
        out = evolve_periodic_naive(grid([1, 2, 3, 4]), SHIFT, 5)
        np.testing.assert_array_equal(out.values, [2, 3, 4, 1])

    def test_three_tap_first_column(self, backend):
        out = evolve_periodic_naive(grid([1, 0, 0, 0]), THREE_TAP, 1)
        np.testing.assert_array_equal(out.values, [1, -2, 0, 3])

    def test_negative_T(self, backend):
        with pytest.raises(ValueError):
            evolve_periodic_naive(grid([1, 2, 3]), IDENTITY, -1)


class TestAperiodic:
    def test_identity_sets_shell(self, backend):
        k = StencilKernel({-1: 0.0, 0: 1.0, 1: 0.0})
        out = step_aperiodic(grid([5, 6, 7, 8, 9]), k, BoundaryRule.dirichlet(-1.0))
        np.testing.assert_array_equal(out.values, [-1, 6, 7, 8, -1])

    def test_heat_one_step(self, backend):
        out = step_aperiodic(grid([0, 0, 1, 0, 0]), heat(0.25), BoundaryRule.dirichlet(0.0))
        np.testing.assert_array_equal(out.values, [0, 0.25, 0.5, 0.25, 0])

    def test_heat_two_steps(self, backend):
        out = evolve_aperiodic_naive(grid([0, 0, 1, 0, 0]), heat(0.25), BoundaryRule.dirichlet(0.0), 2)
        np.testing.assert_array_equal(out.values, [0, 0.25, 0.375, 0.25, 0])

    def test_grid_too_small(self, backend):
        k = StencilKernel({-2: 0.25, 0: 0.5, 2: 0.25})
        with pytest.raises(ValueError):
            step_aperiodic(grid([1, 2, 3, 4]), k, BoundaryRule.dirichlet(0.0))

    def test_needs_radius(self, backend):
        with pytest.raises(ValueError):
            step_aperiodic(grid([1, 2, 3, 4]), IDENTITY, BoundaryRule.dirichlet(0.0))

    def test_zero_steps(self, backend):
        a = grid([1, 2, 3, 4, 5])
        assert evolve_aperiodic_naive(a, heat(0.25), BoundaryRule.dirichlet(0.0), 0) is a

    def test_one_step_composition(self, backend):
        rng = np.random.default_rng(3)
        a = random_grid(rng, (9, 8))
        k = random_kernel(rng, 2, 1)
        br = BoundaryRule.dirichlet(0.5)
        assert evolve_aperiodic_naive(a, k, br, 1) == step_aperiodic(a, k, br)
        two = step_aperiodic(step_aperiodic(a, k, br), k, br)
        np.testing.assert_array_equal(evolve_aperiodic_naive(a, k, br, 2).data, two.data)

    def test_profile_rule(self, backend):
        shape = GridShape((6,), 1)
        table = np.arange(6.0)[:, None] * 10
        br = BoundaryRule.profile(table)
        k = StencilKernel({-1: 0.0, 0: 1.0, 1: 0.0})
        out = step_aperiodic(FieldGrid.zeros(shape), k, br)
        np.testing.assert_array_equal(out.values, [0, 0, 0, 0, 0, 50])


class TestDenseMatrix:
    def test_three_tap_matrix(self):
        mat = dense_stencil_matrix(THREE_TAP, GridShape((4,)))
        np.testing.assert_array_equal(mat, THREE_TAP_MATRIX)

    def test_identity(self):
        np.testing.assert_array_equal(dense_stencil_matrix(IDENTITY, GridShape((3,))), np.eye(3))

    def test_shift_matrix_definition(self):
        # X[i, j] = 1 exactly when i = j + 1
        x = np.array([[1.0 if i == (j + 1) % 3 else 0.0 for j in range(3)] for i in range(3)])
        mat = dense_stencil_matrix(StencilKernel({-1: 1.0}), GridShape((3,)))
        np.testing.assert_array_equal(mat, x)

    def test_size_guard(self):
        with pytest.raises(ValueError):
            dense_stencil_matrix(IDENTITY, GridShape((100, 100)))

    def test_matches_step(self, backend):
        rng = np.random.default_rng(4)
        for dims, m in [((7,), 1), ((4, 5), 1), ((3, 4), 2), ((3, 3, 4), 1)]:
            k = random_kernel(rng, len(dims), 1, fields=m)
            a = random_grid(rng, dims, m)
            mat = dense_stencil_matrix(k, a.shape)
            np.testing.assert_allclose(mat @ a.flatten(), step_periodic(a, k).flatten(),
                                       rtol=0, atol=1e-14)

    def test_circulant(self):
        rng = np.random.default_rng(5)
        dims = (4, 5)
        k = random_kernel(rng, 2, 2)
        mat = dense_stencil_matrix(k, GridShape(dims))
        cells = list(np.ndindex(*dims))
        ref = {}
        for r, ci in enumerate(cells):
            for c, cj in enumerate(cells):
                key = tuple((a - b) % n for a, b, n in zip(ci, cj, dims))
                assert ref.setdefault(key, mat[r, c]) == mat[r, c]

    def test_shift_decomposition(self):
        rng = np.random.default_rng(6)
        for dims in [(8,), (4, 4), (2, 4, 8)]:
            shape = GridShape(dims)
            k = random_kernel(rng, len(dims), 1)
            total = np.zeros((shape.size, shape.size))
            for off, blk in k.items():
                total += blk[0, 0] * dense_stencil_matrix(StencilKernel({off: 1.0}), shape)
            np.testing.assert_array_equal(total, dense_stencil_matrix(k, shape))
