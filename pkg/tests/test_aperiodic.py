import math

import numpy as np
import pytest

from fftstencil import (
    BoundaryRule,
    FallbackRequired,
    FieldGrid,
    GridShape,
    StencilKernel,
    evolve_aperiodic_naive,
    recursive_boundary,
    roi_width,
    set_threads,
    solve_aperiodic,
    solve_periodic,
    step_aperiodic,
)
from fftstencil.aperiodic import recursion_fits
from fftstencil.grid import distance_field
from fftstencil.stencils import builtin_stencil, heat_kernel
from fftstencil.timing import Timings
from _helpers import random_grid, random_kernel, tolerance

ZERO = BoundaryRule.dirichlet(0.0)


def band_values(band, dims):
    """Reassemble a BandGrid into a full array (NaN outside the band)."""
    out = np.full(band.slabs[0].shape[:0] + tuple(dims) + band.slabs[0].shape[-1:], np.nan)
    for face, slab in enumerate(band.slabs):
        view = out[band.slab_index(face)]
        mask = band.owned(face)
        view[mask] = slab[mask]
    return out


@pytest.mark.parametrize("sigma,T,expected", [(1, 8, 8), (2, 0, 0), (3, 4, 12)])
def test_roi_width(sigma, T, expected):
    assert roi_width(sigma, T) == expected


class TestRecursiveBoundary:
    def test_single_step(self, backend):
        rng = np.random.default_rng(0)
        a = random_grid(rng, (20, 17))
        k = random_kernel(rng, 2, 1)
        band = recursive_boundary(a, k, ZERO, 1, cutoff=2)
        ref = step_aperiodic(a, k, ZERO).data
        got = band_values(band, a.shape.dims)
        inside = distance_field(a.shape.dims) <= 1
        np.testing.assert_allclose(got[inside], ref[inside], rtol=0, atol=1e-12)

    def test_identity_kernel(self, backend):
        k = StencilKernel({-1: 0.0, 0: 1.0, 1: 0.0})
        a = random_grid(np.random.default_rng(1), (40,))
        band = recursive_boundary(a, k, BoundaryRule.dirichlet(3.0), 9, cutoff=2)
        got = band_values(band, (40,))[:, 0]
        dist = distance_field((40,))
        assert np.all(got[dist == 1] == 3.0)
        inner = (dist > 1) & (dist <= 9)
        np.testing.assert_allclose(got[inner], a.values[inner], rtol=0, atol=1e-12)

    def test_heat_band(self, backend):
        a = random_grid(np.random.default_rng(2), (64,))
        k = heat_kernel(1)
        band = recursive_boundary(a, k, ZERO, 8, cutoff=2)
        assert (band.lo, band.hi) == (0, 8)
        ref = evolve_aperiodic_naive(a, k, ZERO, 8).data
        got = band_values(band, (64,))
        inside = distance_field((64,)) <= 8
        assert np.max(np.abs(got[inside] - ref[inside])) <= 1e-9 * np.max(np.abs(ref))

    def test_fallback_required(self, backend):
        a = random_grid(np.random.default_rng(3), (16,))
        with pytest.raises(FallbackRequired):
            recursive_boundary(a, heat_kernel(1), ZERO, 6)

    def test_zero_steps_rejected(self, backend):
        a = random_grid(np.random.default_rng(3), (16,))
        with pytest.raises(ValueError):
            recursive_boundary(a, heat_kernel(1), ZERO, 0)


class TestSolveAperiodic:
    def test_zero_steps(self, backend):
        a = random_grid(np.random.default_rng(4), (10,))
        assert solve_aperiodic(a, heat_kernel(1), ZERO, 0) is a

    def test_heat1d(self, backend):
        a = random_grid(np.random.default_rng(5), (128,))
        k = heat_kernel(1)
        stats = {}
        got = solve_aperiodic(a, k, ZERO, 16, stats=stats)
        assert stats["path"] == "recursive"
        ref = evolve_aperiodic_naive(a, k, ZERO, 16)
        np.testing.assert_allclose(got.data, ref.data, rtol=0, atol=1e-9)

    def test_heat2d_with_corners(self, backend):
        a = random_grid(np.random.default_rng(6), (24, 24))
        k = heat_kernel(2)
        stats = {}
        got = solve_aperiodic(a, k, ZERO, 4, cutoff=2, stats=stats)
        assert stats["path"] == "recursive" and stats["calls"] > 1
        ref = evolve_aperiodic_naive(a, k, ZERO, 4)
        np.testing.assert_allclose(got.data, ref.data, rtol=0, atol=1e-9)

    def test_interior_purity(self, backend):
        rng = np.random.default_rng(7)
        a = random_grid(rng, (30, 26))
        k = random_kernel(rng, 2, 2)
        T = 5
        periodic = solve_periodic(a, k, T).data
        naive = evolve_aperiodic_naive(a, k, BoundaryRule.dirichlet(0.7), T).data
        inner = distance_field(a.shape.dims) > roi_width(2, T)
        assert np.max(np.abs(periodic[inner] - naive[inner])) <= 1e-9 * np.max(np.abs(naive[inner]))

    @pytest.mark.parametrize("seed", range(16))
    def test_random_geometry(self, backend, seed):
        rng = np.random.default_rng(100 + seed)
        d = 1 + seed % 3
        sigma = 1 + (seed // 3) % 2
        dims = tuple(int(n) for n in rng.integers(16, 41 if d < 3 else 25, size=d))
        T = int(rng.integers(2, 9))
        k = random_kernel(rng, d, sigma)
        br = BoundaryRule.dirichlet(float(rng.uniform(-1, 1)))
        a = random_grid(rng, dims)
        got = solve_aperiodic(a, k, br, T, cutoff=int(rng.integers(1, 4)))
        ref = evolve_aperiodic_naive(a, k, br, T)
        assert np.max(np.abs(got.data - ref.data)) <= tolerance(ref)

    def test_fallback_path(self, backend):
        a = random_grid(np.random.default_rng(8), (12, 14))
        k = heat_kernel(2)
        stats = {}
        got = solve_aperiodic(a, k, ZERO, 10, stats=stats)
        assert stats["path"] == "naive"
        assert got == evolve_aperiodic_naive(a, k, ZERO, 10)

    def test_fallback_threshold_exact(self):
        # 4*sigma*ceil(T/2) against ceil(min dims / 2)
        assert recursion_fits(1, 8, (32,))
        assert not recursion_fits(1, 9, (32,))
        assert recursion_fits(2, 4, (31, 40))
        assert not recursion_fits(2, 5, (40, 31))

    @pytest.mark.parametrize("T,cutoff", [(8, 2), (9, 2), (64, 32), (65, 32), (100, 4), (33, 32), (32, 32)])
    def test_recursion_depth(self, backend, T, cutoff):
        a = random_grid(np.random.default_rng(9), (4 * T + 8,))
        stats = {}
        solve_aperiodic(a, heat_kernel(1), ZERO, T, cutoff=cutoff, stats=stats)
        assert stats["max_depth"] == max(0, math.ceil(math.log2(T / cutoff)))

    def test_profile_boundary(self, backend):
        rng = np.random.default_rng(10)
        dims = (20, 22)
        shape = GridShape(dims, 1)
        br = BoundaryRule.profile(rng.uniform(-1, 1, size=shape.array_shape))
        a = random_grid(rng, dims)
        k = builtin_stencil("seidel2d")
        got = solve_aperiodic(a, k, br, 4, cutoff=1)
        np.testing.assert_allclose(got.data, evolve_aperiodic_naive(a, k, br, 4).data, rtol=0, atol=1e-12)

    def test_vector_field(self, backend):
        rng = np.random.default_rng(11)
        k = random_kernel(rng, 2, 1, fields=2)
        a = random_grid(rng, (18, 20), 2)
        br = BoundaryRule.dirichlet([0.5, -0.5])
        got = solve_aperiodic(a, k, br, 4, cutoff=1)
        ref = evolve_aperiodic_naive(a, k, br, 4)
        assert np.max(np.abs(got.data - ref.data)) <= tolerance(ref)

    def test_threaded_interior(self, backend):
        rng = np.random.default_rng(12)
        a = random_grid(rng, (64, 48))
        k = heat_kernel(2)
        set_threads(2)
        try:
            got = solve_aperiodic(a, k, ZERO, 6, cutoff=2)
        finally:
            set_threads(None)
        np.testing.assert_allclose(got.data, evolve_aperiodic_naive(a, k, ZERO, 6).data, rtol=0, atol=1e-12)

    def test_timings_include_boundary(self, backend):
        timings = Timings()
        a = random_grid(np.random.default_rng(13), (64, 64))
        solve_aperiodic(a, heat_kernel(2), ZERO, 6, cutoff=2, timings=timings)
        assert timings.seconds["boundary_recursion"] > 0
        assert timings.seconds["forward_fft"] > 0

    @pytest.mark.parametrize("bad", [
        dict(k=StencilKernel({0: 1.0}), dims=(10,)),
        dict(k=StencilKernel({-2: 0.5, 2: 0.5}), dims=(4,)),
    ])
    def test_invalid_problems(self, backend, bad):
        a = random_grid(np.random.default_rng(14), bad["dims"])
        with pytest.raises(ValueError):
            solve_aperiodic(a, bad["k"], ZERO, 3)

    def test_invalid_cutoff(self, backend):
        a = random_grid(np.random.default_rng(15), (20,))
        with pytest.raises(ValueError):
            solve_aperiodic(a, heat_kernel(1), ZERO, 3, cutoff=0)

    def test_boundary_rule_mismatch(self, backend):
        a = random_grid(np.random.default_rng(16), (20,))
        with pytest.raises(ValueError):
            solve_aperiodic(a, heat_kernel(1), BoundaryRule.dirichlet([1.0, 2.0]), 3)
